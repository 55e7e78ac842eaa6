import { readFileSync } from "fs";
import { describe, expect, it } from "vitest";

import { SchemaError, parseMetricsCsv, schemesInOrder } from "../src/schema.js";

const golden = readFileSync(new URL("../fixtures/golden.csv", import.meta.url), "utf8");

describe("parseMetricsCsv", () => {
  it("parses the golden fixture", () => {
    const rows = parseMetricsCsv(golden);
    expect(rows).toHaveLength(20);
    expect(rows[0].scheme).toBe("exhaustive");
    expect(rows[0].point_kind).toBe("snr_db");
    expect(rows[0].n_trials).toBe(40);
    expect(rows[0].success_rate).toBeCloseTo(0.425, 12);
  });

  it("keeps scheme order of first appearance", () => {
    const rows = parseMetricsCsv(golden);
    expect(schemesInOrder(rows)).toEqual([
      "exhaustive",
      "hierarchical",
      "coded-fixed",
      "coded-adaptive",
    ]);
  });

  it("names a missing column", () => {
    const broken = golden.replace("mean_rate", "mean_rt");
    expect(() => parseMetricsCsv(broken)).toThrowError(/missing column mean_rate/);
  });

  it("names an unexpected column", () => {
    const broken = golden.replace("scheme,", "scheme,vibes,").replace(
      /^(exhaustive)/m,
      "exhaustive,nice",
    );
    try {
      parseMetricsCsv(broken);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("vibes");
    }
  });

  it("names a non-numeric cell's column", () => {
    const broken = golden.replace("0.425", "many");
    try {
      parseMetricsCsv(broken);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("success_rate");
      expect((err as SchemaError).message).toContain("success_rate");
    }
  });

  it("rejects out-of-range success rates", () => {
    const broken = golden.replace("0.425", "1.25");
    expect(() => parseMetricsCsv(broken)).toThrowError(/success_rate/);
  });

  it("rejects ragged rows", () => {
    const broken = golden + "exhaustive,snr_db,1.0,40\n";
    expect(() => parseMetricsCsv(broken)).toThrowError(/expected 10 fields/);
  });

  it("rejects an empty document", () => {
    expect(() => parseMetricsCsv("")).toThrowError(/missing header/);
  });
});
