#!/usr/bin/env node
/**
 * plot -- render a figure from codedbeam harness CSV results.
 *
 *   plot --kind success-vs-snr --in results.csv [--in more.csv]
 *        --out figure.svg [--scheme name ...] [--label scheme=Label ...]
 *
 * Exits 0 on success; exits 2 with a diagnostic on usage, schema, or data
 * errors (schema messages name the offending column).  Input CSVs are never
 * modified and rendering is deterministic for fixed inputs.
 */

import { readFileSync, writeFileSync } from "fs";

import { FIGURE_KINDS, FigureError, FigureKind, FigureSpec, renderFigure } from "./figure.js";
import { MetricsRow, SchemaError, parseMetricsCsv } from "./schema.js";

interface CliOptions {
  kind: FigureKind;
  inputs: string[];
  output: string;
  schemes: string[];
  labels: Record<string, string>;
  width?: number;
  height?: number;
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = {
    kind: "success-vs-snr",
    inputs: [],
    output: "",
    schemes: [],
    labels: {},
  };
  let kindSeen = false;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) {
        throw new UsageError(`${arg} expects a value`);
      }
      return argv[++i];
    };
    switch (arg) {
      case "--kind": {
        const kind = next();
        if (!(FIGURE_KINDS as string[]).includes(kind)) {
          throw new UsageError(
            `unknown --kind ${kind}; expected one of ${FIGURE_KINDS.join(", ")}`,
          );
        }
        options.kind = kind as FigureKind;
        kindSeen = true;
        break;
      }
      case "--in":
        options.inputs.push(next());
        break;
      case "--out":
        options.output = next();
        break;
      case "--scheme":
        options.schemes.push(next());
        break;
      case "--label": {
        const pair = next();
        const eq = pair.indexOf("=");
        if (eq <= 0) {
          throw new UsageError(`--label expects scheme=Label, got ${pair}`);
        }
        options.labels[pair.slice(0, eq)] = pair.slice(eq + 1);
        break;
      }
      case "--width":
        options.width = Number(next());
        break;
      case "--height":
        options.height = Number(next());
        break;
      default:
        throw new UsageError(`unknown argument ${arg}`);
    }
  }
  if (!kindSeen) {
    throw new UsageError("--kind is required");
  }
  if (options.inputs.length === 0) {
    throw new UsageError("at least one --in CSV is required");
  }
  if (!options.output) {
    throw new UsageError("--out is required");
  }
  return options;
}

export function run(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const rows: MetricsRow[] = [];
    for (const path of options.inputs) {
      rows.push(...parseMetricsCsv(readFileSync(path, "utf8")));
    }
    const spec: FigureSpec = {
      kind: options.kind,
      schemes: options.schemes,
      labels: options.labels,
      width: options.width,
      height: options.height,
    };
    const svg = renderFigure(spec, rows);
    writeFileSync(options.output, svg);
    console.log(`wrote ${options.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
    } else if (err instanceof FigureError) {
      console.error(`error: ${err.message}`);
    } else if ((err as NodeJS.ErrnoException).code) {
      console.error(`error: ${(err as Error).message}`);
    } else {
      throw err;
    }
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
