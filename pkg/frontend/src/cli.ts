#!/usr/bin/env node
import fs from 'node:fs';
import path from 'node:path';
import { pathToFileURL } from 'node:url';

import { buildChart, FIGURE_KINDS, FigureKind } from './charts.js';
import { readTable, SchemaError } from './csv.js';
import { renderSvg } from './render.js';

const USAGE = `usage: plots <kind> <input.csv> -o <output.svg>

kinds: ${FIGURE_KINDS.join(', ')}

Renders one chart per invocation from the sweep CSVs:
  hit_vs_radius / hit_vs_density / hit_vs_cache read a hits.csv
  aic_trace reads an aic_trace.csv`;

interface Args {
  kind: FigureKind;
  input: string;
  output: string;
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '-o' || arg === '--output') {
      output = argv[++i];
    } else if (arg === '-h' || arg === '--help') {
      throw new UsageError(USAGE);
    } else if (arg.startsWith('-')) {
      throw new UsageError(`unknown flag ${arg}\n\n${USAGE}`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2 || !output) {
    throw new UsageError(USAGE);
  }
  const [kind, input] = positional;
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`unknown figure kind '${kind}' (expected ${FIGURE_KINDS.join(', ')})`);
  }
  return { kind: kind as FigureKind, input, output };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(err.message);
      return 2;
    }
    throw err;
  }
  try {
    const table = readTable(args.input);
    const option = buildChart(args.kind, table, args.input);
    const svg = renderSvg(option);
    fs.mkdirSync(path.dirname(path.resolve(args.output)), { recursive: true });
    fs.writeFileSync(args.output, svg);
    console.log(`wrote ${args.output} (${args.kind}, ${table.rows.length} rows)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invoked = process.argv[1] ? pathToFileURL(path.resolve(process.argv[1])).href : '';
if (import.meta.url === invoked) {
  process.exit(main(process.argv.slice(2)));
}
