import fs from 'node:fs';

/** Parsed CSV with a header row. The pipeline's writers never quote fields. */
export interface Table {
  columns: string[];
  rows: string[][];
}

/** Raised for anything wrong with the input's shape or content. */
export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError('no rows: the file is empty');
  }
  const columns = lines[0].split(',').map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const fields = line.split(',');
    if (fields.length !== columns.length) {
      throw new SchemaError(
        `row ${i + 2} has ${fields.length} fields, header has ${columns.length}`,
      );
    }
    return fields;
  });
  return { columns, rows };
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = fs.readFileSync(path, 'utf8');
  } catch {
    throw new SchemaError(`cannot read ${path}`);
  }
  return parseCsv(text);
}

/**
 * Check that every needed column exists and that there is at least one data
 * row; returns column name -> index. Errors name the offending column.
 */
export function requireColumns(table: Table, needed: string[], path: string): Map<string, number> {
  const index = new Map<string, number>();
  table.columns.forEach((name, i) => index.set(name, i));
  const missing = needed.filter((name) => !index.has(name));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column${missing.length > 1 ? 's' : ''} ` +
        missing.map((c) => `'${c}'`).join(', ') +
        ` (found: ${table.columns.join(', ')})`,
    );
  }
  if (table.rows.length === 0) {
    throw new SchemaError(`${path}: no rows`);
  }
  return index;
}

export function numeric(raw: string, column: string, row: number): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`column '${column}', row ${row}: '${raw}' is not a number`);
  }
  return value;
}
