import { describe, expect, it } from 'vitest';

import { numeric, parseCsv, requireColumns, SchemaError } from '../src/csv.js';

describe('parseCsv', () => {
  it('splits header and rows', () => {
    const table = parseCsv('a,b\n1,2\n3,4\n');
    expect(table.columns).toEqual(['a', 'b']);
    expect(table.rows).toEqual([
      ['1', '2'],
      ['3', '4'],
    ]);
  });

  it('tolerates CRLF and trailing newline', () => {
    const table = parseCsv('a,b\r\n1,2\r\n');
    expect(table.rows).toEqual([['1', '2']]);
  });

  it('rejects empty input', () => {
    expect(() => parseCsv('')).toThrow(SchemaError);
  });

  it('rejects ragged rows with the row number', () => {
    expect(() => parseCsv('a,b\n1\n')).toThrow(/row 2/);
  });
});

describe('requireColumns', () => {
  it('maps names to indices', () => {
    const table = parseCsv('x,y,z\n1,2,3\n');
    const idx = requireColumns(table, ['z', 'x'], 'test.csv');
    expect(idx.get('z')).toBe(2);
    expect(idx.get('x')).toBe(0);
  });

  it('names every missing column', () => {
    const table = parseCsv('x,y\n1,2\n');
    expect(() => requireColumns(table, ['x', 'mc_estimate', 'scheme'], 'f.csv')).toThrow(
      /missing columns 'mc_estimate', 'scheme'/,
    );
  });

  it('rejects a header-only file as no rows', () => {
    const table = parseCsv('x,y\n');
    expect(() => requireColumns(table, ['x'], 'f.csv')).toThrow(/no rows/);
  });
});

describe('numeric', () => {
  it('parses floats', () => {
    expect(numeric('0.25', 'a', 2)).toBe(0.25);
  });
  it('names the offending column and row', () => {
    expect(() => numeric('oops', 'analytic', 7)).toThrow(/'analytic', row 7/);
  });
});
