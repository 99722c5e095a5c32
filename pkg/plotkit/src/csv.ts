import { readFileSync } from 'fs';

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
}

/** Read a lab CSV: mandatory header, '.'-decimal numeric cells, no quoting. */
export function readCsv(path: string): Table {
  const text = readFileSync(path, 'utf8');
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaError(`${path}: empty CSV`);
  const columns = lines[0].split(',');
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',');
    if (cells.length !== columns.length) {
      throw new SchemaError(`${path}:${i + 1}: expected ${columns.length} cells`);
    }
    rows.push(cells.map((c) => {
      const v = c === 'good' ? 1 : c === 'bad' ? 0 : Number(c);
      if (Number.isNaN(v)) throw new SchemaError(`${path}:${i + 1}: non-numeric cell '${c}'`);
      return v;
    }));
  }
  return { columns, rows };
}

export function column(t: Table, name: string, path = ''): number[] {
  const i = t.columns.indexOf(name);
  if (i < 0) throw new SchemaError(`${path}: missing column '${name}'`);
  return t.rows.map((r) => r[i]);
}
