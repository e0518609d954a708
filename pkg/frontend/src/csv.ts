/** CSV tables as written by the effgrow CLI: optional '#' comment lines,
 *  a header row, comma-separated numeric/text cells, LF endings. */

import { readFileSync } from "fs";

export class SchemaError extends Error {}

export interface Table {
  file: string;
  comments: string[];
  header: string[];
  rows: string[][];
}

export function parseTable(text: string, file: string): Table {
  const comments: string[] = [];
  const body: string[] = [];
  for (const line of text.split("\n")) {
    if (line.startsWith("#")) comments.push(line.slice(1).trim());
    else if (line.trim().length > 0) body.push(line);
  }
  if (body.length === 0) {
    throw new SchemaError(`${file}: no header row (empty file)`);
  }
  const header = body[0].split(",");
  const rows = body.slice(1).map((line) => line.split(","));
  return { file, comments, header, rows };
}

export function readTable(path: string): Table {
  return parseTable(readFileSync(path, "utf8"), path);
}

/** Fail loudly, naming every missing column. */
export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${table.file}: missing column(s) ${missing.join(", ")} ` +
        `(found: ${table.header.join(", ")})`,
    );
  }
  if (table.rows.length === 0) {
    throw new SchemaError(`${table.file}: no data rows`);
  }
}

/** Column accessor; numeric cells parse lazily. */
export function column(table: Table, name: string): (row: string[]) => string {
  const idx = table.header.indexOf(name);
  if (idx < 0) throw new SchemaError(`${table.file}: missing column ${name}`);
  return (row) => row[idx];
}

export function numericColumn(
  table: Table,
  name: string,
): (row: string[]) => number {
  const get = column(table, name);
  return (row) => {
    const cell = get(row);
    const value = cell === "" ? NaN : Number(cell);
    return value;
  };
}

/** Stable group-by preserving first-appearance order of keys. */
export function groupBy<T>(
  items: T[],
  key: (item: T) => string,
): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = groups.get(k);
    if (bucket) bucket.push(item);
    else groups.set(k, [item]);
  }
  return groups;
}
