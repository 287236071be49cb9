/**
 * Reader for the simulator's CSV dialect: comma-separated numeric columns,
 * '#'-prefixed `key = value` metadata lines before the header row.
 */

import { readFileSync } from "fs";

export interface CsvTable {
  meta: Record<string, string>;
  header: string[];
  /** column-major numeric data, same order as header */
  columns: number[][];
  rows: number;
}

export function parseCsv(text: string): CsvTable {
  const meta: Record<string, string> = {};
  let header: string[] | null = null;
  const columns: number[][] = [];
  let rows = 0;
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const eq = line.indexOf("=");
      if (eq > 0) {
        meta[line.slice(1, eq).trim()] = line.slice(eq + 1).trim();
      }
      continue;
    }
    if (header === null) {
      header = line.split(",").map((s) => s.trim());
      for (let i = 0; i < header.length; i++) columns.push([]);
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new Error(
        `row ${rows + 1} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    for (let i = 0; i < parts.length; i++) {
      const v = Number(parts[i]);
      columns[i].push(Number.isNaN(v) ? NaN : v);
    }
    rows += 1;
  }
  if (header === null) {
    throw new Error("empty CSV: no header row found");
  }
  return { meta, header, columns, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf-8"));
}

/**
 * Enforce the exact column contract of a figure kind.  A mismatch aborts
 * with the first differing column named.
 */
export function requireSchema(table: CsvTable, kind: string, expected: string[]): void {
  const got = table.header;
  const n = Math.max(got.length, expected.length);
  for (let i = 0; i < n; i++) {
    if (got[i] !== expected[i]) {
      throw new Error(
        `schema mismatch for ${kind}: expected [${expected.join(",")}], ` +
          `got [${got.join(",")}]; differing column '${got[i] ?? expected[i]}'`,
      );
    }
  }
  if (table.rows === 0) {
    throw new Error(`empty data for ${kind}`);
  }
}

export function column(table: CsvTable, name: string): number[] {
  const i = table.header.indexOf(name);
  if (i < 0) throw new Error(`missing column '${name}'`);
  return table.columns[i];
}
