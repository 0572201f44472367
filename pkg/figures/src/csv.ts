/** Strict parsing for the comma-separated files the solver CLI writes.
 *
 * The dialect is deliberately narrow: no quoting, no escaping, one
 * header row, every row with the same cell count.  Anything else is a
 * malformed input and raises, naming the offending line.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text
    .split("\n")
    .map((line) => (line.endsWith("\r") ? line.slice(0, -1) : line));
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new CsvError("empty file: no header row");
  }
  const header = lines[0]!.split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

/** Column accessor bound to one table; lookups are validated up front. */
export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column '${name}'`);
  }
  return idx;
}
