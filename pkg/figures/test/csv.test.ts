import { describe, expect, it } from "vitest";

import { CsvError, columnIndex, parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv("a,b,c\n1,2,3\n4,,6\n");
    expect(table.header).toEqual(["a", "b", "c"]);
    expect(table.rows).toEqual([
      ["1", "2", "3"],
      ["4", "", "6"],
    ]);
  });

  it("accepts crlf line endings and a missing final newline", () => {
    const table = parseCsv("a,b\r\n1,2\r\n3,4");
    expect(table.rows).toEqual([
      ["1", "2"],
      ["3", "4"],
    ]);
  });

  it("keeps a header-only file as zero rows", () => {
    const table = parseCsv("alpha,pof\n");
    expect(table.header).toEqual(["alpha", "pof"]);
    expect(table.rows).toEqual([]);
  });

  it("rejects ragged rows with the line number", () => {
    expect(() => parseCsv("a,b\n1,2\n1,2,3\n")).toThrowError(/row 3/);
  });

  it("rejects an empty file", () => {
    expect(() => parseCsv("")).toThrowError(CsvError);
  });
});

describe("columnIndex", () => {
  it("finds a column and names a missing one", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(columnIndex(table, "b")).toBe(1);
    expect(() => columnIndex(table, "zzz")).toThrowError(/'zzz'/);
  });
});
