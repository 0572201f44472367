/** Turning parsed tables into plottable series.
 *
 * Sweep kinds yield one series per input file (price over alpha) with a
 * null y wherever the solve was infeasible, which the renderer draws as
 * a gap.  Trajectory kinds read only the across-seed aggregate rows:
 * the `agg` block gives the mean line and the `agg_std` block the
 * standard-deviation band around it.
 */

import { Table, columnIndex } from "./csv.js";
import { Kind, SchemaError, numericCell } from "./schema.js";

export interface Point {
  x: number;
  y: number | null;
}

export interface BandPoint {
  x: number;
  lo: number;
  hi: number;
}

export interface Series {
  label: string;
  points: Point[];
  band?: BandPoint[];
}

export interface NamedTable {
  file: string;
  table: Table;
}

/** basename without directory, extension, or the writer's file prefix */
export function seriesLabel(file: string): string {
  const base = file.split("/").pop()!.replace(/\.csv$/i, "");
  for (const prefix of ["traj-small-", "traj-", "pof-", "pos-"]) {
    if (base.startsWith(prefix) && base.length > prefix.length) {
      return base.slice(prefix.length);
    }
  }
  return base;
}

function sweepSeries(
  input: NamedTable,
  xColumn: string,
  yColumn: string,
): Point[] {
  const xIdx = columnIndex(input.table, xColumn);
  const yIdx = columnIndex(input.table, yColumn);
  return input.table.rows.map((row) => {
    const x = numericCell(row[xIdx]!, xColumn, input.file);
    if (x === null) {
      throw new SchemaError(
        `empty value in column '${xColumn}' of ${input.file}`,
      );
    }
    return { x, y: numericCell(row[yIdx]!, yColumn, input.file) };
  });
}

function pofSeries(inputs: NamedTable[]): Series[] {
  return inputs.map((input) => ({
    label: seriesLabel(input.file),
    points: sweepSeries(input, "alpha", "pof"),
  }));
}

function posSeries(inputs: NamedTable[]): Series[] {
  const out: Series[] = [];
  for (const input of inputs) {
    const gridIdx = columnIndex(input.table, "omega_grid");
    const grids = [...new Set(input.table.rows.map((row) => row[gridIdx]!))];
    grids.sort((a, b) => Number(a) - Number(b));
    for (const grid of grids) {
      const subset: NamedTable = {
        file: input.file,
        table: {
          header: input.table.header,
          rows: input.table.rows.filter((row) => row[gridIdx] === grid),
        },
      };
      out.push({
        label: `${seriesLabel(input.file)} grid=${grid}`,
        points: sweepSeries(subset, "alpha", "pos"),
      });
    }
  }
  return out;
}

function trajSeries(inputs: NamedTable[], yColumn: string): Series[] {
  return inputs.map((input) => {
    const seedIdx = columnIndex(input.table, "seed");
    const tIdx = columnIndex(input.table, "t");
    const yIdx = columnIndex(input.table, yColumn);
    const points: Point[] = [];
    const stds = new Map<number, number>();
    for (const row of input.table.rows) {
      const kind = row[seedIdx]!;
      if (kind !== "agg" && kind !== "agg_std") {
        continue;
      }
      const t = numericCell(row[tIdx]!, "t", input.file);
      const y = numericCell(row[yIdx]!, yColumn, input.file);
      if (t === null || y === null) {
        throw new SchemaError(
          `empty aggregate value in column '${yColumn}' of ${input.file}`,
        );
      }
      if (kind === "agg") {
        points.push({ x: t, y });
      } else {
        stds.set(t, y);
      }
    }
    points.sort((a, b) => a.x - b.x);
    const band: BandPoint[] = [];
    for (const p of points) {
      const std = stds.get(p.x);
      if (std !== undefined && p.y !== null) {
        band.push({ x: p.x, lo: p.y - std, hi: p.y + std });
      }
    }
    const series: Series = { label: seriesLabel(input.file), points };
    if (band.length === points.length && points.length > 0) {
      series.band = band;
    }
    return series;
  });
}

export function extractSeries(kind: Kind, inputs: NamedTable[]): Series[] {
  switch (kind) {
    case "pof-sweep":
      return pofSeries(inputs);
    case "pos-sweep":
      return posSeries(inputs);
    case "multistep-gap":
      return trajSeries(inputs, "gap");
    case "multistep-utility":
      return trajSeries(inputs, "cum_utility");
  }
}
