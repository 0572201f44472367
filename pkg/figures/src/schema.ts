/** The four figure kinds and the CSV schema each one consumes. */

import { Table } from "./csv.js";

export type Kind =
  | "pof-sweep"
  | "pos-sweep"
  | "multistep-gap"
  | "multistep-utility";

export const KINDS: readonly Kind[] = [
  "pof-sweep",
  "pos-sweep",
  "multistep-gap",
  "multistep-utility",
];

const POF_COLUMNS = ["alpha", "opt_value", "fair_value", "pof", "feasible"];
const POS_COLUMNS = [
  "alpha",
  "omega_grid",
  "lp_value",
  "threshold_value",
  "pos",
  "feasible",
];
const TRAJ_COLUMNS = [
  "seed",
  "t",
  "mean_a",
  "mean_b",
  "gap",
  "step_utility",
  "cum_utility",
  "frac_xmax_a",
  "frac_xmax_b",
];

export const SCHEMAS: Record<Kind, readonly string[]> = {
  "pof-sweep": POF_COLUMNS,
  "pos-sweep": POS_COLUMNS,
  "multistep-gap": TRAJ_COLUMNS,
  "multistep-utility": TRAJ_COLUMNS,
};

/** Raised when a file does not carry the columns its kind requires. */
export class SchemaError extends Error {}

export function checkSchema(kind: Kind, table: Table, file: string): void {
  for (const column of SCHEMAS[kind]) {
    if (!table.header.includes(column)) {
      throw new SchemaError(
        `missing column '${column}' in ${file} (kind ${kind})`,
      );
    }
  }
}

/** Parse one numeric cell, blaming the column when it is not a number.
 * Empty cells mean "undefined here" and come back as null. */
export function numericCell(
  cell: string,
  column: string,
  file: string,
): number | null {
  if (cell === "") {
    return null;
  }
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new SchemaError(
      `non-numeric value '${cell}' in column '${column}' of ${file}`,
    );
  }
  return value;
}
