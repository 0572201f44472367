/** The render command.
 *
 *     render --kind KIND --in CSV[,CSV...] --out IMG
 *
 * Reads the listed CSV files, checks them against the kind's schema,
 * and writes one SVG.  Exit codes: 0 success, 2 bad usage or input
 * that fails validation, 1 unexpected failure.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { CsvError, parseCsv } from "./csv.js";
import { KINDS, Kind, SchemaError, checkSchema } from "./schema.js";
import { NamedTable, extractSeries } from "./series.js";
import { ChartSpec, renderChart } from "./svg.js";

const LABELS: Record<Kind, { title: string; x: string; y: string }> = {
  "pof-sweep": {
    title: "Price of fairness over the band width",
    x: "alpha (fraction of the score range)",
    y: "price of fairness",
  },
  "pos-sweep": {
    title: "Price of simplicity over the band width",
    x: "alpha (fraction of the score range)",
    y: "price of simplicity",
  },
  "multistep-gap": {
    title: "Group mean gap over time",
    x: "step",
    y: "mean score gap",
  },
  "multistep-utility": {
    title: "Cumulative utility over time",
    x: "step",
    y: "cumulative utility",
  },
};

function usage(): string {
  return `usage: render --kind ${KINDS.join("|")} --in CSV[,CSV...] --out IMG`;
}

export function main(argv: string[]): number {
  let values: { kind?: string; in?: string; out?: string };
  try {
    values = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
    }).values;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(usage());
    return 2;
  }
  const { kind, in: input, out } = values;
  if (!kind || !input || !out) {
    console.error(usage());
    return 2;
  }
  if (!(KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown kind '${kind}'; pick one of ${KINDS.join(", ")}`);
    return 2;
  }

  const files = input.split(",").filter((f) => f !== "");
  if (files.length === 0) {
    console.error("--in lists no files");
    return 2;
  }

  try {
    const tables: NamedTable[] = files.map((file) => {
      let text: string;
      try {
        text = readFileSync(file, "utf8");
      } catch {
        throw new SchemaError(`cannot read ${file}`);
      }
      let table;
      try {
        table = parseCsv(text);
      } catch (err) {
        if (err instanceof CsvError) {
          throw new SchemaError(`${file}: ${err.message}`);
        }
        throw err;
      }
      checkSchema(kind as Kind, table, file);
      return { file, table };
    });
    const spec: ChartSpec = {
      title: LABELS[kind as Kind].title,
      xLabel: LABELS[kind as Kind].x,
      yLabel: LABELS[kind as Kind].y,
      series: extractSeries(kind as Kind, tables),
    };
    writeFileSync(out, renderChart(spec));
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof CsvError) {
      console.error(err.message);
      return 2;
    }
    console.error(String(err instanceof Error ? (err.stack ?? err.message) : err));
    return 1;
  }
}
