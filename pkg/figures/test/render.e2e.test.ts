/** End-to-end runs of the built executable against CSV files produced
 * by the solver CLI's presets (committed under test/fixtures; the
 * regeneration commands are in the package README).
 */
import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";

const DIST = fileURLToPath(new URL("../dist/render.js", import.meta.url));
const FIXTURES = fileURLToPath(new URL("fixtures", import.meta.url));
const TRAJ_FILES = [
  "traj-small-myopic.csv",
  "traj-small-investment.csv",
  "traj-small-threshold-fair.csv",
  "traj-small-zero-gap-lp.csv",
].map((f) => join(FIXTURES, f));

let outDir: string;

function render(args: string[]) {
  const result = spawnSync("node", [DIST, ...args], { encoding: "utf8" });
  return { status: result.status, stdout: result.stdout, stderr: result.stderr };
}

function seriesPaths(svg: string): string[] {
  return [...svg.matchAll(/<path d="([^"]*)" fill="none"/g)].map((m) => m[1]!);
}

beforeAll(() => {
  expect(
    existsSync(DIST),
    "dist/render.js missing; run `npm run build` first (npm test does)",
  ).toBe(true);
  outDir = mkdtempSync(join(tmpdir(), "figures-"));
});

describe("each kind renders its preset CSV", () => {
  it("pof-sweep, with gaps where the fair program is infeasible", () => {
    const out = join(outDir, "pof.svg");
    const run = render([
      "--kind", "pof-sweep",
      "--in", join(FIXTURES, "pof-fico.csv"),
      "--out", out,
    ]);
    expect(run.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.length).toBeGreaterThan(500);
    expect(svg.startsWith("<svg")).toBe(true);
    const paths = seriesPaths(svg);
    expect(paths).toHaveLength(1);
    // every low-alpha row is infeasible, so the curve must not start at
    // the left edge of the alpha axis: the gap is the missing prefix
    const firstX = Number(paths[0]!.match(/^M([\d.]+),/)![1]);
    expect(firstX).toBeGreaterThan(150);
  });

  it("an interior infeasible row splits the curve in two", () => {
    const csv = join(outDir, "interior-gap.csv");
    writeFileSync(
      csv,
      "alpha,opt_value,fair_value,pof,feasible\n" +
        "0.0,1.0,0.4,0.6,true\n" +
        "0.1,1.0,,,false\n" +
        "0.2,1.0,0.8,0.2,true\n" +
        "0.3,1.0,1.0,0.0,true\n",
    );
    const out = join(outDir, "interior-gap.svg");
    const run = render(["--kind", "pof-sweep", "--in", csv, "--out", out]);
    expect(run.status).toBe(0);
    const paths = seriesPaths(readFileSync(out, "utf8"));
    expect(paths[0]!.match(/M/g)).toHaveLength(2);
  });

  it("pof-sweep overlays several datasets", () => {
    const out = join(outDir, "pof-two.svg");
    const run = render([
      "--kind", "pof-sweep",
      "--in",
      [join(FIXTURES, "pof-synthetic-baseline.csv"), join(FIXTURES, "pof-fico.csv")].join(","),
      "--out", out,
    ]);
    expect(run.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain(">synthetic-baseline</text>");
    expect(svg).toContain(">fico</text>");
    expect(seriesPaths(svg)).toHaveLength(2);
  });

  it("pos-sweep splits the file by randomization grid", () => {
    const out = join(outDir, "pos.svg");
    const run = render([
      "--kind", "pos-sweep",
      "--in", join(FIXTURES, "pos-synthetic-cm1.csv"),
      "--out", out,
    ]);
    expect(run.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("synthetic-cm1 grid=1");
    expect(svg).toContain("synthetic-cm1 grid=10");
  });

  it("multistep-gap plots four labeled series with bands", () => {
    const out = join(outDir, "gap.svg");
    const run = render([
      "--kind", "multistep-gap",
      "--in", TRAJ_FILES.join(","),
      "--out", out,
    ]);
    expect(run.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    for (const label of ["myopic", "investment", "threshold-fair", "zero-gap-lp"]) {
      expect(svg).toContain(`>${label}</text>`);
    }
    expect(seriesPaths(svg).length).toBeGreaterThanOrEqual(3);
    expect(svg).toContain('fill-opacity="0.15"');
  });

  it("multistep-utility renders from the same trajectories", () => {
    const out = join(outDir, "utility.svg");
    const run = render([
      "--kind", "multistep-utility",
      "--in", TRAJ_FILES.join(","),
      "--out", out,
    ]);
    expect(run.status).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("Cumulative utility");
  });
});

describe("failure modes", () => {
  it("schema mismatch exits nonzero and names the offending column", () => {
    const run = render([
      "--kind", "pof-sweep",
      "--in", TRAJ_FILES[0]!,
      "--out", join(outDir, "never.svg"),
    ]);
    expect(run.status).toBe(2);
    expect(run.stderr).toContain("missing column 'alpha'");
    expect(run.stderr).toContain("traj-small-myopic.csv");
  });

  it("unknown kind and missing file both exit nonzero", () => {
    expect(render(["--kind", "pie", "--in", "x.csv", "--out", "y.svg"]).status).toBe(2);
    expect(
      render(["--kind", "pof-sweep", "--in", join(outDir, "absent.csv"), "--out", "y.svg"]).status,
    ).toBe(2);
  });

  it("a header-only file still renders axes and exits 0", () => {
    const empty = join(outDir, "empty.csv");
    writeFileSync(empty, "alpha,opt_value,fair_value,pof,feasible\n");
    const out = join(outDir, "empty.svg");
    const run = render(["--kind", "pof-sweep", "--in", empty, "--out", out]);
    expect(run.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(seriesPaths(svg)).toHaveLength(0);
  });
});

describe("determinism", () => {
  it("the same input renders to identical bytes", () => {
    const a = join(outDir, "det-a.svg");
    const b = join(outDir, "det-b.svg");
    const args = ["--kind", "pos-sweep", "--in", join(FIXTURES, "pos-synthetic-cm1.csv")];
    expect(render([...args, "--out", a]).status).toBe(0);
    expect(render([...args, "--out", b]).status).toBe(0);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });
});
