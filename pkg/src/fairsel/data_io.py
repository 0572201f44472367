"""Serialization and instance construction.

Instances travel as JSON documents; score distributions can also be
loaded from a three-column CSV (group,score,pmf).  Floats are written
with repr, so a save/load round trip reproduces every value bit for
bit.  The synthetic generators build the two instance families used
throughout: discretized-normal score distributions with a linear
success curve, and the same distributions with a geometrically
vanishing failure probability.
"""

from __future__ import annotations

import csv
import json
import math
from typing import Iterable, Mapping

import numpy as np

from .model import Economics, GroupDistribution, Instance, ScoreGrid, SuccessProb
from .simulate import Trajectory

PMF_SUM_TOL = 1e-6


def _fmt(value) -> str:
    """CSV cell formatting: repr floats, bare ints, true/false, empty None."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return repr(v)


def instance_to_dict(instance: Instance) -> dict:
    p: dict = {"kind": instance.p.kind}
    if instance.p.kind == "table":
        p["values"] = [float(v) for v in instance.p.values]
    return {
        "x_max": instance.grid.x_max,
        "w_a": instance.w_a,
        "w_b": instance.w_b,
        "u_plus": instance.econ.u_plus,
        "u_minus": instance.econ.u_minus,
        "c_plus": instance.econ.c_plus,
        "c_minus": instance.econ.c_minus,
        "p": p,
        "dist_a": [float(v) for v in instance.dist_a.pmf],
        "dist_b": [float(v) for v in instance.dist_b.pmf],
        "metadata": dict(instance.metadata),
    }


def instance_from_dict(doc: Mapping) -> Instance:
    required = ("x_max", "w_a", "w_b", "u_plus", "u_minus", "c_plus", "c_minus", "p", "dist_a", "dist_b")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ValueError(f"instance document is missing keys: {', '.join(missing)}")
    grid = ScoreGrid(int(doc["x_max"]))
    p_doc = doc["p"]
    if not isinstance(p_doc, Mapping) or "kind" not in p_doc:
        raise ValueError("field 'p' must be an object with a 'kind'")
    if p_doc["kind"] == "linear":
        p = SuccessProb.linear(grid)
    elif p_doc["kind"] == "table":
        values = np.asarray(p_doc.get("values", ()), dtype=np.float64)
        if values.size != grid.size:
            raise ValueError(f"p table has {values.size} entries, expected {grid.size}")
        p = SuccessProb.table(values)
    else:
        raise ValueError(f"unknown success-curve kind {p_doc['kind']!r}")
    dist_a = np.asarray(doc["dist_a"], dtype=np.float64)
    dist_b = np.asarray(doc["dist_b"], dtype=np.float64)
    if dist_a.size != grid.size or dist_b.size != grid.size:
        raise ValueError("distribution lengths must match the score grid")
    return Instance(
        grid=grid,
        p=p,
        econ=Economics(
            float(doc["u_plus"]), float(doc["u_minus"]), float(doc["c_plus"]), float(doc["c_minus"])
        ),
        dist_a=GroupDistribution(dist_a),
        dist_b=GroupDistribution(dist_b),
        w_a=float(doc["w_a"]),
        w_b=float(doc["w_b"]),
        metadata=dict(doc.get("metadata", {})),
    )


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("instance file must hold a JSON object")
    return instance_from_dict(doc)


def load_group_csv(path: str, x_max: int) -> tuple[GroupDistribution, GroupDistribution]:
    """Read per-group pmfs from a group,score,pmf table.

    Scores absent from the file carry zero mass.  Each group's mass must
    total 1 within 1e-6 and is renormalized exactly afterwards.  Errors
    point at the offending line number (the header is line 1).
    """
    grid = ScoreGrid(x_max)
    pmfs = {"a": np.zeros(grid.size), "b": np.zeros(grid.size)}
    seen: set[tuple[str, int]] = set()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        if [h.strip() for h in header] != ["group", "score", "pmf"]:
            raise ValueError(f"{path} line 1: header must be group,score,pmf")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ValueError(f"{path} line {lineno}: expected 3 fields, got {len(row)}")
            group = row[0].strip()
            if group not in pmfs:
                raise ValueError(f"{path} line {lineno}: group must be 'a' or 'b', got {group!r}")
            try:
                score = int(row[1])
            except ValueError:
                raise ValueError(f"{path} line {lineno}: score {row[1]!r} is not an integer") from None
            if not 0 <= score <= x_max:
                raise ValueError(f"{path} line {lineno}: score {score} outside 0..{x_max}")
            try:
                mass = float(row[2])
            except ValueError:
                raise ValueError(f"{path} line {lineno}: pmf {row[2]!r} is not a number") from None
            if not math.isfinite(mass) or mass < 0:
                raise ValueError(f"{path} line {lineno}: pmf must be finite and >= 0")
            if (group, score) in seen:
                raise ValueError(f"{path} line {lineno}: duplicate entry for group {group} score {score}")
            seen.add((group, score))
            pmfs[group][score] = mass
    for name, pmf in pmfs.items():
        total = pmf.sum()
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ValueError(f"{path}: group {name} mass sums to {total!r}, expected 1 within {PMF_SUM_TOL}")
        pmf /= total
    return GroupDistribution(pmfs["a"]), GroupDistribution(pmfs["b"])


def discretized_normal(mean: float, variance: float, x_max: int) -> np.ndarray:
    if variance <= 0:
        raise ValueError("variance must be positive")
    scores = np.arange(x_max + 1, dtype=np.float64)
    weights = np.exp(-((scores - mean) ** 2) / (2.0 * variance))
    return weights / weights.sum()


def synth_gaussian(
    mean_a: float = 80.0,
    mean_b: float = 60.0,
    variance: float = 30.0,
    x_max: int = 100,
    u_plus: float = 2.0,
    u_minus: float = -2.0,
    c_plus: float = 2.0,
    c_minus: float = -1.0,
    w_a: float = 0.7,
) -> Instance:
    """Discretized-normal score distributions with a linear success curve."""
    grid = ScoreGrid(x_max)
    return Instance(
        grid=grid,
        p=SuccessProb.linear(grid),
        econ=Economics(u_plus, u_minus, c_plus, c_minus),
        dist_a=GroupDistribution(discretized_normal(mean_a, variance, x_max)),
        dist_b=GroupDistribution(discretized_normal(mean_b, variance, x_max)),
        w_a=w_a,
        w_b=1.0 - w_a,
        metadata={"family": "gaussian", "mean_a": mean_a, "mean_b": mean_b, "variance": variance},
    )


def synth_geometric_failure(
    p_fail: float = 0.01,
    mean_a: float = 80.0,
    mean_b: float = 60.0,
    variance: float = 30.0,
    x_max: int = 100,
    u_plus: float = 1.0,
    u_minus: float = -1.0,
    c_plus: float = 2.0,
    c_minus: float = -1.0,
    w_a: float = 0.7,
) -> Instance:
    """Same score distributions, but failure probability decays by a
    factor of 3 every c_plus score points: 1 - p(x) = p_fail * 3^(-x/c_plus),
    pinned to p(x_max) = 1 exactly."""
    if not 0 < p_fail < 1:
        raise ValueError("p_fail must be in (0, 1)")
    if c_plus <= 0:
        raise ValueError("c_plus must be positive for the decay scale")
    grid = ScoreGrid(x_max)
    scores = np.arange(x_max + 1, dtype=np.float64)
    q = p_fail * np.power(3.0, -scores / c_plus)
    values = 1.0 - q
    values[-1] = 1.0
    return Instance(
        grid=grid,
        p=SuccessProb.table(values),
        econ=Economics(u_plus, u_minus, c_plus, c_minus),
        dist_a=GroupDistribution(discretized_normal(mean_a, variance, x_max)),
        dist_b=GroupDistribution(discretized_normal(mean_b, variance, x_max)),
        w_a=w_a,
        w_b=1.0 - w_a,
        metadata={
            "family": "geometric-failure",
            "p_fail": p_fail,
            "mean_a": mean_a,
            "mean_b": mean_b,
            "variance": variance,
        },
    )


def _write_rows(path: str, header: list[str], rows: Iterable[Iterable]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_pof_csv(path: str, reports) -> None:
    """alpha,opt_value,fair_value,pof,feasible; one row per alpha."""
    _write_rows(
        path,
        ["alpha", "opt_value", "fair_value", "pof", "feasible"],
        (
            [r.alpha, r.opt_value, r.fair_value if r.feasible else None, r.pof, r.feasible]
            for r in reports
        ),
    )


def write_pos_csv(path: str, reports) -> None:
    """alpha,omega_grid,lp_value,threshold_value,pos,feasible."""
    _write_rows(
        path,
        ["alpha", "omega_grid", "lp_value", "threshold_value", "pos", "feasible"],
        (
            [
                r.alpha,
                r.omega_grid_size,
                r.lp_value if r.feasible else None,
                r.threshold_value if r.feasible else None,
                r.pos,
                r.feasible,
            ]
            for r in reports
        ),
    )


TRAJ_HEADER = [
    "seed",
    "t",
    "mean_a",
    "mean_b",
    "gap",
    "step_utility",
    "cum_utility",
    "frac_xmax_a",
    "frac_xmax_b",
]

_TRAJ_FIELDS = TRAJ_HEADER[2:]


def write_traj_csv(path: str, trajectory: Trajectory) -> None:
    """Per-seed rows, then across-seed mean rows (seed=agg) and sample
    standard deviation rows (seed=agg_std)."""
    rows: list[list] = []
    for seed, metrics in zip(trajectory.seeds, trajectory.steps):
        for m in metrics:
            rows.append([seed, m.t] + [getattr(m, name) for name in _TRAJ_FIELDS])
    means = {name: trajectory.agg_mean(name) for name in _TRAJ_FIELDS}
    stds = {name: trajectory.agg_std(name) for name in _TRAJ_FIELDS}
    for t in range(trajectory.horizon):
        rows.append(["agg", t + 1] + [float(means[name][t]) for name in _TRAJ_FIELDS])
    for t in range(trajectory.horizon):
        rows.append(["agg_std", t + 1] + [float(stds[name][t]) for name in _TRAJ_FIELDS])
    _write_rows(path, TRAJ_HEADER, rows)
