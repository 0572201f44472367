"""Canned experiment configurations.

Each preset pins an instance family, a sweep grid, and output file
names, so a single command reproduces a whole figure's worth of CSV.
All presets are deterministic: rerunning one writes byte-identical
files.
"""

from __future__ import annotations

import os
from dataclasses import replace
from importlib import resources

import numpy as np

from .data_io import (
    load_group_csv,
    synth_gaussian,
    write_pof_csv,
    write_pos_csv,
    write_traj_csv,
)
from .model import Economics, Instance, ScoreGrid, SuccessProb
from .simulate import SimConfig, run
from .single_step import price_of_fairness, price_of_simplicity

ALPHA_STEP = 0.02
DEFAULT_SEEDS = (1, 2, 3, 4, 5)

# The fig2 series labeled "investment" runs the unconditional
# improving-score selection: with a linear success curve failures are
# common at every score, so gating on a clean history would freeze most
# agents at their first failure and the gap would never close.
FIG2_POLICIES = (
    ("myopic", "myopic"),
    ("investment", "simple-investment"),
    ("threshold-fair", "threshold-fair"),
    ("zero-gap-lp", "zero-gap-lp"),
)


def alpha_grid(lo: float = 0.0, hi: float = 1.0, step: float = ALPHA_STEP) -> np.ndarray:
    if step <= 0:
        raise ValueError("alpha grid step must be positive")
    n = int(round((hi - lo) / step))
    if abs(lo + n * step - hi) > 1e-9:
        n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12)


def synthetic_baseline() -> Instance:
    return synth_gaussian()


def synthetic_highrisk() -> Instance:
    return synth_gaussian(u_plus=2.0, u_minus=-20.0, c_plus=2.0, c_minus=-10.0)


def fico_example(c_minus: float = -14.0) -> Instance:
    """Bundled two-group credit-score-shaped distributions with the
    high-spread economics."""
    source = resources.files("fairsel").joinpath("data/fico_example.csv")
    with resources.as_file(source) as path:
        dist_a, dist_b = load_group_csv(str(path), 100)
    grid = ScoreGrid(100)
    return Instance(
        grid=grid,
        p=SuccessProb.linear(grid),
        econ=Economics(1.0, -2.0, 7.0, c_minus),
        dist_a=dist_a,
        dist_b=dist_b,
        w_a=0.7,
        w_b=0.3,
        metadata={"family": "fico-example", "c_minus": c_minus},
    )


def fig2_instance() -> Instance:
    return synth_gaussian(mean_a=90.0, mean_b=70.0)


def _sweep_pof(instance: Instance, out_path: str) -> None:
    x_max = instance.grid.x_max
    reports = []
    for frac in alpha_grid():
        r = price_of_fairness(instance, float(frac) * x_max, method="lp")
        reports.append(replace(r, alpha=float(frac)))
    write_pof_csv(out_path, reports)


def _sweep_pos(instance: Instance, out_path: str, omega_sizes: tuple[int, ...] = (1, 10)) -> None:
    x_max = instance.grid.x_max
    reports = []
    for omega in omega_sizes:
        for frac in alpha_grid():
            r = price_of_simplicity(instance, float(frac) * x_max, omega_grid_size=omega)
            reports.append(replace(r, alpha=float(frac)))
    write_pos_csv(out_path, reports)


def _run_multistep(
    out_dir: str,
    instance: Instance,
    n_agents: int,
    horizon: int,
    seeds: tuple[int, ...],
    prefix: str = "traj",
) -> list[str]:
    written = []
    for label, kind in FIG2_POLICIES:
        config = SimConfig(
            n_agents=n_agents,
            horizon=horizon,
            seeds=seeds,
            policy=kind,
            alpha=0.01,
            alpha_is_absolute=False,
            opportunities=1,
        )
        path = os.path.join(out_dir, f"{prefix}-{label}.csv")
        write_traj_csv(path, run(config, instance))
        written.append(path)
    return written


def preset_names() -> tuple[str, ...]:
    return (
        "fig1-synthetic-baseline",
        "fig1-synthetic-highrisk",
        "fig1-fico",
        "fig2-multistep",
        "fig3-pos",
        "fig4-smallpop",
    )


def run_preset(
    name: str,
    out_dir: str,
    n_agents: int | None = None,
    horizon: int | None = None,
    seeds: tuple[int, ...] | None = None,
) -> list[str]:
    """Execute one preset, writing its CSV files under out_dir.

    The scale knobs only apply to the multi-step presets; fig2 defaults
    to the desk scale (100,000 agents, 100 steps, 5 seeds) and accepts
    the full-scale population (1,000,000) through n_agents.
    """
    os.makedirs(out_dir, exist_ok=True)
    if name == "fig1-synthetic-baseline":
        path = os.path.join(out_dir, "pof-synthetic-baseline.csv")
        _sweep_pof(synthetic_baseline(), path)
        return [path]
    if name == "fig1-synthetic-highrisk":
        path = os.path.join(out_dir, "pof-synthetic-highrisk.csv")
        _sweep_pof(synthetic_highrisk(), path)
        return [path]
    if name == "fig1-fico":
        path = os.path.join(out_dir, "pof-fico.csv")
        _sweep_pof(fico_example(), path)
        return [path]
    if name == "fig2-multistep":
        return _run_multistep(
            out_dir,
            fig2_instance(),
            n_agents or 100_000,
            horizon or 100,
            seeds or DEFAULT_SEEDS,
        )
    if name == "fig3-pos":
        written = []
        for mult in (1, 2, 4, 8):
            inst = synth_gaussian(c_minus=-1.0 * mult)
            path = os.path.join(out_dir, f"pos-synthetic-cm{mult}.csv")
            _sweep_pos(inst, path)
            written.append(path)
        for mult in (1, 2, 4):
            inst = fico_example(c_minus=-14.0 * mult)
            path = os.path.join(out_dir, f"pos-fico-cm{14 * mult}.csv")
            _sweep_pos(inst, path)
            written.append(path)
        return written
    if name == "fig4-smallpop":
        return _run_multistep(
            out_dir,
            fig2_instance(),
            n_agents or 10_000,
            horizon or 50,
            seeds or DEFAULT_SEEDS,
            prefix="traj-small",
        )
    raise ValueError(f"unknown preset {name!r}; pick one of {', '.join(preset_names())}")


def a2_satisfying_pos_presets() -> list[tuple[str, Instance]]:
    """The fig3 variants whose economics keep the profit threshold at or
    above the maintenance threshold."""
    out = []
    for mult in (1, 2, 4, 8):
        inst = synth_gaussian(c_minus=-1.0 * mult)
        if inst.econ.profit_threshold >= inst.econ.maintain_threshold:
            out.append((f"synthetic-cm{mult}", inst))
    for mult in (1, 2, 4):
        inst = fico_example(c_minus=-14.0 * mult)
        if inst.econ.profit_threshold >= inst.econ.maintain_threshold:
            out.append((f"fico-cm{14 * mult}", inst))
    return out
