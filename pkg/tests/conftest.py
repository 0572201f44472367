"""Shared instance builders for the test suite.

Random instances are drawn through explicit constructions (no
rejection loops for the structural properties), so every generated
instance is valid by construction and the draw count is deterministic.
"""

from __future__ import annotations

import numpy as np
import pytest

from fairsel.model import Economics, GroupDistribution, Instance, ScoreGrid, SuccessProb


def make_economics(rng: np.random.Generator, enforce_order: bool = True) -> Economics:
    """Random economics; with enforce_order the profit threshold is
    placed at or above the maintenance threshold by construction."""
    tau_u = rng.uniform(0.05, 0.95)
    tau_d = rng.uniform(0.02, tau_u) if enforce_order else rng.uniform(tau_u, 0.98)
    s_u = rng.uniform(0.5, 5.0)
    s_c = rng.uniform(0.5, 5.0)
    return Economics(
        u_plus=s_u * (1.0 - tau_u),
        u_minus=-s_u * tau_u,
        c_plus=s_c * (1.0 - tau_d),
        c_minus=-s_c * tau_d,
    )


def make_monotone_p(rng: np.random.Generator, x_max: int) -> SuccessProb:
    vals = np.sort(rng.uniform(0.0, 1.0, x_max + 1))
    if rng.random() < 0.5:
        vals[-1] = 1.0
    return SuccessProb.table(vals)


def make_pmf(rng: np.random.Generator, size: int, support: int | None = None) -> np.ndarray:
    w = rng.random(size) ** 3
    if support is not None and support < size:
        keep = rng.choice(size, size=support, replace=False)
        mask = np.zeros(size, dtype=bool)
        mask[keep] = True
        w[~mask] = 0.0
    if w.sum() <= 0:
        w[rng.integers(size)] = 1.0
    return w / w.sum()


def make_instance(
    rng: np.random.Generator,
    x_max: int | None = None,
    enforce_order: bool = True,
    support_a: int | None = None,
    support_b: int | None = None,
    advantaged: bool = True,
) -> Instance:
    """Random valid instance.  With advantaged (the model's group
    convention) the labels are swapped if needed so group a has the
    higher initial mean; the swap consumes no extra randomness."""
    if x_max is None:
        x_max = int(rng.integers(4, 31))
    grid = ScoreGrid(x_max)
    w_a = float(rng.uniform(0.2, 0.8))
    p = make_monotone_p(rng, x_max)
    econ = make_economics(rng, enforce_order)
    dist_a = GroupDistribution(make_pmf(rng, grid.size, support_a))
    dist_b = GroupDistribution(make_pmf(rng, grid.size, support_b))
    scores = np.arange(grid.size, dtype=np.float64)
    if advantaged and float(dist_a.pmf @ scores) < float(dist_b.pmf @ scores):
        dist_a, dist_b = dist_b, dist_a
        w_a = 1.0 - w_a
    return Instance(
        grid=grid,
        p=p,
        econ=econ,
        dist_a=dist_a,
        dist_b=dist_b,
        w_a=w_a,
        w_b=1.0 - w_a,
    )


def point_mass_instance() -> Instance:
    """Two point masses (group a at 75, group b at 40) on the 0..100 grid
    with the baseline economics; every quantity is hand-checkable."""
    grid = ScoreGrid(100)
    pmf_a = np.zeros(101)
    pmf_a[75] = 1.0
    pmf_b = np.zeros(101)
    pmf_b[40] = 1.0
    return Instance(
        grid=grid,
        p=SuccessProb.linear(grid),
        econ=Economics(2.0, -2.0, 2.0, -1.0),
        dist_a=GroupDistribution(pmf_a),
        dist_b=GroupDistribution(pmf_b),
        w_a=0.5,
        w_b=0.5,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)
