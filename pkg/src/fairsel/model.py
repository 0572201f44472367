"""Core data model for two-group score-based selection.

Scores live on an integer grid 0..x_max.  Each of two groups (a is the
advantaged one by convention) carries a pmf over the grid and a population
weight.  A group-agnostic success curve p(x) maps scores to success
probability, and four economic constants turn success/failure into
institution utility (u_plus, u_minus) and into score movement for the
selected individual (c_plus, c_minus).

Everything downstream (policy values, post-selection means, category
splits, structural-condition reports) is a closed-form function of these
pieces, so this module is pure numpy with no solver dependencies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

# Tolerance for sign comparisons at category and threshold boundaries.
# Ties resolve to the >= side.
TIE_TOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.asarray(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


class Category(enum.Enum):
    """Score classes by the signs of expected utility and expected drift."""

    C1 = "profitable-improving"
    C2 = "profitable-degrading"
    C3 = "unprofitable-improving"
    C4 = "unprofitable-degrading"


@dataclass(frozen=True)
class ScoreGrid:
    """Integer score axis 0..x_max inclusive."""

    x_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.x_max, (int, np.integer)) or self.x_max < 1:
            raise ValueError(f"x_max must be an integer >= 1, got {self.x_max!r}")
        object.__setattr__(self, "x_max", int(self.x_max))

    @property
    def size(self) -> int:
        return self.x_max + 1

    @property
    def scores(self) -> np.ndarray:
        return np.arange(self.x_max + 1)


@dataclass(frozen=True)
class SuccessProb:
    """Success curve over the grid, linearly interpolated between points.

    kind is "linear" (p(x) = x / x_max, exact at every real x in range) or
    "table" (values given per grid point).  Values must be in [0, 1] and
    non-decreasing.
    """

    kind: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "table"):
            raise ValueError(f"unknown success-curve kind {self.kind!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("success curve needs one value per grid score")
        if np.any(vals < -TIE_TOL) or np.any(vals > 1 + TIE_TOL):
            raise ValueError("success probabilities must lie in [0, 1]")
        if np.any(np.diff(vals) < -TIE_TOL):
            raise ValueError("success curve must be non-decreasing over the grid")
        object.__setattr__(self, "values", _readonly(np.clip(vals, 0.0, 1.0)))

    @classmethod
    def linear(cls, grid: ScoreGrid) -> "SuccessProb":
        return cls("linear", grid.scores / grid.x_max)

    @classmethod
    def table(cls, values: np.ndarray) -> "SuccessProb":
        return cls("table", values)

    @property
    def x_max(self) -> int:
        return self.values.size - 1

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < -TIE_TOL) or np.any(x > self.x_max + TIE_TOL):
            raise ValueError(f"score outside [0, {self.x_max}]")
        out = np.interp(np.clip(x, 0.0, self.x_max), np.arange(self.values.size), self.values)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Economics:
    """Utility per selection outcome and score change per selection outcome.

    u_plus/c_plus apply on success, u_minus/c_minus on failure.  Downside
    values must be non-positive and each spread must be positive so the
    break-even success probabilities below are well defined.
    """

    u_plus: float
    u_minus: float
    c_plus: float
    c_minus: float

    def __post_init__(self) -> None:
        if self.u_plus < 0:
            raise ValueError("u_plus must be >= 0")
        if self.u_minus > 0:
            raise ValueError("u_minus must be <= 0")
        if self.c_plus < 0:
            raise ValueError("c_plus must be >= 0")
        if self.c_minus > 0:
            raise ValueError("c_minus must be <= 0")
        if self.u_plus - self.u_minus <= 0:
            raise ValueError("u_plus - u_minus must be positive")
        if self.c_plus - self.c_minus <= 0:
            raise ValueError("c_plus - c_minus must be positive")

    @property
    def profit_threshold(self) -> float:
        """Success probability at which expected utility crosses zero."""
        return -self.u_minus / (self.u_plus - self.u_minus)

    @property
    def maintain_threshold(self) -> float:
        """Success probability at which expected score change crosses zero."""
        return -self.c_minus / (self.c_plus - self.c_minus)


@dataclass(frozen=True)
class GroupDistribution:
    """Probability mass function over the score grid for one group."""

    pmf: np.ndarray

    def __post_init__(self) -> None:
        pmf = np.asarray(self.pmf, dtype=np.float64)
        if pmf.ndim != 1 or pmf.size < 2:
            raise ValueError("pmf needs one entry per grid score")
        if np.any(pmf < -1e-15):
            raise ValueError("pmf entries must be >= 0")
        total = float(pmf.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total!r}, expected 1 within 1e-9")
        object.__setattr__(self, "pmf", _readonly(np.maximum(pmf, 0.0)))

    @property
    def mean(self) -> float:
        return float(np.arange(self.pmf.size) @ self.pmf)


@dataclass(frozen=True, eq=False)
class Instance:
    """One complete selection problem: grid, success curve, economics,
    the two group distributions, and group weights."""

    grid: ScoreGrid
    p: SuccessProb
    econ: Economics
    dist_a: GroupDistribution
    dist_b: GroupDistribution
    w_a: float
    w_b: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.grid.size
        if self.p.values.size != n:
            raise ValueError("success curve length does not match the grid")
        if self.dist_a.pmf.size != n or self.dist_b.pmf.size != n:
            raise ValueError("group pmf length does not match the grid")
        if self.w_a < 0 or self.w_b < 0:
            raise ValueError("group weights must be >= 0")
        if abs(self.w_a + self.w_b - 1.0) > 1e-12:
            raise ValueError("group weights must sum to 1 within 1e-12")

    @property
    def mu_a(self) -> float:
        return self.dist_a.mean

    @property
    def mu_b(self) -> float:
        return self.dist_b.mean

    def eu_grid(self) -> np.ndarray:
        """Expected utility at every grid score."""
        p = self.p.values
        return p * self.econ.u_plus + (1.0 - p) * self.econ.u_minus

    def ed_grid(self) -> np.ndarray:
        """Expected score change at every grid score."""
        p = self.p.values
        return p * self.econ.c_plus + (1.0 - p) * self.econ.c_minus


@dataclass(frozen=True)
class Policy:
    """Per-group selection probabilities over the grid."""

    pi_a: np.ndarray
    pi_b: np.ndarray

    def __post_init__(self) -> None:
        for name in ("pi_a", "pi_b"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            if np.any(arr < -1e-9) or np.any(arr > 1 + 1e-9):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            object.__setattr__(self, name, _readonly(np.clip(arr, 0.0, 1.0)))
        if self.pi_a.size != self.pi_b.size:
            raise ValueError("per-group policies must cover the same grid")

    @classmethod
    def constant(cls, grid: ScoreGrid, value_a: float, value_b: float) -> "Policy":
        n = grid.size
        return cls(np.full(n, value_a), np.full(n, value_b))


@dataclass(frozen=True)
class ThresholdPolicy:
    """Per-group cutoff policy: select above the cutoff, randomize with
    probability omega exactly at it, reject below.

    A cutoff of x_max + 1 selects nobody in that group.
    """

    cutoff_a: int
    omega_a: float
    cutoff_b: int
    omega_b: float

    def __post_init__(self) -> None:
        for name in ("omega_a", "omega_b"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("cutoff_a", "cutoff_b"):
            c = getattr(self, name)
            if not isinstance(c, (int, np.integer)) or c < 0:
                raise ValueError(f"{name} must be a non-negative integer")
            object.__setattr__(self, name, int(c))

    def expand(self, grid: ScoreGrid) -> Policy:
        def one(cutoff: int, omega: float) -> np.ndarray:
            if cutoff > grid.x_max + 1:
                raise ValueError("cutoff beyond x_max + 1")
            pi = (grid.scores > cutoff).astype(np.float64)
            if cutoff <= grid.x_max:
                pi[cutoff] = omega
            return pi

        return Policy(one(self.cutoff_a, self.omega_a), one(self.cutoff_b, self.omega_b))


def expected_utility(x: float | np.ndarray, instance: Instance) -> float | np.ndarray:
    """Expected institution utility from selecting one individual at score x."""
    p = instance.p(x)
    return p * instance.econ.u_plus + (1.0 - p) * instance.econ.u_minus


def expected_delta(x: float | np.ndarray, instance: Instance) -> float | np.ndarray:
    """Expected score change for a selected individual at score x."""
    p = instance.p(x)
    return p * instance.econ.c_plus + (1.0 - p) * instance.econ.c_minus


def categorize(x: float, instance: Instance) -> Category:
    """Classify one score by the signs of expected utility and drift."""
    eu = expected_utility(x, instance)
    ed = expected_delta(x, instance)
    u_ok = eu >= -TIE_TOL
    d_ok = ed >= -TIE_TOL
    if u_ok and d_ok:
        return Category.C1
    if u_ok:
        return Category.C2
    if d_ok:
        return Category.C3
    return Category.C4


def category_masks(instance: Instance) -> dict[Category, np.ndarray]:
    """Boolean grid masks for all four categories, consistent with categorize."""
    eu = instance.eu_grid()
    ed = instance.ed_grid()
    u_ok = eu >= -TIE_TOL
    d_ok = ed >= -TIE_TOL
    return {
        Category.C1: u_ok & d_ok,
        Category.C2: u_ok & ~d_ok,
        Category.C3: ~u_ok & d_ok,
        Category.C4: ~u_ok & ~d_ok,
    }


def policy_value(policy: Policy, instance: Instance) -> float:
    """Population-weighted expected one-step utility of a policy."""
    eu = instance.eu_grid()
    va = instance.w_a * float((policy.pi_a * instance.dist_a.pmf) @ eu)
    vb = instance.w_b * float((policy.pi_b * instance.dist_b.pmf) @ eu)
    return va + vb


def post_means(policy: Policy, instance: Instance) -> tuple[float, float, float]:
    """Post-selection group means and their absolute gap.

    Means shift by the pmf-weighted expected score change of the selected
    mass; the unselected mass stays put.
    """
    ed = instance.ed_grid()
    mu_a = instance.mu_a + float((policy.pi_a * instance.dist_a.pmf) @ ed)
    mu_b = instance.mu_b + float((policy.pi_b * instance.dist_b.pmf) @ ed)
    return mu_a, mu_b, abs(mu_a - mu_b)


def is_alpha_fair(policy: Policy, instance: Instance, alpha: float) -> bool:
    """Whether the post-selection mean gap stays within alpha."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    _, _, gap = post_means(policy, instance)
    return gap <= alpha + TIE_TOL


@dataclass(frozen=True)
class CategoryStats:
    """Mass-weighted score total, mass, and conditional mean score of one
    group restricted to one category."""

    gamma: float
    mass: float
    mean: float
    zero_mass: bool


@dataclass(frozen=True)
class AssumptionsReport:
    """Verdicts for the structural conditions the model's guarantees rest on.

    a1: success curve monotone over the grid.
    a2: profitability break-even sits at or above the maintenance
        break-even, which rules out profitable-but-degrading scores.
    a4 realized advantage (beta): difference of the groups' pmf-weighted
        score totals over the improving categories (C1 and C3).
    a5: worst failure probability over C1 and C3 is small relative to
        beta / (stability_n * x_max).
    a6: failure probability shrinks at least geometrically (factor 3) per
        c_plus of score, and the top score never fails.
    a7: expected score change is a positive integer at every grid score.
    """

    a1_monotone_p: bool
    a2_threshold_order: bool
    stats: dict[str, dict[str, CategoryStats]]
    beta: float
    p_fail: float
    stability_n: float
    a5_holds: bool
    a6_geometric_decay: bool
    a6_pmax_one: bool
    a7_integer_drift: bool

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "a1_monotone_p": self.a1_monotone_p,
            "a2_threshold_order": self.a2_threshold_order,
            "beta": self.beta,
            "p_fail": self.p_fail,
            "stability_n": self.stability_n,
            "a5_holds": self.a5_holds,
            "a6_geometric_decay": self.a6_geometric_decay,
            "a6_pmax_one": self.a6_pmax_one,
            "a7_integer_drift": self.a7_integer_drift,
            "stats": {},
        }
        for group, per_cat in self.stats.items():
            out["stats"][group] = {
                cat: {
                    "gamma": s.gamma,
                    "mass": s.mass,
                    "mean": s.mean,
                    "zero_mass": s.zero_mass,
                }
                for cat, s in per_cat.items()
            }
        return out


def assumptions_report(
    instance: Instance,
    beta_hint: float | None = None,
    stability_n: float = 1.0,
) -> AssumptionsReport:
    """Evaluate the structural conditions on one instance.

    beta_hint, when given, replaces the realized advantage in the a5
    check (useful when the caller targets a specific advantage level).
    """
    p = instance.p.values
    econ = instance.econ
    grid = instance.grid
    scores = grid.scores.astype(np.float64)

    a1 = bool(np.all(np.diff(p) >= -TIE_TOL))
    a2 = econ.profit_threshold >= econ.maintain_threshold - TIE_TOL

    masks = category_masks(instance)
    stats: dict[str, dict[str, CategoryStats]] = {}
    for gname, dist in (("a", instance.dist_a), ("b", instance.dist_b)):
        per_cat: dict[str, CategoryStats] = {}
        for cat, mask in masks.items():
            mass = float(dist.pmf[mask].sum())
            gamma = float((scores[mask] * dist.pmf[mask]).sum())
            zero = mass <= 0.0
            per_cat[cat.name] = CategoryStats(
                gamma=gamma,
                mass=mass,
                mean=0.0 if zero else gamma / mass,
                zero_mass=zero,
            )
        stats[gname] = per_cat

    c13 = masks[Category.C1] | masks[Category.C3]
    beta = float(
        (scores[c13] * instance.dist_a.pmf[c13]).sum()
        - (scores[c13] * instance.dist_b.pmf[c13]).sum()
    )
    p_fail = float((1.0 - p[c13]).max()) if np.any(c13) else 0.0

    if stability_n <= 0:
        raise ValueError("stability_n must be positive")
    beta_used = beta if beta_hint is None else float(beta_hint)
    a5 = p_fail <= beta_used / (stability_n * grid.x_max) + TIE_TOL

    q = 1.0 - p
    a6_decay = True
    step = econ.c_plus
    if step > 0:
        xs = scores[scores + step <= grid.x_max + TIE_TOL]
        if xs.size:
            q_up = 1.0 - instance.p(np.minimum(xs + step, grid.x_max))
            a6_decay = bool(np.all(q_up <= q[: xs.size] / 3.0 + TIE_TOL))
    a6_top = bool(abs(p[-1] - 1.0) <= TIE_TOL)

    ed = instance.ed_grid()
    a7 = bool(np.all(np.abs(ed - np.round(ed)) <= 1e-9) and np.all(ed >= 1.0 - 1e-9))

    return AssumptionsReport(
        a1_monotone_p=a1,
        a2_threshold_order=bool(a2),
        stats=stats,
        beta=beta,
        p_fail=p_fail,
        stability_n=float(stability_n),
        a5_holds=bool(a5),
        a6_geometric_decay=a6_decay,
        a6_pmax_one=a6_top,
        a7_integer_drift=a7,
    )
