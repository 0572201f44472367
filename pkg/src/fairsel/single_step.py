"""One-step policy optimization and price-of-fairness measurement.

The unconstrained optimum is a group-agnostic score cutoff.  Under a
fairness band on the post-selection mean gap, the optimum is found two
ways: an exact linear program over per-score selection probabilities,
and an exhaustive search over per-group cutoff policies with the
randomization weight omega on a uniform grid.  The gap between those two
answers is the price of simplicity; the gap between fair and
unconstrained values is the price of fairness.

Also here: two adversarial instance constructions that drive the price
of fairness toward 1, a mask builder that pins degrading scores to zero,
and a checker for sufficient conditions under which the price of
fairness stays bounded away from 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .model import (
    TIE_TOL,
    Category,
    Economics,
    GroupDistribution,
    Instance,
    Policy,
    ScoreGrid,
    SuccessProb,
    ThresholdPolicy,
    category_masks,
    is_alpha_fair,
    policy_value,
    post_means,
)

GAP_TOL = 1e-9


@dataclass(frozen=True)
class OptimalSolution:
    thresholds: ThresholdPolicy
    policy: Policy
    value: float


@dataclass(frozen=True)
class FairSolution:
    feasible: bool
    method: str  # "lp" | "threshold"
    value: float | None
    policy: Policy | None
    mu_a_prime: float | None
    mu_b_prime: float | None
    gap: float | None
    thresholds: ThresholdPolicy | None = None


@dataclass(frozen=True)
class PofReport:
    alpha: float
    opt_value: float
    fair_value: float | None
    pof: float | None
    feasible: bool


@dataclass(frozen=True)
class PosReport:
    alpha: float
    omega_grid_size: int
    lp_value: float | None
    threshold_value: float | None
    pos: float | None
    feasible: bool


def _infeasible(method: str) -> FairSolution:
    return FairSolution(
        feasible=False,
        method=method,
        value=None,
        policy=None,
        mu_a_prime=None,
        mu_b_prime=None,
        gap=None,
    )


def optimal_policy(instance: Instance) -> OptimalSolution:
    """Unconstrained optimum: select every score whose expected utility is
    non-negative, which under a monotone success curve is the suffix at or
    above the profitability break-even."""
    tau = instance.econ.profit_threshold
    hits = np.nonzero(instance.p.values >= tau - TIE_TOL)[0]
    cutoff = int(hits[0]) if hits.size else instance.grid.x_max + 1
    thresholds = ThresholdPolicy(cutoff, 1.0, cutoff, 1.0)
    policy = thresholds.expand(instance.grid)
    return OptimalSolution(thresholds, policy, policy_value(policy, instance))


def restrict_non_degrading(instance: Instance) -> np.ndarray:
    """Boolean grid mask of scores where selection degrades in expectation
    and loses money (True means the score must not be selected)."""
    return category_masks(instance)[Category.C4].copy()


def fair_opt_lp(instance: Instance, alpha: float, mask: np.ndarray | None = None) -> FairSolution:
    """Best fair policy by linear programming.

    Maximizes the one-step value over per-score selection probabilities,
    subject to the post-selection mean gap staying within alpha, a
    non-negative total value, and optionally a mask pinning scores to
    zero selection.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    n = instance.grid.size
    keep = np.ones(n, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    if mask is not None and np.asarray(mask).shape != (n,):
        raise ValueError("mask must cover the grid")

    eu = instance.eu_grid()
    ed = instance.ed_grid()
    delta0 = instance.mu_a - instance.mu_b

    if not keep.any():
        # Masked everywhere: the only admissible policy selects nobody.
        if abs(delta0) > alpha + lp.FEAS_TOL:
            return _infeasible("lp")
        policy = Policy(np.zeros(n), np.zeros(n))
        mu_a, mu_b, gap = post_means(policy, instance)
        return FairSolution(
            feasible=True,
            method="lp",
            value=0.0,
            policy=policy,
            mu_a_prime=mu_a,
            mu_b_prime=mu_b,
            gap=gap,
        )

    obj_a = (instance.w_a * instance.dist_a.pmf * eu)[keep]
    obj_b = (instance.w_b * instance.dist_b.pmf * eu)[keep]
    drift_a = (instance.dist_a.pmf * ed)[keep]
    drift_b = (instance.dist_b.pmf * ed)[keep]

    c = np.concatenate([obj_a, obj_b])
    gap_row = np.concatenate([drift_a, -drift_b])
    G = np.vstack([gap_row, -gap_row, -c])
    h = np.array([alpha - delta0, alpha + delta0, 0.0])

    sol = lp.solve(lp.LpProblem(c, G, h))
    if sol.status != "optimal":
        return _infeasible("lp")

    m = int(keep.sum())
    pi_a = np.zeros(n)
    pi_b = np.zeros(n)
    pi_a[keep] = sol.x[:m]
    pi_b[keep] = sol.x[m:]
    policy = Policy(pi_a, pi_b)
    mu_a, mu_b, gap = post_means(policy, instance)
    return FairSolution(
        feasible=True,
        method="lp",
        value=float(sol.objective),
        policy=policy,
        mu_a_prime=mu_a,
        mu_b_prime=mu_b,
        gap=gap,
    )


def _omega_grid(size: int) -> np.ndarray:
    """size evenly spaced randomization weights 1/size .. 1.  Weight 0 is
    redundant: a cutoff with weight 0 is the next higher cutoff with
    weight 1, so this grid spans the whole family at every size."""
    if size < 1:
        raise ValueError("omega grid size must be >= 1")
    return np.arange(1, size + 1, dtype=np.float64) / size


def _threshold_candidates(
    instance: Instance, dist: GroupDistribution, weight: float, keep: np.ndarray, omegas: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Value and mean-shift of every (cutoff, omega) candidate for one group,
    in O(1) each via suffix sums.  The final candidate selects nobody."""
    pt_u = dist.pmf * instance.eu_grid()
    pt_d = dist.pmf * instance.ed_grid()
    pt_u[~keep] = 0.0
    pt_d[~keep] = 0.0

    tail_u = np.append(np.cumsum(pt_u[::-1])[::-1], 0.0)
    tail_d = np.append(np.cumsum(pt_d[::-1])[::-1], 0.0)

    n = instance.grid.size
    above_u = tail_u[1:][:, None]  # strictly above each cutoff
    above_d = tail_d[1:][:, None]
    vals = weight * (above_u + omegas[None, :] * pt_u[:, None])
    drifts = above_d + omegas[None, :] * pt_d[:, None]

    cutoffs = np.repeat(np.arange(n), omegas.size)
    omega_col = np.tile(omegas, n)
    values = np.append(vals.ravel(), 0.0)
    drift = np.append(drifts.ravel(), 0.0)
    cutoffs = np.append(cutoffs, n)  # cutoff x_max + 1: empty selection
    omega_col = np.append(omega_col, 0.0)
    return values, drift, cutoffs, omega_col


def _rmq_build(values: np.ndarray) -> np.ndarray:
    """Sparse table of argmax indices over power-of-two windows."""
    n = values.size
    levels = max(1, int(n).bit_length())
    table = np.zeros((levels, n), dtype=np.int64)
    table[0] = np.arange(n)
    j = 1
    while (1 << j) <= n:
        half = 1 << (j - 1)
        width = n - (1 << j) + 1
        left = table[j - 1, :width]
        right = table[j - 1, half : half + width]
        table[j, :width] = np.where(values[left] >= values[right], left, right)
        j += 1
    return table


def _rmq_query(values: np.ndarray, table: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Vectorized argmax over half-open windows [lo, hi); -1 where empty."""
    out = np.full(lo.shape, -1, dtype=np.int64)
    nonempty = hi > lo
    if not np.any(nonempty):
        return out
    length = (hi - lo)[nonempty]
    j = (np.frexp(length.astype(np.float64))[1] - 1).astype(np.int64)
    a = table[j, lo[nonempty]]
    b = table[j, hi[nonempty] - (1 << j)]
    out[nonempty] = np.where(values[a] >= values[b], a, b)
    return out


def fair_opt_threshold(
    instance: Instance,
    alpha: float,
    omega_grid_size: int = 101,
    mask: np.ndarray | None = None,
) -> FairSolution:
    """Best fair per-group cutoff policy, omega on a uniform grid.

    Exhausts (cutoff_a, omega_a) x (cutoff_b, omega_b); the cross-group
    pairing runs through a sorted range-max structure over the second
    group's post-selection means, so the search is near-linear in the
    candidate count rather than quadratic.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    n = instance.grid.size
    keep = np.ones(n, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    omegas = _omega_grid(omega_grid_size)

    val_a, drift_a, cut_a, om_a = _threshold_candidates(
        instance, instance.dist_a, instance.w_a, keep, omegas
    )
    val_b, drift_b, cut_b, om_b = _threshold_candidates(
        instance, instance.dist_b, instance.w_b, keep, omegas
    )
    mu_a = instance.mu_a + drift_a
    mu_b = instance.mu_b + drift_b

    order = np.argsort(mu_b, kind="stable")
    mu_b_sorted = mu_b[order]
    val_b_sorted = val_b[order]
    table = _rmq_build(val_b_sorted)

    lo = np.searchsorted(mu_b_sorted, mu_a - alpha - GAP_TOL, side="left")
    hi = np.searchsorted(mu_b_sorted, mu_a + alpha + GAP_TOL, side="right")
    partner = _rmq_query(val_b_sorted, table, lo, hi)

    valid = partner >= 0
    if not np.any(valid):
        return _infeasible("threshold")
    totals = val_a + np.where(valid, val_b_sorted[np.maximum(partner, 0)], -np.inf)
    best_a = int(np.argmax(totals))
    best_total = float(totals[best_a])
    if best_total < -GAP_TOL:
        return _infeasible("threshold")
    best_b = int(order[partner[best_a]])

    thresholds = ThresholdPolicy(
        int(cut_a[best_a]), float(om_a[best_a]), int(cut_b[best_b]), float(om_b[best_b])
    )
    policy = thresholds.expand(instance.grid)
    if mask is not None:
        pi_a = policy.pi_a.copy()
        pi_b = policy.pi_b.copy()
        pi_a[~keep] = 0.0
        pi_b[~keep] = 0.0
        policy = Policy(pi_a, pi_b)
    mu_a_fin, mu_b_fin, gap = post_means(policy, instance)
    return FairSolution(
        feasible=True,
        method="threshold",
        value=best_total,
        policy=policy,
        mu_a_prime=mu_a_fin,
        mu_b_prime=mu_b_fin,
        gap=gap,
        thresholds=thresholds,
    )


def price_of_fairness(
    instance: Instance,
    alpha: float,
    method: str = "lp",
    omega_grid_size: int = 101,
    non_degrading: bool = False,
) -> PofReport:
    """Relative value lost to the fairness band.

    Undefined (None) when the fair problem is infeasible or the
    unconstrained optimum is not positive; clamped into [0, 1] otherwise.
    """
    if method not in ("lp", "threshold"):
        raise ValueError(f"unknown method {method!r}")
    opt = optimal_policy(instance)
    # The unconstrained optimum never selects unprofitable scores, so it
    # respects the non-degrading mask; if it already sits inside the
    # fairness band it is the fair optimum and the price is exactly zero.
    if is_alpha_fair(opt.policy, instance, alpha):
        pof = 0.0 if opt.value > 0.0 else None
        return PofReport(alpha, opt.value, opt.value, pof, True)
    mask = restrict_non_degrading(instance) if non_degrading else None
    if method == "lp":
        fair = fair_opt_lp(instance, alpha, mask=mask)
    else:
        fair = fair_opt_threshold(instance, alpha, omega_grid_size, mask=mask)

    if not fair.feasible:
        return PofReport(alpha, opt.value, None, None, False)
    if opt.value <= 0.0:
        return PofReport(alpha, opt.value, fair.value, None, True)
    pof = min(1.0, max(0.0, 1.0 - fair.value / opt.value))
    return PofReport(alpha, opt.value, fair.value, pof, True)


def price_of_simplicity(
    instance: Instance,
    alpha: float,
    omega_grid_size: int = 101,
    non_degrading: bool = False,
) -> PosReport:
    """Relative value the cutoff family loses against the exact program.

    Undefined (None) when either side is infeasible or the program's
    value is not positive.
    """
    opt = optimal_policy(instance)
    # The optimum is itself a cutoff policy, so when it sits inside the
    # fairness band both methods attain it and the price is exactly zero.
    if is_alpha_fair(opt.policy, instance, alpha):
        pos = 0.0 if opt.value > 1e-15 else None
        return PosReport(alpha, omega_grid_size, opt.value, opt.value, pos, True)
    mask = restrict_non_degrading(instance) if non_degrading else None
    best_lp = fair_opt_lp(instance, alpha, mask=mask)
    best_thr = fair_opt_threshold(instance, alpha, omega_grid_size, mask=mask)
    if not (best_lp.feasible and best_thr.feasible):
        return PosReport(
            alpha,
            omega_grid_size,
            best_lp.value if best_lp.feasible else None,
            best_thr.value if best_thr.feasible else None,
            None,
            False,
        )
    if best_lp.value <= 1e-15:
        return PosReport(alpha, omega_grid_size, best_lp.value, best_thr.value, None, True)
    pos = min(1.0, max(0.0, 1.0 - best_thr.value / best_lp.value))
    return PosReport(alpha, omega_grid_size, best_lp.value, best_thr.value, pos, True)


def tv_distance(dist_a: GroupDistribution, dist_b: GroupDistribution) -> float:
    """Total variation distance between two grid pmfs."""
    return 0.5 * float(np.abs(dist_a.pmf - dist_b.pmf).sum())


def _lb_spacing(epsilon: float, x_max: int) -> int:
    return max(1, int(round(epsilon * x_max)))


def build_lb_general(alpha: float, epsilon: float, x_max: int = 100) -> Instance:
    """Two-point-mass instance whose fair optimum collapses as alpha shrinks.

    Group a sits one epsilon of the range above group b; the top score
    always succeeds while the lower one breaks exactly even, so the
    unconstrained optimum takes both and earns u_plus / 2, but any fair
    policy must throttle the top score's selection to roughly
    alpha - epsilon.  Scores are laid on the integer grid with a scale
    factor recorded in the metadata; evaluate fairness at
    metadata["alpha_grid"].
    """
    if not 0 < epsilon < alpha < 1:
        raise ValueError("need 0 < epsilon < alpha < 1")
    x_max = max(x_max, math.ceil(1.0 / epsilon))
    grid = ScoreGrid(x_max)
    spacing = _lb_spacing(epsilon, x_max)
    hi = x_max
    lo = x_max - spacing

    econ = Economics(u_plus=1.0, u_minus=-1.1, c_plus=float(x_max), c_minus=-float(x_max))
    tau = econ.profit_threshold
    p = SuccessProb.table(np.interp(grid.scores, [0, lo, x_max], [0.0, tau, 1.0]))

    pmf_a = np.zeros(grid.size)
    pmf_a[hi] = 1.0
    pmf_b = np.zeros(grid.size)
    pmf_b[lo] = 1.0

    return Instance(
        grid=grid,
        p=p,
        econ=econ,
        dist_a=GroupDistribution(pmf_a),
        dist_b=GroupDistribution(pmf_b),
        w_a=0.5,
        w_b=0.5,
        metadata={
            "family": "general",
            "scale": x_max,
            "alpha": alpha,
            "alpha_grid": alpha * x_max,
            "epsilon": epsilon,
            "epsilon_effective": spacing / x_max,
        },
    )


def build_lb_tv(alpha: float, epsilon: float, x_max: int = 100) -> Instance:
    """Instance whose groups are epsilon apart in total variation yet whose
    non-degrading fair optimum still collapses.

    Both groups share mass 1 - epsilon at the bottom score, which always
    fails and is therefore degrading; restricting policies to
    non-degrading scores strands that shared mass.  The remaining epsilon
    of group a sits at the top score with a success drift scaled so the
    fairness band binds at selection rate about alpha - epsilon, while
    group b's epsilon sits just below at a break-even-drift score.
    Evaluate fairness at metadata["alpha_grid"] with the non-degrading
    mask applied.
    """
    if not 0 < epsilon <= 0.5:
        raise ValueError("need 0 < epsilon <= 1/2")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if x_max < 4:
        raise ValueError("x_max too small for the three-point layout")
    grid = ScoreGrid(x_max)
    spacing = _lb_spacing(epsilon, x_max)
    hi = x_max
    mid = x_max - spacing
    if mid < 2:
        raise ValueError("epsilon too large for this grid")

    # Drift scale chosen so a fair policy can select the top score with
    # probability about alpha - epsilon and no more.
    if alpha - epsilon > 1e-9:
        c_plus = (alpha * x_max - epsilon * spacing) / (epsilon * (alpha - epsilon))
    else:
        c_plus = 2.0 * x_max
    econ = Economics(u_plus=1.0, u_minus=-1.1, c_plus=c_plus, c_minus=-c_plus)

    p = SuccessProb.table(np.interp(grid.scores, [0, 1, mid, x_max], [0.0, 0.5, 0.5, 1.0]))

    pmf_a = np.zeros(grid.size)
    pmf_a[0] = 1.0 - epsilon
    pmf_a[hi] = epsilon
    pmf_b = np.zeros(grid.size)
    pmf_b[0] = 1.0 - epsilon
    pmf_b[mid] = epsilon

    return Instance(
        grid=grid,
        p=p,
        econ=econ,
        dist_a=GroupDistribution(pmf_a),
        dist_b=GroupDistribution(pmf_b),
        w_a=0.5,
        w_b=0.5,
        metadata={
            "family": "tv",
            "scale": x_max,
            "alpha": alpha,
            "alpha_grid": alpha * x_max,
            "epsilon": epsilon,
            "epsilon_effective": spacing / x_max,
            "tv_distance": epsilon,
        },
    )


@dataclass(frozen=True)
class SufficiencyReport:
    epsilon: float
    condition1: bool
    condition2a: bool
    condition2b: bool
    chosen_c3_subset: tuple[int, ...]
    satisfied: bool
    implied_pof_bound: float | None


def sufficient_condition_check(instance: Instance, alpha: float, epsilon: float) -> SufficiencyReport:
    """Check conditions under which the price of fairness stays at or
    below 1 - epsilon / 4.

    Condition 1: the disadvantaged group's profitable mass carries at
    least epsilon times the advantaged group's profitable value.
    Condition 2a: selecting all of group b's profitable scores already
    closes the mean gap to within alpha.  Condition 2b: a subset of
    group b's investment scores, assembled greedily by drift per unit of
    sacrificed utility within a budget of epsilon times group b's
    profitable value, closes the gap instead.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if not 0 < epsilon < 1:
        raise ValueError("need 0 < epsilon < 1")

    masks = category_masks(instance)
    c1 = masks[Category.C1]
    c3 = masks[Category.C3]
    eu = instance.eu_grid()
    ed = instance.ed_grid()
    da = instance.dist_a.pmf
    db = instance.dist_b.pmf

    value_b_c1 = float((db[c1] * eu[c1]).sum())
    value_a_c1 = float((da[c1] * eu[c1]).sum())
    condition1 = value_b_c1 >= epsilon * value_a_c1 - TIE_TOL

    target = (instance.mu_a - instance.mu_b) - alpha
    drift = float((db[c1] * ed[c1]).sum())
    condition2a = drift >= target - TIE_TOL

    budget = epsilon * value_b_c1
    used = 0.0
    chosen: list[int] = []
    c3_scores = np.nonzero(c3 & (db > 0))[0]
    abs_eu = np.abs(eu[c3_scores])
    ratio = np.where(abs_eu > 1e-15, ed[c3_scores] / np.maximum(abs_eu, 1e-300), np.inf)
    order = c3_scores[np.lexsort((c3_scores, -ratio))]
    reached = condition2a
    for x in order:
        if reached:
            break
        cost = float(db[x] * abs(eu[x]))
        if used + cost <= budget + 1e-15:
            used += cost
            drift += float(db[x] * ed[x])
            chosen.append(int(x))
            if drift >= target - TIE_TOL:
                reached = True
    condition2b = drift >= target - TIE_TOL

    satisfied = condition1 and (condition2a or condition2b)
    return SufficiencyReport(
        epsilon=epsilon,
        condition1=bool(condition1),
        condition2a=bool(condition2a),
        condition2b=bool(condition2b),
        chosen_c3_subset=tuple(chosen),
        satisfied=bool(satisfied),
        implied_pof_bound=1.0 - epsilon / 4.0 if satisfied else None,
    )
