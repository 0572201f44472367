"""Multi-step stochastic population dynamics under selection policies.

A population of agents carries real-valued scores on the instance's
grid range.  Each step a policy picks agents, each picked agent draws
one or more success/failure outcomes, scores move by the economics'
step sizes (clipped to the grid range), and the institution books the
realized utility.  Everything is driven by per-(seed, step) generator
streams, so runs are bitwise reproducible and steps could be replayed
independently.

Policy kinds:
  myopic             select scores with non-negative expected utility
  investment         select improving scores (C1 or C3) among agents
                     that have never failed
  simple-investment  select improving scores (C1 or C3) unconditionally
  threshold-fair     re-solve the fair cutoff problem each step on the
                     empirical score distributions
  zero-gap-lp        two-phase program: first minimize the expected
                     post-step mean gap, then maximize utility at that gap
All kinds refuse scores that are both unprofitable and degrading (C4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import lp
from .model import TIE_TOL, GroupDistribution, Instance
from .single_step import fair_opt_threshold, restrict_non_degrading

POLICY_KINDS = ("myopic", "investment", "simple-investment", "threshold-fair", "zero-gap-lp")


@dataclass
class Agent:
    group: str  # "a" | "b"
    score: float
    ever_failed: bool
    selected_last: bool


@dataclass
class Population:
    """Agent state in struct-of-arrays form; index order is stable."""

    scores: np.ndarray  # float64
    is_b: np.ndarray  # bool, False = group a
    ever_failed: np.ndarray  # bool
    selected_last: np.ndarray  # bool
    initial_scores: np.ndarray  # int64, scores at creation time
    x_max: int

    @property
    def size(self) -> int:
        return self.scores.size

    def agent(self, i: int) -> Agent:
        return Agent(
            group="b" if self.is_b[i] else "a",
            score=float(self.scores[i]),
            ever_failed=bool(self.ever_failed[i]),
            selected_last=bool(self.selected_last[i]),
        )

    def group_means(self) -> tuple[float, float]:
        mean_a = float(self.scores[~self.is_b].mean())
        mean_b = float(self.scores[self.is_b].mean())
        return mean_a, mean_b


@dataclass
class StepMetrics:
    t: int
    mean_a: float
    mean_b: float
    gap: float
    step_utility: float
    cum_utility: float
    frac_xmax_a: float
    frac_xmax_b: float
    selected_count: int
    infeasible: bool = False
    phase1_gap: float | None = None
    min_selected_delta: float = math.nan


@dataclass(frozen=True)
class SimConfig:
    n_agents: int
    horizon: int
    seeds: tuple[int, ...]
    policy: str
    alpha: float = 0.01
    alpha_is_absolute: bool = False
    opportunities: int = 1
    omega_grid_size: int = 101

    def __post_init__(self) -> None:
        if self.policy not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.policy!r}; pick one of {POLICY_KINDS}")
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.opportunities < 1:
            raise ValueError("opportunities must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclass
class CascadeTrack:
    """Per-step diagnostics for investment-style runs: survival and
    concentration of the initially improving (C1 or C3) agents."""

    never_failed_frac: np.ndarray
    c13_at_xmax_frac: np.ndarray
    max_deviation: np.ndarray


@dataclass
class Trajectory:
    policy: str
    seeds: tuple[int, ...]
    horizon: int
    initial_mean_a: np.ndarray  # per seed
    initial_mean_b: np.ndarray
    steps: list[list[StepMetrics]]
    cascade: list[CascadeTrack] | None

    def stack(self, name: str) -> np.ndarray:
        return np.array([[getattr(m, name) for m in run] for run in self.steps], dtype=np.float64)

    def agg_mean(self, name: str) -> np.ndarray:
        return self.stack(name).mean(axis=0)

    def agg_std(self, name: str) -> np.ndarray:
        arr = self.stack(name)
        return arr.std(axis=0, ddof=1 if arr.shape[0] > 1 else 0)

    @property
    def initial_gap(self) -> np.ndarray:
        return np.abs(self.initial_mean_a - self.initial_mean_b)


def _rng(seed: int, step: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(step)])))


def make_population(instance: Instance, n_agents: int, seed: int) -> Population:
    """Sample a fresh population: group sizes from the weights (a first),
    integer scores from each group's pmf."""
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    n_a = int(round(n_agents * instance.w_a))
    n_b = n_agents - n_a
    rng = _rng(seed, 0)
    grid = np.arange(instance.grid.size)
    scores_a = rng.choice(grid, size=n_a, p=instance.dist_a.pmf / instance.dist_a.pmf.sum())
    scores_b = rng.choice(grid, size=n_b, p=instance.dist_b.pmf / instance.dist_b.pmf.sum())
    scores = np.concatenate([scores_a, scores_b]).astype(np.float64)
    is_b = np.zeros(n_agents, dtype=bool)
    is_b[n_a:] = True
    return Population(
        scores=scores,
        is_b=is_b,
        ever_failed=np.zeros(n_agents, dtype=bool),
        selected_last=np.zeros(n_agents, dtype=bool),
        initial_scores=scores.astype(np.int64),
        x_max=instance.grid.x_max,
    )


def _agent_eu_ed(population: Population, instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    p = instance.p(population.scores)
    econ = instance.econ
    eu = p * econ.u_plus + (1.0 - p) * econ.u_minus
    ed = p * econ.c_plus + (1.0 - p) * econ.c_minus
    return eu, ed


def _rounded_scores(population: Population) -> np.ndarray:
    return np.clip(np.rint(population.scores).astype(np.int64), 0, population.x_max)


def _empirical_instance(population: Population, instance: Instance) -> Instance:
    rounded = _rounded_scores(population)
    n_bins = instance.grid.size
    counts_a = np.bincount(rounded[~population.is_b], minlength=n_bins).astype(np.float64)
    counts_b = np.bincount(rounded[population.is_b], minlength=n_bins).astype(np.float64)
    if counts_a.sum() == 0 or counts_b.sum() == 0:
        raise ValueError("both groups must be non-empty for distribution-based policies")
    return replace(
        instance,
        dist_a=GroupDistribution(counts_a / counts_a.sum()),
        dist_b=GroupDistribution(counts_b / counts_b.sum()),
    )


def _apply_grid_policy(
    population: Population,
    pi_a: np.ndarray,
    pi_b: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Realize per-score selection probabilities as per-agent draws."""
    rounded = _rounded_scores(population)
    prob = np.where(population.is_b, pi_b[rounded], pi_a[rounded])
    mask = prob >= 1.0
    frac = (prob > 0.0) & (prob < 1.0)
    if np.any(frac):
        mask = mask.copy()
        mask[frac] = rng.random(int(frac.sum())) < prob[frac]
    return mask


def _zero_gap_policy(
    empirical: Instance, c4: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Two-phase program on the empirical distributions.

    Phase 1 minimizes |expected post-step mean gap|.  Over a box the
    reachable gaps form an interval, so the minimum is available in
    closed form.  Phase 2 maximizes expected utility subject to staying
    within the phase-1 gap plus a hair of slack.
    """
    eu = empirical.eu_grid()
    ed = empirical.ed_grid()
    keep = ~c4
    drift_a = (empirical.dist_a.pmf * ed)[keep]
    drift_b = (empirical.dist_b.pmf * ed)[keep]
    delta0 = empirical.mu_a - empirical.mu_b

    g_min = delta0 + np.minimum(drift_a, 0.0).sum() - np.maximum(drift_b, 0.0).sum()
    g_max = delta0 + np.maximum(drift_a, 0.0).sum() - np.minimum(drift_b, 0.0).sum()
    if g_min <= 0.0 <= g_max:
        best_gap = 0.0
    else:
        best_gap = min(abs(g_min), abs(g_max))
    budget = best_gap + 1e-9

    obj_a = (empirical.w_a * empirical.dist_a.pmf * eu)[keep]
    obj_b = (empirical.w_b * empirical.dist_b.pmf * eu)[keep]
    c = np.concatenate([obj_a, obj_b])
    gap_row = np.concatenate([drift_a, -drift_b])
    G = np.vstack([gap_row, -gap_row])
    h = np.array([budget - delta0, budget + delta0])
    sol = lp.solve(lp.LpProblem(c, G, h))
    if sol.status != "optimal":
        raise lp.LpError("phase-2 program reported infeasible at its own phase-1 gap")

    n = empirical.grid.size
    m = int(keep.sum())
    pi_a = np.zeros(n)
    pi_b = np.zeros(n)
    pi_a[keep] = sol.x[:m]
    pi_b[keep] = sol.x[m:]
    return pi_a, pi_b, float(best_gap)


def _select_with_info(
    policy_kind: str,
    population: Population,
    instance: Instance,
    alpha: float,
    rng: np.random.Generator,
    omega_grid_size: int = 101,
) -> tuple[np.ndarray, dict]:
    eu, ed = _agent_eu_ed(population, instance)
    not_c4 = (eu >= -TIE_TOL) | (ed >= -TIE_TOL)
    info: dict = {}

    if policy_kind == "myopic":
        return (eu >= -TIE_TOL) & not_c4, info
    if policy_kind == "investment":
        return (ed >= -TIE_TOL) & ~population.ever_failed & not_c4, info
    if policy_kind == "simple-investment":
        return (ed >= -TIE_TOL) & not_c4, info

    empirical = _empirical_instance(population, instance)
    c4 = restrict_non_degrading(instance)

    if policy_kind == "threshold-fair":
        sol = fair_opt_threshold(empirical, alpha, omega_grid_size, mask=c4)
        if not sol.feasible:
            info["infeasible"] = True
            return np.zeros(population.size, dtype=bool), info
        mask = _apply_grid_policy(population, sol.policy.pi_a, sol.policy.pi_b, rng)
        return mask & not_c4, info

    if policy_kind == "zero-gap-lp":
        pi_a, pi_b, phase1 = _zero_gap_policy(empirical, c4)
        info["phase1_gap"] = phase1
        mask = _apply_grid_policy(population, pi_a, pi_b, rng)
        return mask & not_c4, info

    raise ValueError(f"unknown policy {policy_kind!r}")


def select(
    policy_kind: str,
    population: Population,
    instance: Instance,
    alpha: float,
    rng: np.random.Generator | None = None,
    omega_grid_size: int = 101,
) -> np.ndarray:
    """Selection mask for one step.  Randomized policies need the rng."""
    if rng is None:
        rng = _rng(0, 1)
    mask, _ = _select_with_info(policy_kind, population, instance, alpha, rng, omega_grid_size)
    return mask


def advance(
    population: Population,
    selection: np.ndarray,
    instance: Instance,
    opportunities: int,
    rng: np.random.Generator,
) -> StepMetrics:
    """Draw outcomes for the selected agents and move their scores.

    Each selected agent draws `opportunities` success trials at its
    current score; the realized score change and utility are the
    success-fraction mixture of the economics' step sizes, which keeps
    the single-trial expectation.  Scores clip to the grid range.
    Mutates the population and returns the post-step metrics (time and
    cumulative utility are filled by the caller).
    """
    econ = instance.econ
    sel = np.asarray(selection, dtype=bool)
    n_sel = int(sel.sum())
    min_delta = math.nan
    step_utility = 0.0

    if n_sel:
        p_sel = np.asarray(instance.p(population.scores[sel]), dtype=np.float64)
        wins = rng.binomial(opportunities, p_sel)
        g = wins / float(opportunities)
        delta = g * econ.c_plus + (1.0 - g) * econ.c_minus
        population.scores[sel] = np.clip(population.scores[sel] + delta, 0.0, population.x_max)
        population.ever_failed[sel] |= wins < opportunities
        util = g * econ.u_plus + (1.0 - g) * econ.u_minus
        step_utility = float(util.sum()) / population.size
        min_delta = float(delta.min())

    population.selected_last = sel.copy()

    mean_a, mean_b = population.group_means()
    at_top = population.scores >= population.x_max - 1e-9
    n_a = int((~population.is_b).sum())
    n_b = population.size - n_a
    return StepMetrics(
        t=0,
        mean_a=mean_a,
        mean_b=mean_b,
        gap=abs(mean_a - mean_b),
        step_utility=step_utility,
        cum_utility=0.0,
        frac_xmax_a=float(at_top[~population.is_b].sum()) / max(n_a, 1),
        frac_xmax_b=float(at_top[population.is_b].sum()) / max(n_b, 1),
        selected_count=n_sel,
        min_selected_delta=min_delta,
    )


def _expected_paths(instance: Instance, horizon: int) -> np.ndarray:
    """Deterministic drift path from every starting grid score: the score
    reached by always moving by the local expected change, clipped."""
    econ = instance.econ
    paths = np.zeros((horizon + 1, instance.grid.size))
    cur = instance.grid.scores.astype(np.float64)
    paths[0] = cur
    for t in range(1, horizon + 1):
        p = np.asarray(instance.p(cur), dtype=np.float64)
        cur = np.clip(cur + p * econ.c_plus + (1.0 - p) * econ.c_minus, 0.0, instance.grid.x_max)
        paths[t] = cur
    return paths


def run(config: SimConfig, instance: Instance) -> Trajectory:
    """Simulate every seed and collect per-step metrics.

    Fully deterministic in (config, instance): population build and each
    step use their own generator stream keyed by (seed, step).
    """
    alpha = config.alpha if config.alpha_is_absolute else config.alpha * instance.grid.x_max
    track_cascade = config.policy in ("investment", "simple-investment")
    paths = _expected_paths(instance, config.horizon) if track_cascade else None

    all_steps: list[list[StepMetrics]] = []
    cascades: list[CascadeTrack] | None = [] if track_cascade else None
    init_a = np.zeros(len(config.seeds))
    init_b = np.zeros(len(config.seeds))

    for si, seed in enumerate(config.seeds):
        pop = make_population(instance, config.n_agents, seed)
        init_a[si], init_b[si] = pop.group_means()

        if track_cascade:
            eu0, ed0 = _agent_eu_ed(pop, instance)
            init_c13 = ed0 >= -TIE_TOL
            n_c13 = max(int(init_c13.sum()), 1)
            nf_frac = np.zeros(config.horizon)
            top_frac = np.zeros(config.horizon)
            max_dev = np.zeros(config.horizon)

        metrics: list[StepMetrics] = []
        cum = 0.0
        for t in range(1, config.horizon + 1):
            rng = _rng(seed, t)
            sel, info = _select_with_info(
                config.policy, pop, instance, alpha, rng, config.omega_grid_size
            )
            m = advance(pop, sel, instance, config.opportunities, rng)
            cum += m.step_utility
            m.t = t
            m.cum_utility = cum
            m.infeasible = bool(info.get("infeasible", False))
            m.phase1_gap = info.get("phase1_gap")
            metrics.append(m)

            if track_cascade:
                alive = init_c13 & ~pop.ever_failed
                nf_frac[t - 1] = float(alive.sum()) / n_c13
                top_frac[t - 1] = float(
                    (pop.scores[init_c13] >= pop.x_max - 1e-9).sum()
                ) / n_c13
                if np.any(alive):
                    expected = paths[t][pop.initial_scores[alive]]
                    max_dev[t - 1] = float(np.abs(pop.scores[alive] - expected).max())

        all_steps.append(metrics)
        if track_cascade:
            cascades.append(CascadeTrack(nf_frac, top_frac, max_dev))

    return Trajectory(
        policy=config.policy,
        seeds=config.seeds,
        horizon=config.horizon,
        initial_mean_a=init_a,
        initial_mean_b=init_b,
        steps=all_steps,
        cascade=cascades,
    )


def empirical_pof(fair: Trajectory, baseline: Trajectory) -> float | None:
    """Relative cumulative-utility shortfall of a fair run against an
    unconstrained baseline at the shared final step; None when the
    baseline's utility is not positive."""
    if fair.horizon != baseline.horizon:
        raise ValueError("trajectories must share the horizon")
    if fair.horizon == 0:
        return None
    base = float(baseline.agg_mean("cum_utility")[-1])
    if base <= 0.0:
        return None
    got = float(fair.agg_mean("cum_utility")[-1])
    return min(1.0, max(0.0, 1.0 - got / base))


@dataclass(frozen=True)
class CascadeReport:
    p_fail: float
    concentration_floor: float  # 1 - 10 * p_fail
    final_never_failed_frac: np.ndarray  # per seed
    final_xmax_frac: np.ndarray  # per seed
    concentration_flag: np.ndarray  # per seed, True where the floor is missed
    deviation_ok: np.ndarray  # per seed, True where deviations stayed under the bound
    any_flag: bool


def cascade_diagnostics(trajectory: Trajectory, instance: Instance) -> CascadeReport:
    """Check the investment-cascade behavior of a recorded run.

    The never-failed mass should concentrate at the top score; a final
    top-score fraction below 1 - 10 * p_fail raises a flag.  Score
    deviations from the deterministic drift path should grow only like
    sqrt(t) times a squared log; violations flip deviation_ok but are
    advisory (the bound has slack constants).
    """
    if trajectory.cascade is None:
        raise ValueError("trajectory was not run under an investment policy")
    ed = instance.ed_grid()
    c13 = ed >= -TIE_TOL
    p_fail = float((1.0 - instance.p.values[c13]).max()) if np.any(c13) else 0.0
    floor = 1.0 - 10.0 * p_fail

    n_seeds = len(trajectory.cascade)
    final_nf = np.zeros(n_seeds)
    final_top = np.zeros(n_seeds)
    dev_ok = np.zeros(n_seeds, dtype=bool)
    spread = instance.econ.c_plus - instance.econ.c_minus
    n_c13 = max(float(np.sum(c13)), math.e)
    for i, track in enumerate(trajectory.cascade):
        final_nf[i] = track.never_failed_frac[-1] if track.never_failed_frac.size else 1.0
        final_top[i] = track.c13_at_xmax_frac[-1] if track.c13_at_xmax_frac.size else 0.0
        ts = np.arange(1, track.max_deviation.size + 1, dtype=np.float64)
        bound = spread * np.sqrt(ts) * np.log(np.maximum(ts * n_c13, math.e)) ** 2
        dev_ok[i] = bool(np.all(track.max_deviation <= bound))

    flags = final_top < floor
    return CascadeReport(
        p_fail=p_fail,
        concentration_floor=floor,
        final_never_failed_frac=final_nf,
        final_xmax_frac=final_top,
        concentration_flag=flags,
        deviation_ok=dev_ok,
        any_flag=bool(flags.any()),
    )
