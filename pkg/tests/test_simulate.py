"""Multi-step population dynamics: selection kinds, outcome draws,
aggregation, and cascade diagnostics."""

from __future__ import annotations

import math

import numpy as np
import pytest
from conftest import point_mass_instance

from fairsel.data_io import synth_gaussian, synth_geometric_failure
from fairsel.simulate import (
    POLICY_KINDS,
    Population,
    SimConfig,
    StepMetrics,
    Trajectory,
    advance,
    cascade_diagnostics,
    empirical_pof,
    make_population,
    run,
    select,
)


def two_agent_population(score_a=75.0, score_b=40.0, x_max=100):
    return Population(
        scores=np.array([score_a, score_b], dtype=np.float64),
        is_b=np.array([False, True]),
        ever_failed=np.zeros(2, dtype=bool),
        selected_last=np.zeros(2, dtype=bool),
        initial_scores=np.array([int(score_a), int(score_b)], dtype=np.int64),
        x_max=x_max,
    )


class FixedWins:
    """Stub generator whose binomial draws always land on `wins`."""

    def __init__(self, wins):
        self.wins = wins

    def binomial(self, n, p):
        return np.full(np.shape(p), self.wins, dtype=np.int64)


class TestMakePopulation:
    def test_group_sizes_follow_weights(self):
        pop = make_population(synth_gaussian(), 1000, seed=1)
        assert pop.size == 1000
        assert int((~pop.is_b).sum()) == 700
        assert int(pop.is_b.sum()) == 300
        # group a fills the front block
        assert not pop.is_b[:700].any() and pop.is_b[700:].all()

    def test_scores_live_on_grid(self):
        pop = make_population(synth_gaussian(), 500, seed=3)
        assert np.all(pop.scores >= 0) and np.all(pop.scores <= 100)
        assert np.array_equal(pop.scores, pop.initial_scores.astype(np.float64))
        assert not pop.ever_failed.any() and not pop.selected_last.any()

    def test_seed_reproducibility(self):
        inst = synth_gaussian()
        p1 = make_population(inst, 400, seed=9)
        p2 = make_population(inst, 400, seed=9)
        p3 = make_population(inst, 400, seed=10)
        assert np.array_equal(p1.scores, p2.scores)
        assert not np.array_equal(p1.scores, p3.scores)

    def test_agent_view(self):
        pop = two_agent_population()
        a = pop.agent(0)
        b = pop.agent(1)
        assert (a.group, a.score) == ("a", 75.0)
        assert (b.group, b.score) == ("b", 40.0)


class TestSelect:
    def test_myopic_drops_unprofitable_score(self):
        # eu(40) < 0 but ed(40) > 0 under the baseline economics
        pop = two_agent_population()
        inst = synth_gaussian()
        myopic = select("myopic", pop, inst, alpha=1.0)
        invest = select("simple-investment", pop, inst, alpha=1.0)
        assert myopic.tolist() == [True, False]
        assert invest.tolist() == [True, True]

    def test_investment_matches_simple_before_any_failure(self):
        inst = synth_gaussian()
        pop1 = make_population(inst, 800, seed=4)
        pop2 = make_population(inst, 800, seed=4)
        m1 = select("investment", pop1, inst, alpha=1.0)
        m2 = select("simple-investment", pop2, inst, alpha=1.0)
        assert np.array_equal(m1, m2)

    def test_investment_excludes_failed_agents(self):
        inst = synth_gaussian()
        pop = two_agent_population(score_a=75.0, score_b=60.0)
        pop.ever_failed[0] = True
        mask = select("investment", pop, inst, alpha=1.0)
        assert mask.tolist() == [False, True]

    def test_no_kind_selects_degrading_agents(self):
        inst = synth_gaussian()
        pop = two_agent_population(score_a=75.0, score_b=20.0)  # 20 is in C4
        for kind in ("myopic", "investment", "simple-investment"):
            mask = select(kind, pop, inst, alpha=50.0)
            assert not mask[1], kind

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            select("greedy", two_agent_population(), synth_gaussian(), alpha=1.0)


class TestAdvance:
    def test_partial_success_mixture(self):
        # 3 wins of 4 at the baseline step sizes moves the score by
        # (3/4) * 2 + (1/4) * (-1) = 1.25
        pop = two_agent_population(score_a=50.0, score_b=40.0)
        inst = synth_gaussian()
        metrics = advance(pop, np.array([True, False]), inst, opportunities=4, rng=FixedWins(3))
        assert pop.scores[0] == pytest.approx(51.25, abs=1e-12)
        assert pop.scores[1] == 40.0
        assert metrics.min_selected_delta == pytest.approx(1.25, abs=1e-12)
        # one loss out of four marks the agent as having failed
        assert pop.ever_failed.tolist() == [True, False]
        # utility mixture: (3/4) * 2 + (1/4) * (-2), averaged over everyone
        assert metrics.step_utility == pytest.approx(1.0 / 2, abs=1e-12)
        assert metrics.selected_count == 1

    def test_full_success_keeps_never_failed(self):
        pop = two_agent_population(score_a=50.0)
        inst = synth_gaussian()
        advance(pop, np.array([True, False]), inst, opportunities=4, rng=FixedWins(4))
        assert pop.scores[0] == pytest.approx(52.0)
        assert not pop.ever_failed[0]

    def test_scores_clip_to_grid(self):
        pop = two_agent_population(score_a=99.5, score_b=0.5)
        inst = synth_gaussian()
        advance(pop, np.array([True, True]), inst, opportunities=1, rng=FixedWins(1))
        assert pop.scores[0] == 100.0  # 99.5 + 2 clips
        pop2 = two_agent_population(score_a=99.5, score_b=0.5)
        advance(pop2, np.array([True, True]), inst, opportunities=1, rng=FixedWins(0))
        assert pop2.scores[1] == 0.0  # 0.5 - 1 clips

    def test_empty_selection_is_a_quiet_step(self):
        pop = two_agent_population()
        inst = synth_gaussian()
        metrics = advance(pop, np.zeros(2, dtype=bool), inst, 1, FixedWins(1))
        assert metrics.step_utility == 0.0
        assert metrics.selected_count == 0
        assert math.isnan(metrics.min_selected_delta)
        assert pop.scores.tolist() == [75.0, 40.0]

    def test_matches_expectation_at_scale(self):
        # one step over 1e5 agents; realized mean utility and drift land
        # within three standard errors of the exact clipped expectation
        inst = synth_gaussian()
        n = 100_000
        pop = make_population(inst, n, seed=12)
        sel = select("myopic", pop, inst, alpha=1.0)
        x = pop.scores[sel]
        p = np.asarray(inst.p(x))
        econ = inst.econ
        up_clip = np.minimum(x + econ.c_plus, 100.0) - x
        dn_clip = np.maximum(x + econ.c_minus, 0.0) - x
        exp_util = float((p * econ.u_plus + (1 - p) * econ.u_minus).sum()) / n
        se_util = math.sqrt(float((p * (1 - p)).sum())) * (econ.u_plus - econ.u_minus) / n
        exp_shift = np.zeros(n)
        exp_shift[sel] = p * up_clip + (1 - p) * dn_clip
        var_shift = np.zeros(n)
        var_shift[sel] = p * (1 - p) * (up_clip - dn_clip) ** 2
        expected_scores = pop.scores + exp_shift
        exp_mean_a = float(expected_scores[~pop.is_b].mean())
        se_mean_a = math.sqrt(float(var_shift[~pop.is_b].sum())) / int((~pop.is_b).sum())
        metrics = advance(pop, sel, inst, 1, np.random.default_rng(99))
        assert abs(metrics.step_utility - exp_util) <= 3 * se_util
        assert abs(metrics.mean_a - exp_mean_a) <= 3 * se_mean_a


class TestRun:
    def test_deterministic_replay(self):
        inst = synth_gaussian()
        cfg = SimConfig(n_agents=600, horizon=5, seeds=(1, 2), policy="myopic", alpha=0.3)
        t1 = run(cfg, inst)
        t2 = run(cfg, inst)
        for name in ("mean_a", "mean_b", "gap", "step_utility", "cum_utility"):
            assert np.array_equal(t1.stack(name), t2.stack(name))
        assert np.array_equal(
            t1.stack("min_selected_delta"), t2.stack("min_selected_delta"), equal_nan=True
        )

    def test_seeds_differ(self):
        inst = synth_gaussian()
        a = run(SimConfig(n_agents=600, horizon=3, seeds=(1,), policy="myopic"), inst)
        b = run(SimConfig(n_agents=600, horizon=3, seeds=(2,), policy="myopic"), inst)
        assert not np.array_equal(a.stack("mean_a"), b.stack("mean_a"))

    def test_cumulative_utility_is_running_sum(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=500, horizon=6, seeds=(3,), policy="myopic"), inst)
        steps = traj.steps[0]
        acc = np.cumsum([m.step_utility for m in steps])
        got = np.array([m.cum_utility for m in steps])
        assert np.allclose(acc, got, atol=1e-12)
        assert [m.t for m in steps] == list(range(1, 7))

    def test_alpha_fraction_matches_absolute(self):
        inst = synth_gaussian()
        common = dict(n_agents=500, horizon=2, seeds=(5,), policy="threshold-fair")
        frac = run(SimConfig(alpha=0.3, alpha_is_absolute=False, **common), inst)
        absolute = run(SimConfig(alpha=30.0, alpha_is_absolute=True, **common), inst)
        assert np.array_equal(frac.stack("mean_a"), absolute.stack("mean_a"))
        assert np.array_equal(frac.stack("gap"), absolute.stack("gap"))

    def test_threshold_fair_infeasible_step_flagged(self):
        # both groups are point masses far apart: no one-step policy can
        # bring the empirical means within the band, so the step selects
        # nobody and says why
        inst = point_mass_instance()
        cfg = SimConfig(
            n_agents=300,
            horizon=2,
            seeds=(1,),
            policy="threshold-fair",
            alpha=1.0,
            alpha_is_absolute=True,
        )
        traj = run(cfg, inst)
        for m in traj.steps[0]:
            assert m.infeasible
            assert m.selected_count == 0
            assert m.step_utility == 0.0

    def test_zero_gap_phase1_recorded(self):
        inst = synth_gaussian()
        cfg = SimConfig(n_agents=2000, horizon=1, seeds=(7,), policy="zero-gap-lp")
        traj = run(cfg, inst)
        m = traj.steps[0][0]
        gap0 = float(traj.initial_gap[0])
        assert m.phase1_gap is not None
        assert 0.0 <= m.phase1_gap < gap0
        assert not m.infeasible

    def test_myopic_never_sets_phase_or_infeasible(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=300, horizon=2, seeds=(1,), policy="myopic"), inst)
        for m in traj.steps[0]:
            assert m.phase1_gap is None and not m.infeasible

    def test_horizon_zero(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=100, horizon=0, seeds=(1,), policy="myopic"), inst)
        assert traj.steps == [[]]
        assert traj.initial_mean_a.shape == (1,)


class TestTrajectoryAggregation:
    def test_stack_and_stats(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=400, horizon=3, seeds=(1, 2, 3), policy="myopic"), inst)
        arr = traj.stack("gap")
        assert arr.shape == (3, 3)
        assert np.allclose(traj.agg_mean("gap"), arr.mean(axis=0))
        assert np.allclose(traj.agg_std("gap"), arr.std(axis=0, ddof=1))

    def test_single_seed_std_is_zero(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=200, horizon=2, seeds=(1,), policy="myopic"), inst)
        assert np.allclose(traj.agg_std("gap"), 0.0)


class TestEmpiricalPof:
    @staticmethod
    def _fake_traj(cum_final: float, horizon: int = 2) -> Trajectory:
        steps = [
            [
                StepMetrics(
                    t=t,
                    mean_a=0.0,
                    mean_b=0.0,
                    gap=0.0,
                    step_utility=0.0,
                    cum_utility=cum_final if t == horizon else 0.0,
                    frac_xmax_a=0.0,
                    frac_xmax_b=0.0,
                    selected_count=0,
                )
                for t in range(1, horizon + 1)
            ]
        ]
        return Trajectory(
            policy="myopic",
            seeds=(1,),
            horizon=horizon,
            initial_mean_a=np.array([0.0]),
            initial_mean_b=np.array([0.0]),
            steps=steps,
            cascade=None,
        )

    def test_half_ratio(self):
        assert empirical_pof(self._fake_traj(1.0), self._fake_traj(2.0)) == pytest.approx(0.5)

    def test_identical_runs_cost_nothing(self):
        inst = synth_gaussian()
        cfg = SimConfig(n_agents=300, horizon=2, seeds=(1,), policy="myopic")
        assert empirical_pof(run(cfg, inst), run(cfg, inst)) == 0.0

    def test_horizon_mismatch(self):
        with pytest.raises(ValueError):
            empirical_pof(self._fake_traj(1.0, horizon=2), self._fake_traj(1.0, horizon=3))

    def test_degenerate_baselines(self):
        assert empirical_pof(self._fake_traj(1.0, 0), self._fake_traj(1.0, 0)) is None
        assert empirical_pof(self._fake_traj(1.0), self._fake_traj(-1.0)) is None


class TestCascade:
    def test_never_failed_mass_shrinks_monotonically(self):
        # low starting scores keep the failure rate non-negligible
        inst = synth_geometric_failure(p_fail=0.5, mean_a=6, mean_b=3, variance=4, x_max=30)
        cfg = SimConfig(n_agents=2000, horizon=10, seeds=(1,), policy="investment")
        traj = run(cfg, inst)
        nf = traj.cascade[0].never_failed_frac
        assert nf.size == 10
        assert np.all(np.diff(nf) <= 1e-12)
        assert nf[-1] < nf[0]

    def test_low_failure_run_concentrates_at_top(self):
        inst = synth_geometric_failure(p_fail=0.01)
        cfg = SimConfig(n_agents=3000, horizon=30, seeds=(1, 2), policy="investment")
        traj = run(cfg, inst)
        report = cascade_diagnostics(traj, inst)
        assert report.p_fail == pytest.approx(0.01, abs=1e-12)
        assert report.concentration_floor == pytest.approx(0.9, abs=1e-12)
        assert np.all(report.final_xmax_frac >= 0.9)
        assert not report.any_flag
        assert np.all(report.deviation_ok)
        final_gap = traj.stack("gap")[:, -1]
        assert np.all(final_gap < traj.initial_gap)

    def test_requires_investment_history(self):
        inst = synth_gaussian()
        traj = run(SimConfig(n_agents=200, horizon=1, seeds=(1,), policy="myopic"), inst)
        with pytest.raises(ValueError):
            cascade_diagnostics(traj, inst)


class TestSimConfig:
    def test_policy_kinds_frozen(self):
        assert POLICY_KINDS == (
            "myopic",
            "investment",
            "simple-investment",
            "threshold-fair",
            "zero-gap-lp",
        )

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(policy="nope"),
            dict(n_agents=0),
            dict(horizon=-1),
            dict(seeds=()),
            dict(opportunities=0),
            dict(alpha=-0.1),
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        base = dict(n_agents=10, horizon=1, seeds=(1,), policy="myopic")
        base.update(kwargs)
        with pytest.raises(ValueError):
            SimConfig(**base)
