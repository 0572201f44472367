"""Feedback dynamics at small scale: how the selection rule chosen each
step moves the group-mean gap and the decision-maker's cumulative utility.

Run from the repository root (about twenty seconds):

    python3 demos/multistep_dynamics.py
"""
from __future__ import annotations

from fairsel.presets import fig2_instance
from fairsel.simulate import SimConfig, empirical_pof, run

POLICIES = ("myopic", "simple-investment", "threshold-fair", "zero-gap-lp")


def main() -> None:
    inst = fig2_instance()
    print(f"population instance: means {inst.mu_a:.1f} / {inst.mu_b:.1f}, "
          f"grid 0..{inst.grid.x_max}")
    print("20,000 agents, 60 steps, 3 seeds per policy\n")

    results = {}
    for policy in POLICIES:
        config = SimConfig(
            n_agents=20_000, horizon=60, seeds=(1, 2, 3), policy=policy, alpha=0.01
        )
        results[policy] = run(config, inst)

    print("policy               initial gap   final gap   cumulative utility")
    for policy, traj in results.items():
        gap0 = traj.initial_gap.mean()
        gap_t = traj.agg_mean("gap")[-1]
        cum = traj.agg_mean("cum_utility")[-1]
        print(f"{policy:20s} {gap0:11.2f} {gap_t:11.2f} {cum:20.2f}")

    print("\nutility given up relative to the myopic baseline:")
    for policy in POLICIES[1:]:
        pof = empirical_pof(results[policy], results["myopic"])
        print(f"  {policy:20s} {pof:.4f}")

    print("\nthe improving policy closes the gap while losing almost nothing;")
    print("forcing the gap shut immediately (zero-gap-lp) pays far more, and")
    print("a hard 1%-band rule is infeasible at every step on this instance,")
    print("so it selects nobody and earns nothing")


if __name__ == "__main__":
    main()
