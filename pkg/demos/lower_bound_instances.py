"""The two adversarial constructions that force a near-maximal price of
fairness, one unrestricted and one with nearly identical groups.

Run from the repository root:

    python3 demos/lower_bound_instances.py
"""
from __future__ import annotations

import numpy as np

from fairsel.single_step import (
    build_lb_general,
    build_lb_tv,
    optimal_policy,
    price_of_fairness,
    tv_distance,
)


def describe(inst) -> None:
    for name, dist in (("a", inst.dist_a), ("b", inst.dist_b)):
        support = np.nonzero(dist.pmf)[0]
        masses = ", ".join(f"{x}:{dist.pmf[x]:.3f}" for x in support)
        print(f"  group {name}: {masses}")


def main() -> None:
    alpha, eps = 0.3, 0.01
    target = 1.0 - (alpha - eps)

    inst = build_lb_general(alpha, eps)
    print(f"general construction (alpha={alpha}, eps={eps}):")
    describe(inst)
    opt = optimal_policy(inst)
    rep = price_of_fairness(inst, inst.metadata["alpha_grid"])
    print(f"  optimum {opt.value:.4f}, fair value {rep.fair_value:.4f}, "
          f"pof {rep.pof:.4f} (target >= {target:.2f} - 0.05)")
    print("  the profitable mass sits with the advantaged group; staying in")
    print("  the band forfeits almost all of it\n")

    inst = build_lb_tv(alpha, eps)
    tv = tv_distance(inst.dist_a, inst.dist_b)
    print(f"near-identical construction (alpha={alpha}, eps={eps}):")
    describe(inst)
    rep = price_of_fairness(inst, inst.metadata["alpha_grid"], non_degrading=True)
    print(f"  total variation between the groups: {tv:.4f}")
    print(f"  pof restricted to non-degrading policies: {rep.pof:.4f} "
          f"(target >= {target:.2f} - 0.05)")
    print("  a vanishing distributional difference still forces the full price")


if __name__ == "__main__":
    main()
