"""Single-step tour: categories, the optimal policy, fair solves, and the
price curves on the baseline synthetic instance.

Run from the repository root:

    python3 demos/single_step_prices.py
"""
from __future__ import annotations

import numpy as np

from fairsel.model import Category, category_masks, post_means
from fairsel.presets import synthetic_baseline
from fairsel.single_step import (
    fair_opt_lp,
    fair_opt_threshold,
    optimal_policy,
    price_of_fairness,
    price_of_simplicity,
)


def main() -> None:
    inst = synthetic_baseline()
    x_max = inst.grid.x_max
    print(f"baseline instance: grid 0..{x_max}, w_a={inst.w_a}, "
          f"initial means {inst.mu_a:.2f} / {inst.mu_b:.2f}")

    masks = category_masks(inst)
    for cat in Category:
        scores = np.nonzero(masks[cat])[0]
        span = f"{scores[0]}..{scores[-1]}" if scores.size else "(empty)"
        print(f"  {cat.name}: scores {span}")

    opt = optimal_policy(inst)
    mu_a, mu_b, gap = post_means(opt.policy, inst)
    print(f"\nunconstrained optimum: value {opt.value:.4f}, "
          f"post means {mu_a:.2f} / {mu_b:.2f} (gap {gap:.2f})")

    print("\nfair solves (band as a fraction of the grid):")
    print("  alpha   LP value   cutoff value   post gap")
    for frac in (0.1, 0.2, 0.4, 0.8):
        alpha = frac * x_max
        lp = fair_opt_lp(inst, alpha)
        thr = fair_opt_threshold(inst, alpha)
        if not lp.feasible:
            print(f"  {frac:4.2f}   infeasible: one step cannot close the gap this far")
            continue
        print(f"  {frac:4.2f}   {lp.value:8.4f}   {thr.value:12.4f}   {lp.gap:8.2f}")

    print("\nprice of fairness along the band sweep:")
    print("  alpha    pof")
    for frac in np.arange(0.0, 1.01, 0.1):
        rep = price_of_fairness(inst, float(frac) * x_max)
        pof = "undefined" if rep.pof is None else f"{rep.pof:.4f}"
        print(f"  {frac:4.2f}   {pof}")

    rep = price_of_simplicity(inst, 0.2 * x_max, omega_grid_size=10)
    print(f"\nprice of simplicity at alpha=0.2 with a 10-point fraction grid: "
          f"{rep.pos:.2e}")
    print("the cutoff family matches the exact program to well under 1%")


if __name__ == "__main__":
    main()
