#!/usr/bin/env python3
"""Sweep the repolarizer strength and tabulate the inequality violations.

For each epsilon the repolarizer multiplies trace-norm distances of
positive-domain pairs by exactly 1/epsilon and amplifies relative entropy by
at least the same factor, while its inverse (the depolarizing channel) stays
contractive.
"""

import argparse

import numpy as np

from beyondcp.catalog import (
    ball_pair,
    contractivity_ratio,
    depolarizer,
    interior_ball_pair,
    repolarizer,
    uhlmann_check,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epsilons", type=float, nargs="+", default=[0.5, 0.25, 0.1, 0.05])
    parser.add_argument("--pairs", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'eps':>6} {'1/eps':>8} {'trace-norm ratio':>18} {'uhlmann min ratio':>18} {'cptp control max':>17}")
    for eps in args.epsilons:
        rng = np.random.default_rng(args.seed)
        phi = repolarizer(eps)
        inverse = depolarizer(eps)
        contraction = [
            contractivity_ratio(phi, *ball_pair(eps, rng), p=1) for _ in range(args.pairs)
        ]
        uhlmann = [
            uhlmann_check(phi, *interior_ball_pair(eps, rng)).ratio
            for _ in range(args.pairs)
        ]
        control = [
            contractivity_ratio(inverse, *ball_pair(1.0, rng), p=1)
            for _ in range(args.pairs)
        ]
        contraction = [r for r in contraction if r is not None]
        uhlmann = [r for r in uhlmann if r is not None]
        control = [r for r in control if r is not None]
        print(
            f"{eps:>6.3f} {1 / eps:>8.2f} {np.mean(contraction):>18.6f} "
            f"{min(uhlmann):>18.6f} {max(control):>17.6f}"
        )


if __name__ == "__main__":
    main()
