#!/usr/bin/env python3
"""Plot the storage-bandwidth tradeoff outer bounds for one instance.

Draws the bandwidth floor (vertical line), the two storage-bandwidth
half-plane boundaries, and their common corner.  Defaults reproduce the
(4, 3, 0, 0) picture with rate vector (0, 1/3, 2/3).

Usage:
    python scripts/tradeoff_figure.py [--d 3] [--l1 0] [--l2 0]
        [--rates 0,1/3,2/3] [--output tradeoff.png]
"""

import argparse
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from mdcsr.bounds import (
    NormalizedRates,
    bound_beta,
    bound_general,
    bound_l1_zero,
    bound_prior,
    mbr_point,
)


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--l1", type=int, default=0)
    ap.add_argument("--l2", type=int, default=0)
    ap.add_argument("--rates", default="0,1/3,2/3")
    ap.add_argument("--output", default="tradeoff.png")
    return ap.parse_args()


def main():
    args = parse_args()
    lo = args.l1 + args.l2 + 1
    values = [Fraction(tok) for tok in args.rates.split(",")]
    rates = NormalizedRates.from_mapping(
        args.d, args.l1, args.l2, {lo + i: v for i, v in enumerate(values)}
    )
    floor = bound_beta(rates)
    corner = mbr_point(rates)
    lines = [("type2_2", bound_prior(rates), "tab:orange")]
    if args.l1 == 0:
        lines.append(("b", bound_l1_zero(rates), "tab:green"))
    elif args.l1 <= args.l2:
        lines.append(("b4", bound_general(rates), "tab:green"))

    betas = [floor + Fraction(k, 64) * floor for k in range(0, 129)]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.axvline(float(floor), color="tab:blue", label=f"beta floor = {floor}")
    for label, bnd, color in lines:
        ys = [float(bnd.alpha_floor(b)) for b in betas]
        ax.plot([float(b) for b in betas], ys, color=color,
                label=f"{label}: {bnd.render()}")
    ax.plot(
        [float(corner.beta_bar)], [float(corner.alpha_bar)], "k*", markersize=12,
        label=f"corner ({corner.alpha_bar}, {corner.beta_bar})",
    )
    ax.set_xlabel("normalized repair bandwidth")
    ax.set_ylabel("normalized storage")
    ax.set_title(f"(d={args.d}, l1={args.l1}, l2={args.l2}), rates {args.rates}")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
