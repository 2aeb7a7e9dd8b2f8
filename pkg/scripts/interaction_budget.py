#!/usr/bin/env python3
"""Wannier, harmonic and corrected U at a few (depth, a/a_ho) points.

Prints the ratios that an external reference spectrum would be compared
against, plus the |U_corr|/V0 validity indicator.

    python3 scripts/interaction_budget.py 11.5:-0.08 11.5:-2.01 25.2:-2.44 64.7:-3.09
"""

import argparse

from hubfit import busch
from hubfit.bhparams import correction_factor, u_bh, validity_ratio
from hubfit.lattice import LatticeConfig
from hubfit.wannier import THREE_HALVES_PI, parse_boundary


def point(text):
    v, a = text.split(":")
    return float(v), float(a)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("points", nargs="*", type=point,
                   default=[(11.5, -0.08), (11.5, -2.01), (25.2, -2.44), (64.7, -3.09)],
                   help="depth_Er:a_over_aho pairs")
    p.add_argument("--boundary", type=parse_boundary, default=THREE_HALVES_PI)
    args = p.parse_args()

    print(f"{'V0/Er':>7} {'a/a_ho':>7} {'A':>8} {'U_BH/U_harm':>12} {'U_corr/V0':>10} {'U_BH/V0':>9}")
    for v, a in args.points:
        cfg = LatticeConfig.from_depth(v, "Er")
        a_sc = a * cfg.a_ho
        A = correction_factor(cfg, args.boundary)
        ub, uh = u_bh(cfg, args.boundary, a_sc), busch.u_harm(cfg, a_sc)
        uc = A * uh
        print(f"{v:7.1f} {a:7.2f} {A:8.4f} {ub / uh:12.4f} "
              f"{validity_ratio(uc, cfg) * (1 if uc > 0 else -1):10.4f} {ub / cfg.V0:9.4f}")


if __name__ == "__main__":
    main()
