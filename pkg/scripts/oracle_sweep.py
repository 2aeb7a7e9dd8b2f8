#!/usr/bin/env python3
"""Compare the Wannier integral, the fitted U and the sextic-well shift on a g1d sweep.

    python3 scripts/oracle_sweep.py --depth 2.0 --g -0.25 -0.5 -1 -2 [--n 513]
"""

import argparse

from hubfit.lattice import LatticeConfig
from hubfit.oracle1d import Grid1D, extract_u_opt_1d, u_bh_1d, u_sext_1d


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--depth", type=float, default=2.0, help="V0 in units of hbar*omega")
    p.add_argument("--g", type=float, nargs="+", default=[-0.25, -0.5, -1.0, -1.5, -2.0, 0.5, 1.0])
    p.add_argument("--n", type=int, default=513, help="grid points (2^k + 1)")
    args = p.parse_args()

    cfg = LatticeConfig.from_depth(args.depth, "hbar_omega")
    grid = Grid1D(n=args.n)
    print(f"# V0 = {args.depth} hbar*omega, grid n = {args.n}, energies in lattice units")
    print(f"{'g1d':>8} {'U_BH_1d':>12} {'U_opt_1d':>12} {'U_sext_1d':>12} {'BH/opt':>8} {'residual':>10}")
    for g in args.g:
        rep = extract_u_opt_1d(cfg, grid, g)
        u_w = u_bh_1d(cfg, g)
        u_s = u_sext_1d(cfg, grid, g)
        u = rep.params.U
        print(f"{g:8.3f} {u_w:12.6f} {u:12.6f} {u_s:12.6f} {u_w / u:8.4f} {rep.residual:10.2e}")


if __name__ == "__main__":
    main()
