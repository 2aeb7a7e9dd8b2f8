#!/usr/bin/env python3
"""Run every canned figure sweep and, if matplotlib is present, draw quick-look plots.

    python3 scripts/reproduce_figures.py --out results/figures [--only fig4,fig5] [--jobs 4]
"""

import argparse
import sys
from pathlib import Path

from hubfit.cli import run

HERE = Path(__file__).resolve().parent


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    cols = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    data = {}
    for i, c in enumerate(cols):
        try:
            data[c] = [float(r[i]) for r in rows]
        except ValueError:
            data[c] = [r[i] for r in rows]
    return data


def plot(out: Path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plots", file=sys.stderr)
        return
    for csv in sorted(out.glob("*.csv")):
        d = read_csv(csv)
        cols = [c for c in d if c != "error" and all(isinstance(v, float) for v in d[c])]
        if len(cols) < 2:
            continue
        x, ys = cols[0], cols[1:]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for y in ys[:12]:
            ax.plot(d[x], d[y], label=y)
        ax.set_xlabel(x)
        ax.set_title(csv.stem, fontsize=9)
        ax.legend(fontsize=6)
        fig.tight_layout()
        fig.savefig(csv.with_suffix(".png"), dpi=120)
        plt.close(fig)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, default=HERE / "configs" / "figures.cfg")
    p.add_argument("--out", type=Path, default=Path("results/figures"))
    p.add_argument("--only", default=None)
    p.add_argument("--jobs", default=None)
    p.add_argument("--no-plots", action="store_true")
    args = p.parse_args()

    argv = ["figures", "--config", str(args.config), "--out", str(args.out)]
    if args.only:
        argv += ["--only", args.only]
    if args.jobs:
        argv += ["--jobs", args.jobs]
    code = run(argv)
    if code == 0 and not args.no_plots:
        plot(args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
