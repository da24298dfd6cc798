"""Monte Carlo door use and CO2 for the shipped workday scenarios.

    python3 scripts/run_ensembles.py --runs 100 --workers 4 --out results/
"""

import argparse
from pathlib import Path

import numpy as np

from occusim.cosim import run_monte_carlo
from occusim.io import load_config, summary_plot_data, write_summary

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ("workday1.json", "workday2.json")


def report(name, summary):
    print(f"\n{name}: {summary.runs} runs")
    print(f"{'hour':>4}  {'activity':<20} {'door use':>8} {'co2 p50':>8} {'p5..p95':>16}")
    use = summary.door_use()
    q = summary.co2_quantiles
    for i, h in enumerate(summary.hours):
        band = f"{q['p5'][i]:.0f}..{q['p95'][i]:.0f}"
        print(f"{h:>4}  {summary.activities[i]:<20} {use[i]:>8.2f} {q['p50'][i]:>8.0f} {band:>16}")
    print("mean door use by activity:")
    for act in ("out_of_working_time", "lunch", "busy", "free"):
        vals = [u for u, a in zip(use, summary.activities) if a == act]
        if vals:
            print(f"  {act:<20} {np.mean(vals):.3f}  ({len(vals)} h)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, help="override the scenario master seed")
    ap.add_argument("--out", type=Path, help="write summary JSON and plot data here")
    args = ap.parse_args()

    for fname in SCENARIOS:
        cfg = load_config(ROOT / "scenarios" / fname)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        summary = run_monte_carlo(cfg, args.runs, args.workers)
        report(cfg.name, summary)
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            stem = Path(fname).stem
            write_summary(summary, args.out / f"{stem}_summary.json")
            (args.out / f"{stem}.dat").write_text(summary_plot_data(summary))


if __name__ == "__main__":
    main()
