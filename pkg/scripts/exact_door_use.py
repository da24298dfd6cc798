"""Exact hourly door use from forward filtering, next to a sampled estimate.

Only the calendar (activity, period of day) is observed; presence, visitors and
CO2 level are summed out through their CPTs. The sampled column comes from full
co-simulation, where CO2 is observed, so the two differ where CO2 feeds back.
"""

import argparse
from pathlib import Path

from occusim.bn import Distribution, filter_step
from occusim.cosim import run_monte_carlo
from occusim.io import load_config
from occusim.occupant import period_of_day

ROOT = Path(__file__).resolve().parents[1]


def exact_use(cfg):
    belief = Distribution.point_mass({"door_state": cfg.behaviour.initial_door_state.value})
    out = []
    for step in range(24):
        h = (cfg.start_hour + step) % 24
        ev = {"activity": cfg.calendar.activity_at(h).value, "period_of_day": period_of_day(h)}
        belief = filter_step(cfg.dbn, belief, ev)
        out.append(1.0 - belief["always_closed"])
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenario", nargs="?", default=str(ROOT / "scenarios" / "workday1.json"))
    ap.add_argument("--runs", type=int, default=200)
    args = ap.parse_args()

    cfg = load_config(args.scenario)
    exact = exact_use(cfg)
    sampled = run_monte_carlo(cfg, args.runs).door_use()
    print(f"{'hour':>4}  {'activity':<20} {'exact':>6} {'sampled':>8}")
    for h in range(24):
        print(f"{h:>4}  {cfg.calendar.activity_at(h).value:<20} {exact[h]:>6.3f} {sampled[h]:>8.3f}")


if __name__ == "__main__":
    main()
