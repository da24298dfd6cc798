"""Neutral-plane height and door flows against the zone/corridor temperature gap."""

import argparse

import numpy as np

from occusim import physics as ph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corridor", type=float, default=19.0, help="corridor temperature, degC")
    ap.add_argument("--width", type=float, default=0.9)
    ap.add_argument("--height", type=float, default=2.0)
    ap.add_argument("--cd", type=float, default=0.6)
    args = ap.parse_args()

    geom = ph.OpeningGeometry(args.width, args.height, args.cd)
    t_corr = ph.celsius_to_kelvin(args.corridor)
    print(f"{'dT [K]':>7} {'HN [m]':>8} {'Q_in':>8} {'Q_out':>8}  [m3/s], fully open")
    for dT in np.r_[-10:-0.5:2.0, 0.0, 1:11:1.0]:
        sides = ph.AirSides.from_temperatures(t_corr + dT, t_corr)
        f = ph.door_flows(geom, sides)
        print(f"{dT:>7.1f} {f.neutral_height:>8.4f} {f.q_in:>8.4f} {f.q_out:>8.4f}")


if __name__ == "__main__":
    main()
