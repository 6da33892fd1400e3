"""Sweep the linear resistor R0 with the resistor network held fixed.

Writes one CSV row per point and prints the DoubleScroll / SingleScroll bands.
"""

import argparse
import csv
import sys

from dualchua import Label, SweepOptions, preset, sweep_r0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--from", dest="start", type=float, default=4300.0, help="Ohm")
    ap.add_argument("--to", dest="stop", type=float, default=6100.0, help="Ohm")
    ap.add_argument("--step", type=float, default=25.0, help="Ohm")
    ap.add_argument("--no-lyapunov", action="store_true", help="geometric labels only")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="r0_window.csv")
    args = ap.parse_args()

    opts = SweepOptions(lyapunov=not args.no_lyapunov, workers=args.workers)
    res = sweep_r0(args.start / 1000, args.stop / 1000, args.step / 1000, preset("multisim"), opts)

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r0_ohm", "label", "lambda1", "transitions"])
        for p in res.points:
            lam = "" if p.lyapunov is None else f"{p.lyapunov.value:.4f}"
            w.writerow([f"{p.value * 1000:g}", p.label or p.error, lam,
                        "" if p.classification is None else p.classification.transitions])

    for label in (Label.DOUBLE_SCROLL, Label.SINGLE_SCROLL):
        bands = ", ".join(f"[{a * 1000:g}, {b * 1000:g}]" for a, b in res.label_bands(label)) or "none"
        print(f"{label}: {bands} Ohm")
    print("reference window: DoubleScroll 4626-5970 Ohm, SingleScroll 4526-4625 Ohm", file=sys.stderr)


if __name__ == "__main__":
    main()
