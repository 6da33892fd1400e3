"""Sweep the capacitor's initial voltage u_C(0) with zero inductor currents.

Prints the chaotic band and, for points outside it, what the orbit settled on.
"""

import argparse

from dualchua import SweepOptions, preset, sweep_ic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--from", dest="start", type=float, default=-13.0, help="V")
    ap.add_argument("--to", dest="stop", type=float, default=13.0, help="V")
    ap.add_argument("--step", type=float, default=0.25, help="V")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    res = sweep_ic(args.start, args.stop, args.step, preset("multisim"), SweepOptions(lyapunov=True,
                                                                                   workers=args.workers))
    for p in res.points:
        c = p.classification
        lam = "-" if p.lyapunov is None else f"{p.lyapunov.value:+.3f}"
        print(f"{p.value:+7.2f} V  {str(p.label):13s} lambda1 {lam:>7s}  transitions {c.transitions:4d}  "
              f"amplitude {c.amplitude:6.3f}")
    print("chaotic:", ", ".join(f"[{a:g}, {b:g}] V" for a, b in res.chaotic_bands()) or "none")


if __name__ == "__main__":
    main()
