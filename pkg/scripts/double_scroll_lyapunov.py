"""Largest Lyapunov exponent at alpha = 8, beta = 12.5, in tau and in seconds."""

import argparse

from dualchua import ChuaParams, LyapunovOptions, lyapunov_max, lyapunov_max_physical, preset
from dualchua.synthesis import derive_dimensionless


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=2000.0)
    ap.add_argument("--blocks", type=int, default=3)
    args = ap.parse_args()
    opts = LyapunovOptions(duration=args.duration, blocks=args.blocks)

    est = lyapunov_max(ChuaParams(8.0, 12.5), (1e-3, 0.0, 0.0), opts)
    print(f"lambda1 = {est.value:.4f} +- {est.stderr:.4f} per tau, blocks {[round(b, 4) for b in est.blocks]}")

    c = preset("multisim")
    _, _, ts = derive_dimensionless(c)
    phys = lyapunov_max_physical(c, (1e-3, 0.0, 0.0), opts)
    print(f"lambda1 = {phys.value:.1f} +- {phys.stderr:.1f} per second (x time_scale = {phys.value * ts:.4f})")


if __name__ == "__main__":
    main()
