"""Phase portraits at the reference operating points as SVG files."""

import argparse
import os
from functools import partial

from dualchua import IntegrationSettings, deriv_physical, integrate, preset, render_svg
from dualchua.export import AXIS_LABELS, PHYSICAL, write_atomic
from dualchua.synthesis import derive_dimensionless

CASES = [
    ("double_scroll_5000", 5.0, 0.0),
    ("single_scroll_4600", 4.6, 0.0),
    ("uc0_minus_11p91", 5.0, -11.91),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="portraits")
    ap.add_argument("--tau-end", type=float, default=500.0)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    for name, r0, uc0 in CASES:
        c = preset("multisim").with_r0(r0)
        _, _, ts = derive_dimensionless(c)
        cfg = IntegrationSettings(duration=args.tau_end, record_stride=4).rescaled(ts, blowup_norm=500.0)
        traj = integrate(partial(deriv_physical, c), (1e-3, 0.0, uc0), cfg)
        path = os.path.join(args.outdir, name + ".svg")
        write_atomic(path, render_svg(traj, (0, 1), labels=AXIS_LABELS[PHYSICAL],
                                      title=f"R0 = {r0 * 1000:g} Ohm, uC(0) = {uc0:g} V"))
        print(path, traj.status, len(traj))


if __name__ == "__main__":
    main()
