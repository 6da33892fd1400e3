"""CSV and SVG output for trajectories."""

from __future__ import annotations

import io
import os
import tempfile
from typing import Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError
from .integrate import Trajectory

DIMENSIONLESS = "dimensionless"
PHYSICAL = "physical"

HEADERS = {
    DIMENSIONLESS: ("tau", "x", "y", "z"),
    PHYSICAL: ("t_s", "i1_mA", "i2_mA", "uC_V"),
}

AXIS_LABELS = {
    DIMENSIONLESS: ("x", "y", "z"),
    PHYSICAL: ("i1 (mA)", "i2 (mA)", "uC (V)"),
}


def _fmt(v) -> str:
    # repr of a float is the shortest string that reads back to the same double
    return repr(float(v)) if isinstance(v, (float, np.floating, int)) else str(v)


def export_csv(traj: Trajectory, mode: str = DIMENSIONLESS) -> str:
    """Trajectory as CSV text: header, one row per sample, then a ``# status=...`` line."""
    if len(traj) == 0:
        raise DomainError("cannot export an empty trajectory")
    try:
        header = HEADERS[mode]
    except KeyError:
        raise DomainError(f"unknown mode {mode!r}") from None
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for t, (a, b, c) in zip(traj.times, traj.states):
        buf.write(f"{_fmt(t)},{_fmt(a)},{_fmt(b)},{_fmt(c)}\n")
    buf.write(f"# status={traj.status}\n")
    return buf.getvalue()


def read_csv(text: str) -> Tuple[Tuple[str, ...], Trajectory]:
    """Parse the output of :func:`export_csv` back into ``(header, trajectory)``."""
    lines = text.splitlines()
    header = tuple(lines[0].split(","))
    rows = []
    status = "completed"
    for line in lines[1:]:
        if line.startswith("#"):
            if line.startswith("# status="):
                status = line.split("=", 1)[1].strip()
            continue
        if line:
            rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows, dtype=float).reshape(-1, 4)
    return header, Trajectory(arr[:, 0].copy(), arr[:, 1:].copy(), status)


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _range(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    if span == 0:
        pad = max(abs(lo), 1.0) * 0.05
    else:
        pad = 0.05 * span
    return lo - pad, hi + pad


def render_svg(
    traj: Trajectory,
    projection: Tuple[int, int] = (0, 1),
    size: Tuple[int, int] = (640, 480),
    labels: Optional[Sequence[str]] = None,
    title: Optional[str] = None,
) -> str:
    """Phase portrait of two state components as a standalone SVG document.

    The projected data range is padded by 5% on every side.  The axis ends carry
    text labels with the plotted data range so the picture can be read back.
    """
    if len(traj) == 0:
        raise DomainError("cannot render an empty trajectory")
    i, j = projection
    if not {i, j} <= {0, 1, 2} or i == j:
        raise DomainError(f"invalid projection {projection!r}")
    labels = AXIS_LABELS[DIMENSIONLESS] if labels is None else labels
    width, height = size
    left, right, top, bottom = 60, 20, 30 if title else 20, 45
    pw, ph = width - left - right, height - top - bottom
    xs = np.asarray(traj.states[:, i], dtype=float)
    ys = np.asarray(traj.states[:, j], dtype=float)
    x0, x1 = _range(xs)
    y0, y1 = _range(ys)
    px = left + (xs - x0) / (x1 - x0) * pw
    py = top + ph - (ys - y0) / (y1 - y0) * ph
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<g font-family="sans-serif" font-size="12" fill="black">',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text class="xmin" x="{left}" y="{top + ph + 15}" text-anchor="start">{x0:.6g}</text>',
        f'<text class="xmax" x="{left + pw}" y="{top + ph + 15}" text-anchor="end">{x1:.6g}</text>',
        f'<text class="ymin" x="{left - 4}" y="{top + ph}" text-anchor="end">{y0:.6g}</text>',
        f'<text class="ymax" x="{left - 4}" y="{top + 10}" text-anchor="end">{y1:.6g}</text>',
        f'<text class="xlabel" x="{left + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">'
        f"{escape(labels[i])}</text>",
        f'<text class="ylabel" x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(labels[j])}</text>',
    ]
    if title:
        out.append(f'<text class="title" x="{width / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    out.append('</g>')
    out.append(f'<g><polyline fill="none" stroke="steelblue" stroke-width="0.6" points="{points}"/></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
