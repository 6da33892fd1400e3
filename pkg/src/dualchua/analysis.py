"""Attractor classification, largest Lyapunov exponent and parameter sweeps."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DivergenceError, DomainError, DualChuaError, IntegrationOverflowError
from .integrate import IntegrationSettings, Trajectory, integrate, rk4_step
from .model import (
    ChuaParams,
    CircuitParams,
    State3,
    check_state,
    circuit_to_chua,
    deriv_dimensionless,
    equilibria,
)
from .synthesis import derive_dimensionless

# Perturbation applied to x (= i1 in mA) so runs leave the origin equilibrium.
DEFAULT_PERTURBATION = 1e-3


class Label(str, enum.Enum):
    DOUBLE_SCROLL = "DoubleScroll"
    SINGLE_SCROLL = "SingleScroll"
    FIXED_POINT = "FixedPoint"
    DIVERGED = "Diverged"
    UNDETERMINED = "Undetermined"

    def __str__(self):
        return self.value

    @property
    def chaotic(self) -> bool:
        return self in (Label.DOUBLE_SCROLL, Label.SINGLE_SCROLL)


@dataclass(frozen=True)
class ClassifyOptions:
    """Thresholds of the classifier; lengths are fractions of the outer equilibrium ``x_e``.

    ``chaos_threshold`` only matters when a Lyapunov estimate is supplied: a
    scroll-shaped orbit whose exponent does not exceed it is a periodic
    oscillation and is labelled ``Undetermined``.
    """

    warmup_fraction: float = 0.3
    well_radius: float = 0.5
    min_transitions: int = 5
    single_amplitude: float = 0.1
    fixed_amplitude: float = 1e-3
    chaos_threshold: float = 0.01


@dataclass(frozen=True)
class Classification:
    label: Label
    transitions: int
    amplitude: float
    occupancy: Tuple[float, float]
    x_e: Optional[float] = None
    lyapunov: Optional[float] = None

    @property
    def chaotic(self) -> bool:
        return self.label.chaotic


def _well_scale(eq) -> Optional[float]:
    if eq is None or len(eq) < 2:
        return None
    return abs(float(eq[1][0]))


def classify(
    traj: Trajectory,
    eq: Sequence[State3],
    opts: ClassifyOptions = ClassifyOptions(),
    lyapunov: Optional[float] = None,
) -> Classification:
    """Label a trajectory by how its ``x`` coordinate visits the two outer wells.

    ``eq`` is the output of :func:`equilibria`; the wells are the intervals of
    radius ``well_radius * x_e`` around ``+x_e`` and ``-x_e``.  The first
    ``warmup_fraction`` of the samples is discarded.  The ``x`` column is ``i1``
    in a physical run, so physical trajectories classify unchanged.
    """
    if len(traj) == 0:
        raise DomainError("cannot classify an empty trajectory")
    xe = _well_scale(eq)
    scale = xe if xe else 1.0
    xs = np.asarray(traj.states[:, 0], dtype=float)
    start = min(int(opts.warmup_fraction * len(xs)), len(xs) - 1)
    xs = xs[start:]
    amplitude = float(np.ptp(xs))
    if xe:
        r = opts.well_radius * xe
        wells = np.where(np.abs(xs - xe) < r, 1, np.where(np.abs(xs + xe) < r, -1, 0))
        visited = wells[wells != 0]
        transitions = int(np.count_nonzero(np.diff(visited)))
        occupancy = (float(np.mean(wells == -1)), float(np.mean(wells == 1)))
    else:
        transitions = 0
        occupancy = (0.0, 0.0)

    if traj.diverged:
        label = Label.DIVERGED
    elif amplitude < opts.fixed_amplitude * scale:
        label = Label.FIXED_POINT
    elif transitions >= opts.min_transitions:
        label = Label.DOUBLE_SCROLL
    elif (
        xe
        and transitions == 0
        and min(occupancy) == 0
        and max(occupancy) > 0
        and amplitude >= opts.single_amplitude * xe
    ):
        label = Label.SINGLE_SCROLL
    else:
        label = Label.UNDETERMINED
    if lyapunov is not None and label.chaotic and not lyapunov > opts.chaos_threshold:
        label = Label.UNDETERMINED
    return Classification(label, transitions, amplitude, occupancy, xe, lyapunov)


def jacobian_dimensionless(p: ChuaParams, s: State3) -> np.ndarray:
    """Jacobian of the dimensionless field; ``g'`` is the active segment slope."""
    a, b = p.alpha, p.beta
    d = p.g.slope_at(s[0])
    return np.array([[-a * (1 + d), a, 0.0], [1.0, -1.0, 1.0], [0.0, -b, 0.0]], dtype=float)


def jacobian_physical(c: CircuitParams, s: State3) -> np.ndarray:
    d = c.nonlinearity.slope_at(s[0])
    r0, l1, l2 = c.r0, c.l1, c.l2
    return np.array(
        [[(-r0 - d) / l1, r0 / l1, 0.0], [r0 / l2, -r0 / l2, 1 / l2], [0.0, -1 / c.c, 0.0]],
        dtype=float,
    )


def _tangent_dimensionless(p: ChuaParams, w):
    x, y, z, u, v, q = w
    a, b = p.alpha, p.beta
    gx, d = p.g.value_and_slope(x)
    return (
        a * (y - x - gx),
        x - y + z,
        -b * y,
        a * (v - u - d * u),
        u - v + q,
        -b * v,
    )


def _tangent_physical(c: CircuitParams, w):
    i1, i2, uc, u, v, q = w
    r0 = c.r0
    ui, d = c.nonlinearity.value_and_slope(i1)
    return (
        (r0 * (i2 - i1) - ui) / c.l1,
        (r0 * (i1 - i2) + uc) / c.l2,
        -i2 / c.c,
        (r0 * (v - u) - d * u) / c.l1,
        (r0 * (u - v) + q) / c.l2,
        -v / c.c,
    )


@dataclass(frozen=True)
class LyapunovOptions:
    """Benettin settings in dimensionless time (tau)."""

    step: float = 0.005
    renorm_interval: float = 1.0
    warmup: float = 100.0
    duration: float = 2000.0
    blocks: int = 3
    blowup_norm: float = 100.0

    def __post_init__(self):
        if not (self.step > 0 and self.renorm_interval >= self.step):
            raise DomainError("need 0 < step <= renorm_interval")
        if not 0 <= self.warmup < self.duration:
            raise DomainError("need 0 <= warmup < duration")
        if self.blocks < 1:
            raise DomainError("blocks must be >= 1")


@dataclass(frozen=True)
class LyapunovEstimate:
    """Mean exponent, its standard error across blocks, and the block means (per unit time)."""

    value: float
    stderr: float
    blocks: Tuple[float, ...]
    renormalizations: int


def _benettin(tangent_field, s0, step, steps_per_renorm, n_warmup, n_total, blocks, interval, limit):
    s = check_state(s0)
    w = tuple(s) + (1.0, 0.0, 0.0)
    logs: List[float] = []
    for r in range(n_total):
        try:
            for _ in range(steps_per_renorm):
                w = rk4_step(tangent_field, w, step)
        except IntegrationOverflowError as exc:
            raise DivergenceError(str(exc)) from None
        if max(abs(v) for v in w[:3]) > limit:
            raise DivergenceError(f"trajectory left the bounded region after {r} renormalizations")
        norm = math.sqrt(w[3] * w[3] + w[4] * w[4] + w[5] * w[5])
        if norm == 0:
            raise DivergenceError("tangent vector collapsed to zero")
        w = w[:3] + (w[3] / norm, w[4] / norm, w[5] / norm)
        if r >= n_warmup:
            logs.append(math.log(norm))
    arr = np.asarray(logs) / interval
    n_blocks = min(blocks, len(arr))
    block_means = tuple(float(b.mean()) for b in np.array_split(arr, n_blocks))
    stderr = float(np.std(block_means, ddof=1) / math.sqrt(n_blocks)) if n_blocks > 1 else float("nan")
    return LyapunovEstimate(float(arr.mean()), stderr, block_means, len(arr))


def _renorm_counts(opts: LyapunovOptions):
    steps = int(round(opts.renorm_interval / opts.step))
    return (
        steps,
        int(round(opts.warmup / opts.renorm_interval)),
        int(round(opts.duration / opts.renorm_interval)),
    )


def lyapunov_max(p: ChuaParams, s0: State3, opts: LyapunovOptions = LyapunovOptions()) -> LyapunovEstimate:
    """Largest Lyapunov exponent per unit tau by co-integrating one tangent vector.

    The tangent vector is renormalized every ``renorm_interval``; log growth is
    averaged after ``warmup`` up to ``duration`` (warmup included).

    Raises
    ------
    DivergenceError
        If the trajectory exceeds ``blowup_norm``.
    """
    steps, n_warm, n_total = _renorm_counts(opts)
    return _benettin(
        partial(_tangent_dimensionless, p),
        s0,
        opts.step,
        steps,
        n_warm,
        n_total,
        opts.blocks,
        opts.renorm_interval,
        opts.blowup_norm,
    )


def lyapunov_max_physical(
    c: CircuitParams, s0: State3, opts: LyapunovOptions = LyapunovOptions()
) -> LyapunovEstimate:
    """Largest exponent per second of the physical field; ``opts`` stay in tau units."""
    _, _, ts = derive_dimensionless(c)
    steps, n_warm, n_total = _renorm_counts(opts)
    return _benettin(
        partial(_tangent_physical, c),
        s0,
        opts.step * ts,
        steps,
        n_warm,
        n_total,
        opts.blocks,
        opts.renorm_interval * ts,
        opts.blowup_norm * max(1.0, c.r0),
    )


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepOptions:
    settings: IntegrationSettings = IntegrationSettings()
    classify: ClassifyOptions = ClassifyOptions()
    lyapunov: bool = False
    lyapunov_opts: LyapunovOptions = LyapunovOptions()
    perturbation: float = DEFAULT_PERTURBATION
    workers: int = 1


@dataclass(frozen=True)
class SweepPoint:
    value: float
    classification: Optional[Classification]
    lyapunov: Optional[LyapunovEstimate] = None
    error: Optional[str] = None

    @property
    def label(self) -> Optional[Label]:
        return self.classification.label if self.classification else None

    @property
    def chaotic(self) -> bool:
        return self.classification is not None and self.classification.chaotic


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    unit: str
    points: Tuple[SweepPoint, ...]
    settings: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.points]

    @property
    def labels(self) -> List[Optional[Label]]:
        return [p.label for p in self.points]

    def bands(self, predicate) -> List[Tuple[float, float]]:
        """Contiguous runs ``(first, last)`` of points satisfying ``predicate``."""
        out = []
        start = prev = None
        for p in self.points:
            if predicate(p):
                if start is None:
                    start = p.value
                prev = p.value
            elif start is not None:
                out.append((start, prev))
                start = None
        if start is not None:
            out.append((start, prev))
        return out

    def label_bands(self, label: Label) -> List[Tuple[float, float]]:
        return self.bands(lambda p: p.label == label)

    def chaotic_bands(self) -> List[Tuple[float, float]]:
        return self.bands(lambda p: p.chaotic)


def sweep_values(start, stop, step) -> List[float]:
    """``start, start + step, ...`` up to ``stop`` inclusive; empty when ``start > stop``."""
    if not step > 0:
        raise DomainError(f"sweep step must be positive, got {step!r}")
    if start > stop:
        return []
    # decimal reading of the inputs, so 4.4 + 14 * 0.1 is 5.8 and not 5.800000000000001
    a, b, d = (Fraction(repr(float(v))) for v in (start, stop, step))
    n = int((b - a) / d)
    return [float(a + k * d) for k in range(n + 1)]


def analyze_point(p: ChuaParams, s0: State3, opts: SweepOptions):
    """Integrate, classify and optionally confirm chaos with a Lyapunov estimate."""
    traj = integrate(partial(deriv_dimensionless, p), s0, opts.settings)
    eq = equilibria(p)
    cls = classify(traj, eq, opts.classify)
    est = None
    if opts.lyapunov and cls.label.chaotic:
        try:
            est = lyapunov_max(p, traj.final_state, opts.lyapunov_opts)
        except DivergenceError:
            cls = replace(cls, label=Label.DIVERGED)
        else:
            cls = classify(traj, eq, opts.classify, lyapunov=est.value)
    return cls, est


def _point(value, params: ChuaParams, s0: State3, opts: SweepOptions) -> SweepPoint:
    try:
        cls, est = analyze_point(params, s0, opts)
    except DualChuaError as exc:
        return SweepPoint(value, None, None, f"{type(exc).__name__}: {exc}")
    return SweepPoint(value, cls, est)


def _r0_point(value, base: CircuitParams, opts: SweepOptions) -> SweepPoint:
    try:
        params = circuit_to_chua(base.with_r0(value))
    except DualChuaError as exc:
        return SweepPoint(value, None, None, f"{type(exc).__name__}: {exc}")
    return _point(value, params, (opts.perturbation, 0.0, 0.0), opts)


def _ic_point(value, base: CircuitParams, opts: SweepOptions) -> SweepPoint:
    params = circuit_to_chua(base)
    return _point(value, params, (opts.perturbation, 0.0, value / base.r0), opts)


def _run(worker, values, base, opts: SweepOptions):
    fn = partial(worker, base=base, opts=opts)
    if opts.workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            return tuple(pool.map(fn, values))
    return tuple(fn(v) for v in values)


def _snapshot(opts: SweepOptions, base: CircuitParams) -> dict:
    snap = asdict(opts)
    snap["base"] = {k: getattr(base, k) for k in ("l1", "l2", "c", "r0")}
    return snap


def sweep_r0(start, stop, step, base: CircuitParams, opts: SweepOptions = SweepOptions()) -> SweepResult:
    """Sweep the linear resistor ``R0`` (kOhm) with the resistor network held fixed.

    Every point recomputes what ``R0`` touches: ``beta`` and the normalization
    ``g = u / R0``, so the dimensionless slopes drift away from the nominal
    pair as ``R0`` moves off 5 kOhm.
    """
    values = sweep_values(start, stop, step)
    return SweepResult("r0", "kOhm", _run(_r0_point, values, base, opts), _snapshot(opts, base))


def sweep_ic(start, stop, step, base: CircuitParams, opts: SweepOptions = SweepOptions()) -> SweepResult:
    """Sweep the capacitor's initial voltage ``u_C(0)`` (V); inductor currents start at the perturbation and zero."""
    values = sweep_values(start, stop, step)
    return SweepResult("uc0", "V", _run(_ic_point, values, base, opts), _snapshot(opts, base))
