"""Fixed-step classical Runge-Kutta integration.

States are plain tuples so the same code runs on floats and on
``decimal.Decimal``.  No event handling at the breakpoints of the
nonlinearity: the fields are globally Lipschitz, which keeps RK4 stable
across segment changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import DomainError, IntegrationOverflowError
from .model import State3, check_state

Field = Callable[[Sequence], Tuple]

COMPLETED = "completed"
DIVERGED = "diverged"


def _finite(v) -> bool:
    try:
        return math.isfinite(v)
    except OverflowError:
        return False


def _rk4_3(field, s, h):
    h2 = h / 2
    h6 = h / 6
    x, y, z = s
    a1, b1, c1 = field(s)
    a2, b2, c2 = field((x + h2 * a1, y + h2 * b1, z + h2 * c1))
    a3, b3, c3 = field((x + h2 * a2, y + h2 * b2, z + h2 * c2))
    a4, b4, c4 = field((x + h * a3, y + h * b3, z + h * c3))
    return (
        x + h6 * (a1 + 2 * a2 + 2 * a3 + a4),
        y + h6 * (b1 + 2 * b2 + 2 * b3 + b4),
        z + h6 * (c1 + 2 * c2 + 2 * c3 + c4),
    )


def _rk4_6(field, s, h):
    h2 = h / 2
    h6 = h / 6
    x, y, z, u, v, w = s
    a1, b1, c1, d1, e1, f1 = field(s)
    a2, b2, c2, d2, e2, f2 = field(
        (x + h2 * a1, y + h2 * b1, z + h2 * c1, u + h2 * d1, v + h2 * e1, w + h2 * f1)
    )
    a3, b3, c3, d3, e3, f3 = field(
        (x + h2 * a2, y + h2 * b2, z + h2 * c2, u + h2 * d2, v + h2 * e2, w + h2 * f2)
    )
    a4, b4, c4, d4, e4, f4 = field(
        (x + h * a3, y + h * b3, z + h * c3, u + h * d3, v + h * e3, w + h * f3)
    )
    return (
        x + h6 * (a1 + 2 * a2 + 2 * a3 + a4),
        y + h6 * (b1 + 2 * b2 + 2 * b3 + b4),
        z + h6 * (c1 + 2 * c2 + 2 * c3 + c4),
        u + h6 * (d1 + 2 * d2 + 2 * d3 + d4),
        v + h6 * (e1 + 2 * e2 + 2 * e3 + e4),
        w + h6 * (f1 + 2 * f2 + 2 * f3 + f4),
    )


def _check(out, s):
    for v in out:
        if not _finite(v):
            raise IntegrationOverflowError(f"non-finite state after RK4 step from {tuple(s)!r}")
    return out


def rk4_step(field: Field, s: Sequence, h):
    """One classical RK4 step of size ``h`` for a state of any length."""
    n = len(s)
    if n == 3:
        return _check(_rk4_3(field, s, h), s)
    if n == 6:
        return _check(_rk4_6(field, s, h), s)
    k1 = field(s)
    h2 = h / 2
    h6 = h / 6
    k2 = field(tuple(a + h2 * b for a, b in zip(s, k1)))
    k3 = field(tuple(a + h2 * b for a, b in zip(s, k2)))
    k4 = field(tuple(a + h * b for a, b in zip(s, k3)))
    out = tuple(
        a + h6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4)
    )
    return _check(out, s)


@dataclass(frozen=True)
class IntegrationSettings:
    """Step, duration and recording options, in the time unit of the field."""

    step: float = 0.005
    duration: float = 500.0
    record_stride: int = 1
    blowup_norm: float = 100.0

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"step must be positive, got {self.step!r}")
        if not self.duration >= self.step:
            raise DomainError("duration must be at least one step")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise DomainError("record_stride must be a positive integer")
        if not self.blowup_norm > 0:
            raise DomainError("blowup_norm must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))

    def rescaled(self, time_scale, blowup_norm=None) -> "IntegrationSettings":
        """Same run expressed in another time unit (e.g. seconds = tau * time_scale)."""
        return IntegrationSettings(
            self.step * time_scale,
            self.duration * time_scale,
            self.record_stride,
            self.blowup_norm if blowup_norm is None else blowup_norm,
        )


@dataclass(frozen=True)
class Trajectory:
    """Recorded states at uniformly spaced times.

    ``times`` has shape ``(n,)`` and ``states`` shape ``(n, 3)``; both are float
    arrays for float runs and object arrays for extended-precision runs.
    """

    times: np.ndarray
    states: np.ndarray
    status: str = COMPLETED

    def __len__(self):
        return len(self.times)

    @property
    def diverged(self) -> bool:
        return self.status == DIVERGED

    @property
    def terminated_early(self) -> bool:
        return self.status != COMPLETED

    @property
    def final_state(self):
        return tuple(self.states[-1])

    def negated(self) -> "Trajectory":
        return Trajectory(self.times, -self.states, self.status)

    def mapped(self, fn: Callable[[Sequence], Sequence], time_fn: Callable = None) -> "Trajectory":
        """Apply a pointwise state map (and optionally a time map)."""
        states = np.array([tuple(fn(tuple(s))) for s in self.states], dtype=self.states.dtype)
        times = self.times if time_fn is None else np.array([time_fn(t) for t in self.times], dtype=self.times.dtype)
        return Trajectory(times, states, self.status)


def integrate(field: Field, s0: Sequence, settings: IntegrationSettings, t0=0) -> Trajectory:
    """Integrate ``field`` from ``s0`` with fixed RK4 steps.

    The initial state is always recorded, then every ``record_stride``-th step.
    The run stops early, flagged ``diverged``, when the max-norm of the state
    exceeds ``settings.blowup_norm`` or a step overflows.
    """
    s = check_state(s0)
    h = settings.step
    stride = int(settings.record_stride)
    limit = settings.blowup_norm
    times = [t0 + 0 * h]
    states = [s]
    status = COMPLETED
    for i in range(1, settings.n_steps + 1):
        try:
            s = rk4_step(field, s, h)
        except IntegrationOverflowError:
            status = DIVERGED
            break
        blown = max(abs(v) for v in s) > limit
        if i % stride == 0:
            times.append(t0 + i * h)
            states.append(s)
        if blown:
            status = DIVERGED
            break
    is_float = all(isinstance(v, (float, int)) for v in states[0])
    dtype = float if is_float else object
    return Trajectory(np.array(times, dtype=dtype), np.array(states, dtype=dtype), status)
