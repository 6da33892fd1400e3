"""Nonlinearities, vector fields and fixed points of the dual Chua oscillator.

Two equivalent descriptions of the same circuit live here:

* the dimensionless system in ``(x, y, z)`` with parameters ``alpha``, ``beta``
  and the odd piecewise-linear nonlinearity ``g``;
* the physical state equations in ``(i1, i2, u_C)`` for two inductors, one
  capacitor, a linear resistor ``R0`` and a series pair of current-controlled
  op-amp resistors.

Physical quantities use rescaled units throughout: kOhm, mA, kH, mF, V and
seconds.  With those units the milliampere-level circuit is numerically the
dimensionless system, ``x = i1``, ``y = i2``, ``z = u_C / R0``.

Every function is written against plain arithmetic so that ``float`` and
``decimal.Decimal`` values both work; extended precision is what makes
long-horizon comparisons of chaotic trajectories meaningful.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Callable, Sequence, Tuple

from .errors import ConfigurationError, DegenerateParameterError, DomainError

State3 = Tuple[float, float, float]

# Supply headroom of the op amps: u_sat = V_CC - headroom.
DEFAULT_HEADROOM = 1.6


def _is_finite(v) -> bool:
    try:
        return math.isfinite(v)
    except (TypeError, OverflowError):
        return False


@dataclass(frozen=True)
class PwlOddFunction:
    """Odd, continuous, piecewise-linear scalar function.

    ``breakpoints`` are the positive-side break abscissae in increasing order and
    ``slopes`` hold one slope per segment, from the origin outward.  Intercepts
    follow from continuity and are never supplied by the caller.  Exactly at a
    breakpoint the inner segment is used; both formulas agree there.
    """

    breakpoints: Tuple[float, ...]
    slopes: Tuple[float, ...]
    intercepts: Tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(self.breakpoints)
        slopes = tuple(self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)
        if len(slopes) != len(bps) + 1:
            raise ConfigurationError(
                f"need {len(bps) + 1} slopes for {len(bps)} breakpoints, got {len(slopes)}"
            )
        if not all(_is_finite(v) for v in bps + slopes):
            raise ConfigurationError("breakpoints and slopes must be finite")
        if bps and bps[0] <= 0:
            raise ConfigurationError("breakpoints must be positive")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ConfigurationError("breakpoints must be strictly increasing")
        acc = slopes[0] * 0
        intercepts = [acc]
        for k, b in enumerate(bps):
            acc = acc + (slopes[k] - slopes[k + 1]) * b
            intercepts.append(acc)
        object.__setattr__(self, "intercepts", tuple(intercepts))

    def segment_index(self, x) -> int:
        """Index of the segment active at ``x`` (inner segment at a tie)."""
        return bisect_left(self.breakpoints, abs(x))

    def __call__(self, x):
        a = abs(x)
        k = bisect_left(self.breakpoints, a)
        v = self.slopes[k] * a + self.intercepts[k]
        return v if x >= 0 else -v

    def slope_at(self, x):
        return self.slopes[bisect_left(self.breakpoints, abs(x))]

    def value_and_slope(self, x):
        a = abs(x)
        k = bisect_left(self.breakpoints, a)
        v = self.slopes[k] * a + self.intercepts[k]
        return (v if x >= 0 else -v), self.slopes[k]

    def scaled(self, factor) -> "PwlOddFunction":
        """Return ``factor * f`` (breakpoints unchanged)."""
        return PwlOddFunction(self.breakpoints, tuple(s * factor for s in self.slopes))

    def divided(self, divisor) -> "PwlOddFunction":
        return PwlOddFunction(self.breakpoints, tuple(s / divisor for s in self.slopes))

    def converted(self, conv: Callable) -> "PwlOddFunction":
        return PwlOddFunction(
            tuple(conv(b) for b in self.breakpoints), tuple(conv(s) for s in self.slopes)
        )


def three_segment(m0=-0.6, m1=-1.2, breakpoint=1.0) -> PwlOddFunction:
    """Classic Chua nonlinearity: slope ``m1`` inside ``|x| <= breakpoint``, ``m0`` outside."""
    return PwlOddFunction((breakpoint,), (m1, m0))


def eval_pwl(f: PwlOddFunction, x):
    if not _is_finite(x):
        raise DomainError(f"non-finite argument {x!r}")
    return f(x)


@dataclass(frozen=True)
class ChuaParams:
    """Dimensionless parameters: ``alpha``, ``beta`` and the nonlinearity ``g``."""

    alpha: float
    beta: float
    g: PwlOddFunction = field(default_factory=three_segment)

    def __post_init__(self):
        if not (_is_finite(self.alpha) and self.alpha > 0):
            raise ConfigurationError(f"alpha must be positive, got {self.alpha!r}")
        if not (_is_finite(self.beta) and self.beta > 0):
            raise ConfigurationError(f"beta must be positive, got {self.beta!r}")

    @property
    def m1(self):
        """Inner slope of ``g``."""
        return self.g.slopes[0]

    @property
    def m0(self):
        """Slope of the first outer segment of ``g``."""
        return self.g.slopes[1] if len(self.g.slopes) > 1 else self.g.slopes[0]

    def converted(self, conv: Callable) -> "ChuaParams":
        return ChuaParams(conv(self.alpha), conv(self.beta), self.g.converted(conv))


@dataclass(frozen=True)
class OpAmpResistor:
    """Current-controlled nonlinear resistor built from one op amp and three resistors.

    Resistances in kOhm, ``u_sat`` in volts.  In the linear band the terminal
    voltage is ``-(r_b * r_f / r_a) * i``; in saturation it is ``r_f * i -+ u_sat``.
    """

    r_f: float
    r_a: float
    r_b: float
    u_sat: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (_is_finite(v) and v > 0):
                raise ConfigurationError(f"{f.name} must be positive, got {v!r}")

    @classmethod
    def from_supply(cls, r_f, r_a, r_b, vcc, headroom=DEFAULT_HEADROOM) -> "OpAmpResistor":
        """Build a resistor whose op amp saturates ``headroom`` volts below its supply."""
        if isinstance(vcc, float) or isinstance(headroom, float):
            # 4.6 - 1.6 must give 3.0, not 2.9999999999999996
            u_sat = float(Fraction(repr(vcc)) - Fraction(repr(headroom)))
        else:
            u_sat = vcc - headroom
        if not u_sat > 0:
            raise ConfigurationError(
                f"supply {vcc!r} V leaves no output swing with {headroom!r} V headroom"
            )
        return cls(r_f, r_a, r_b, u_sat)

    @property
    def linear_slope(self):
        """Slope of the linear band, ``-r_b * r_f / r_a`` (kOhm)."""
        return -self.r_b * self.r_f / self.r_a

    @property
    def band_edge(self):
        """Current ``i_p`` (mA) where the op amp enters saturation."""
        return self.u_sat * self.r_a / (self.r_f * (self.r_a + self.r_b))

    @property
    def inflection_voltage(self):
        """Voltage ``u_p = r_b / (r_a + r_b) * u_sat`` at the non-inverting input at the band edge."""
        return self.r_b / (self.r_a + self.r_b) * self.u_sat

    def characteristic(self) -> PwlOddFunction:
        return PwlOddFunction((self.band_edge,), (self.linear_slope, self.r_f))

    def converted(self, conv: Callable) -> "OpAmpResistor":
        return OpAmpResistor(conv(self.r_f), conv(self.r_a), conv(self.r_b), conv(self.u_sat))


def resistor_voltage(r: OpAmpResistor, i_r):
    """Terminal voltage (V) of ``r`` carrying current ``i_r`` (mA)."""
    if not _is_finite(i_r):
        raise DomainError(f"non-finite current {i_r!r}")
    a = abs(i_r)
    if a <= r.band_edge:
        v = r.linear_slope * a
    else:
        v = r.r_f * a - r.u_sat
    return v if i_r >= 0 else -v


def _combine(r1: OpAmpResistor, r2: OpAmpResistor) -> PwlOddFunction:
    ip1, ip2 = r1.band_edge, r2.band_edge
    if not ip2 < ip1:
        raise ConfigurationError(
            f"resistor2 must saturate first: band edges {ip2!r} mA (r2) vs {ip1!r} mA (r1)"
        )
    k1, k2 = r1.linear_slope, r2.linear_slope
    return PwlOddFunction((ip2, ip1), (k1 + k2, k1 + r2.r_f, r1.r_f + r2.r_f))


@dataclass(frozen=True)
class CircuitParams:
    """Physical component values in rescaled units (kH, mF, kOhm)."""

    l1: float
    l2: float
    c: float
    r0: float
    resistor1: OpAmpResistor
    resistor2: OpAmpResistor
    nonlinearity: PwlOddFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("l1", "l2", "c", "r0"):
            v = getattr(self, name)
            if not (_is_finite(v) and v > 0):
                raise ConfigurationError(f"{name} must be positive, got {v!r}")
        object.__setattr__(self, "nonlinearity", _combine(self.resistor1, self.resistor2))

    def with_r0(self, r0) -> "CircuitParams":
        return replace(self, r0=r0)

    def converted(self, conv: Callable) -> "CircuitParams":
        """Copy with every scalar passed through ``conv`` (e.g. to ``Decimal``)."""
        return CircuitParams(
            conv(self.l1),
            conv(self.l2),
            conv(self.c),
            conv(self.r0),
            self.resistor1.converted(conv),
            self.resistor2.converted(conv),
        )


def combined_resistor(c: CircuitParams) -> PwlOddFunction:
    """Five-segment characteristic ``u(i1) = u_R1(i1) + u_R2(i1)`` in volts over mA."""
    return _combine(c.resistor1, c.resistor2)


def normalized_nonlinearity(c: CircuitParams) -> PwlOddFunction:
    """``g(i1) = u(i1) / R0``: the dimensionless image of the combined resistor."""
    return c.nonlinearity.divided(c.r0)


def deriv_dimensionless(p: ChuaParams, s: State3) -> State3:
    x, y, z = s
    return (p.alpha * (y - x - p.g(x)), x - y + z, -p.beta * y)


def deriv_physical(c: CircuitParams, s: State3) -> State3:
    """Time derivatives ``(di1/dt, di2/dt, du_C/dt)`` in mA/s and V/s."""
    i1, i2, uc = s
    r0 = c.r0
    return (
        (r0 * (i2 - i1) - c.nonlinearity(i1)) / c.l1,
        (r0 * (i1 - i2) + uc) / c.l2,
        -i2 / c.c,
    )


def equilibria(p: ChuaParams) -> Tuple[State3, ...]:
    """Fixed points of the dimensionless field, origin first, then ``(+x_e, 0, -x_e)``, ``(-x_e, 0, +x_e)``.

    Any fixed point satisfies ``y = 0``, ``z = -x`` and ``g(x) = -x``.  Each outer
    segment is solved for that intersection; a pair is returned only when the
    solution falls inside its own segment.

    Raises
    ------
    DegenerateParameterError
        If the first outer slope equals -1, so the outer segment is parallel to
        the line ``g = -x``.
    """
    g = p.g
    zero = g.slopes[0] - g.slopes[0]
    points = [(zero, zero, zero)]
    if len(g.slopes) > 1 and g.slopes[1] + 1 == 0:
        raise DegenerateParameterError("first outer slope m0 = -1 leaves no isolated outer equilibrium")
    for k in range(1, len(g.slopes)):
        denom = g.slopes[k] + 1
        if denom == 0:
            continue
        xe = -g.intercepts[k] / denom
        lo = g.breakpoints[k - 1]
        hi = g.breakpoints[k] if k < len(g.breakpoints) else None
        if xe > lo and (hi is None or xe <= hi):
            points.append((xe, zero, -xe))
            points.append((-xe, zero, xe))
    return tuple(points)


def outer_equilibrium(p: ChuaParams):
    """Positive ``x`` of the innermost outer equilibrium, or ``None`` if there is none."""
    pts = equilibria(p)
    return pts[1][0] if len(pts) > 1 else None


def circuit_to_chua(c: CircuitParams) -> ChuaParams:
    """Dimensionless parameters of a circuit, with the five-segment ``g = u / R0``."""
    return ChuaParams(c.l2 / c.l1, c.l2 / (c.c * c.r0 * c.r0), normalized_nonlinearity(c))


def physical_to_dimensionless(c: CircuitParams, s: State3) -> State3:
    i1, i2, uc = s
    return (i1, i2, uc / c.r0)


def dimensionless_to_physical(c: CircuitParams, s: State3) -> State3:
    x, y, z = s
    return (x, y, z * c.r0)


def check_state(s: Sequence) -> State3:
    if len(s) != 3:
        raise DomainError(f"state must have 3 components, got {len(s)}")
    if not all(_is_finite(v) for v in s):
        raise DomainError(f"state has non-finite components: {tuple(s)!r}")
    return tuple(s)
