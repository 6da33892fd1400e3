"""Unit rescaling, dimensionless parameters and resistor-network synthesis.

The combined resistor has five segments.  With ``K_j = R_bj * R_fj / R_aj`` its
slopes divided by ``R0`` are, from the outside in::

    S1, S5 : (R_f1 + R_f2) / R0            outer, both op amps saturated
    S2, S4 : (R_f2 - K_1) / R0   = m0      op amp 2 saturated
    S3     : -(K_1 + K_2) / R0   = m1      both linear

Synthesis inverts these three relations for ``R_b1`` and ``R_b2`` after the
free choices (``R_f`` split, ``R_a1``, ``R_a2``) are fixed, then sizes the supply
of op amp 2 so that it saturates at the requested inner breakpoint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .errors import DomainError, InfeasibleRequestError, UnknownPresetError
from .model import DEFAULT_HEADROOM, CircuitParams, OpAmpResistor


class Quantity(enum.Enum):
    VOLTAGE = "voltage"
    CURRENT = "current"
    RESISTANCE = "resistance"
    CAPACITANCE = "capacitance"
    INDUCTANCE = "inductance"
    TIME = "time"


# rescaled = SI * factor
_FACTORS: Dict[Quantity, Fraction] = {
    Quantity.VOLTAGE: Fraction(1),
    Quantity.CURRENT: Fraction(1000),
    Quantity.RESISTANCE: Fraction(1, 1000),
    Quantity.CAPACITANCE: Fraction(1000),
    Quantity.INDUCTANCE: Fraction(1, 1000),
    Quantity.TIME: Fraction(1),
}

UNITS = {
    Quantity.VOLTAGE: ("V", "V"),
    Quantity.CURRENT: ("A", "mA"),
    Quantity.RESISTANCE: ("Ohm", "kOhm"),
    Quantity.CAPACITANCE: ("F", "mF"),
    Quantity.INDUCTANCE: ("H", "kH"),
    Quantity.TIME: ("s", "s"),
}


def _quantity(q) -> Quantity:
    if isinstance(q, Quantity):
        return q
    try:
        return Quantity(str(q).lower())
    except ValueError:
        raise DomainError(f"unknown quantity {q!r}") from None


@dataclass(frozen=True)
class RescaledValue:
    """A magnitude in rescaled units; stored exactly so the SI round trip is lossless."""

    magnitude: Fraction
    quantity: Quantity

    def __float__(self):
        return float(self.magnitude)

    @property
    def unit(self) -> str:
        return UNITS[self.quantity][1]

    def to_si(self) -> float:
        return float(self.magnitude / _FACTORS[self.quantity])


def rescale(si_value, quantity) -> RescaledValue:
    """Convert an SI value to rescaled units (A -> mA, Ohm -> kOhm, F -> mF, H -> kH)."""
    q = _quantity(quantity)
    return RescaledValue(Fraction(si_value) * _FACTORS[q], q)


def to_si(value, quantity) -> float:
    """Inverse of :func:`rescale` for a plain rescaled number."""
    q = _quantity(quantity)
    return float(Fraction(value) / _FACTORS[q])


def derive_dimensionless(c: CircuitParams) -> Tuple[float, float, float]:
    """Return ``(alpha, beta, time_scale)`` for a circuit.

    ``time_scale`` is the number of seconds per unit of dimensionless time,
    ``L2 / R0`` evaluated in rescaled units (kH / kOhm = s).
    """
    alpha = c.l2 / c.l1
    beta = c.l2 / (c.c * c.r0 * c.r0)
    return alpha, beta, c.l2 / c.r0


@dataclass(frozen=True)
class SynthesisRequest:
    """Target slopes and free choices for the two-op-amp network.

    ``rf_split`` is the fraction of the total feedback resistance assigned to op
    amp 1.  Resistances in kOhm, currents in mA, voltages in V.
    """

    m0: float = -0.6
    m1: float = -1.2
    s_out: float = 0.6
    r0: float = 5.0
    i_break: float = 1.0
    rf_split: float = 0.5
    r_a1: float = 6.0
    r_a2: float = 10.0
    v_headroom: float = DEFAULT_HEADROOM
    vcc1: float = 18.0

    def __post_init__(self):
        if not self.m1 < self.m0 < 0 < self.s_out:
            raise InfeasibleRequestError(
                f"slopes must satisfy m1 < m0 < 0 < s_out, got m1={self.m1}, m0={self.m0}, s_out={self.s_out}"
            )
        if not self.i_break > 0:
            raise DomainError("i_break must be positive")
        if not 0 < self.rf_split < 1:
            raise DomainError("rf_split must lie strictly between 0 and 1")
        for name in ("r0", "r_a1", "r_a2", "v_headroom", "vcc1"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class SegmentReport:
    """Dimensionless slopes S1..S5 and the two positive breakpoints (mA)."""

    slopes: Tuple[float, float, float, float, float]
    inner_breakpoint: float
    outer_breakpoint: float


@dataclass(frozen=True)
class SynthesisResult:
    resistor1: OpAmpResistor
    resistor2: OpAmpResistor
    vcc1: float
    vcc2: float
    inner_breakpoint: float
    outer_breakpoint: float
    slopes: Tuple[float, float, float, float, float]

    def circuit(self, l1, l2, c, r0) -> CircuitParams:
        return CircuitParams(l1, l2, c, r0, self.resistor1, self.resistor2)


def _q(v) -> Fraction:
    # decimal reading of the input, so 0.6 means 3/5
    return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)


def _slopes_exact(r0, r1: OpAmpResistor, r2: OpAmpResistor):
    r0 = _q(r0)
    rf1, ra1, rb1 = _q(r1.r_f), _q(r1.r_a), _q(r1.r_b)
    rf2, ra2, rb2 = _q(r2.r_f), _q(r2.r_a), _q(r2.r_b)
    k1 = rb1 * rf1 / ra1
    k2 = rb2 * rf2 / ra2
    outer = (rf1 + rf2) / r0
    mid = (rf2 - k1) / r0
    inner = -(k1 + k2) / r0
    return (outer, mid, inner, mid, outer)


def _band_edge_exact(r: OpAmpResistor) -> Fraction:
    rf, ra, rb = _q(r.r_f), _q(r.r_a), _q(r.r_b)
    return _q(r.u_sat) * ra / (rf * (ra + rb))


def verify_network(c: CircuitParams) -> SegmentReport:
    """Segment slopes over ``R0`` and breakpoints of a circuit's combined resistor.

    Arithmetic is rational on the decimal values of the inputs, so the nominal
    network reproduces its nominal slopes exactly.
    """
    slopes = _slopes_exact(c.r0, c.resistor1, c.resistor2)
    return SegmentReport(
        tuple(float(s) for s in slopes),
        float(_band_edge_exact(c.resistor2)),
        float(_band_edge_exact(c.resistor1)),
    )


def synthesize_network(req: SynthesisRequest) -> SynthesisResult:
    r0 = _q(req.r0)
    rf_total = _q(req.s_out) * r0
    rf1 = _q(req.rf_split) * rf_total
    rf2 = rf_total - rf1
    ra1, ra2 = _q(req.r_a1), _q(req.r_a2)
    k1 = rf2 - _q(req.m0) * r0
    k2 = -_q(req.m1) * r0 - k1
    if k1 <= 0 or k2 <= 0:
        raise InfeasibleRequestError(
            f"no positive R_b for m0={req.m0}, m1={req.m1}, s_out={req.s_out}: "
            f"R_b1*R_f1/R_a1 = {float(k1):g} kOhm, R_b2*R_f2/R_a2 = {float(k2):g} kOhm"
        )
    rb1 = k1 * ra1 / rf1
    rb2 = k2 * ra2 / rf2
    usat2 = _q(req.i_break) * rf2 * (ra2 + rb2) / ra2
    vcc2 = usat2 + _q(req.v_headroom)
    usat1 = _q(req.vcc1) - _q(req.v_headroom)
    if usat1 <= 0:
        raise InfeasibleRequestError(f"vcc1={req.vcc1} V leaves no output swing")
    resistor1 = OpAmpResistor(float(rf1), float(ra1), float(rb1), float(usat1))
    resistor2 = OpAmpResistor(float(rf2), float(ra2), float(rb2), float(usat2))
    outer = usat1 * ra1 / (rf1 * (ra1 + rb1))
    if outer <= _q(req.i_break):
        raise InfeasibleRequestError(
            f"op amp 1 saturates at {float(outer):.4g} mA, inside the requested "
            f"inner breakpoint {req.i_break} mA; raise vcc1"
        )
    slopes = tuple(float(s) for s in _slopes_exact(req.r0, resistor1, resistor2))
    return SynthesisResult(
        resistor1, resistor2, float(req.vcc1), float(vcc2), float(req.i_break), float(outer), slopes
    )


def nominal_network(vcc1=18.0, vcc2=4.6, headroom=DEFAULT_HEADROOM) -> Tuple[OpAmpResistor, OpAmpResistor]:
    r1 = OpAmpResistor.from_supply(1.5, 6.0, 18.0, vcc1, headroom)
    r2 = OpAmpResistor.from_supply(1.5, 10.0, 10.0, vcc2, headroom)
    return r1, r2


def _from_si(l1_h, l2_h, c_f, r0_ohm):
    return (
        float(rescale(l1_h, Quantity.INDUCTANCE)),
        float(rescale(l2_h, Quantity.INDUCTANCE)),
        float(rescale(c_f, Quantity.CAPACITANCE)),
        float(rescale(r0_ohm, Quantity.RESISTANCE)),
    )


# l1, l2, c, r0 in kH, kH, mF, kOhm
_PRESETS = {
    "multisim": (5e-5, 4e-4, 1.28e-6, 5.0),
    "experimental": _from_si(1.2e-3, 10e-3, 86e-12, 5000),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, vcc1=18.0, vcc2=4.6, headroom=DEFAULT_HEADROOM) -> CircuitParams:
    """Built-in component sets, both with the nominal resistor network.

    ``multisim`` is the simulation parameter set (alpha = 8, beta = 12.5);
    ``experimental`` is the scaled-down hardware set.
    """
    try:
        l1, l2, c, r0 = _PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}; choose from {', '.join(_PRESETS)}") from None
    r1, r2 = nominal_network(vcc1, vcc2, headroom)
    return CircuitParams(l1, l2, c, r0, r1, r2)
