"""Simulation and analysis of Chua's dual circuit built on current-controlled resistors."""

__version__ = "0.1.0"

from .analysis import (
    Classification,
    ClassifyOptions,
    Label,
    LyapunovEstimate,
    LyapunovOptions,
    SweepOptions,
    SweepResult,
    classify,
    jacobian_dimensionless,
    jacobian_physical,
    lyapunov_max,
    lyapunov_max_physical,
    sweep_ic,
    sweep_r0,
)
from .errors import (
    ConfigurationError,
    DegenerateParameterError,
    DivergenceError,
    DomainError,
    DualChuaError,
    InfeasibleRequestError,
    IntegrationOverflowError,
    UnknownPresetError,
)
from .export import export_csv, read_csv, render_svg
from .integrate import IntegrationSettings, Trajectory, integrate, rk4_step
from .model import (
    ChuaParams,
    CircuitParams,
    OpAmpResistor,
    PwlOddFunction,
    circuit_to_chua,
    combined_resistor,
    deriv_dimensionless,
    deriv_physical,
    equilibria,
    eval_pwl,
    resistor_voltage,
    three_segment,
)
from .synthesis import (
    RescaledValue,
    SynthesisRequest,
    SynthesisResult,
    derive_dimensionless,
    preset,
    rescale,
    synthesize_network,
    verify_network,
)
