"""Command-line interface: ``simulate``, ``sweep`` and ``synthesize``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
(divergence, infeasible synthesis, failed verification).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import List, Optional, Tuple

from . import __version__
from .analysis import (
    DEFAULT_PERTURBATION,
    ClassifyOptions,
    Label,
    LyapunovOptions,
    SweepOptions,
    classify,
    lyapunov_max,
    sweep_ic,
    sweep_r0,
)
from .errors import (
    ConfigurationError,
    DivergenceError,
    DomainError,
    DualChuaError,
    InfeasibleRequestError,
    UnknownPresetError,
)
from .export import AXIS_LABELS, DIMENSIONLESS, PHYSICAL, export_csv, render_svg, write_atomic
from .integrate import IntegrationSettings, integrate
from .model import (
    DEFAULT_HEADROOM,
    ChuaParams,
    CircuitParams,
    circuit_to_chua,
    deriv_dimensionless,
    deriv_physical,
    equilibria,
    physical_to_dimensionless,
    three_segment,
)
from .synthesis import (
    PRESET_NAMES,
    SynthesisRequest,
    derive_dimensionless,
    nominal_network,
    preset,
    synthesize_network,
    verify_network,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

_AXES = {"x": 0, "y": 1, "z": 2, "i1": 0, "i2": 1, "uc": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    mode: str = DIMENSIONLESS
    preset: Optional[str] = None
    components: Optional[dict] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    segments: int = 3
    ic: Tuple[float, float, float] = (DEFAULT_PERTURBATION, 0.0, 0.0)
    settings: dict = field(default_factory=dict)
    out: Optional[str] = None
    svg: Optional[str] = None
    projection: Tuple[int, int] = (0, 1)
    lyapunov: bool = False


def _add_circuit_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("circuit (preset or explicit components, rescaled units)")
    g.add_argument("--preset", choices=None, help=f"component preset: {', '.join(PRESET_NAMES)}")
    g.add_argument("--l1", type=float, help="inductance L1 (kH)")
    g.add_argument("--l2", type=float, help="inductance L2 (kH)")
    g.add_argument("--c", type=float, help="capacitance C (mF)")
    g.add_argument("--r0", type=float, help="linear resistor R0 (kOhm)")
    g.add_argument("--vcc1", type=float, default=18.0, help="supply of op amp 1 (V, default 18)")
    g.add_argument("--vcc2", type=float, default=4.6, help="supply of op amp 2 (V, default 4.6)")
    g.add_argument("--headroom", type=float, default=DEFAULT_HEADROOM, help="V_CC - u_sat (V, default 1.6)")


def _add_integration_args(p: argparse.ArgumentParser, tau_end: float, step_flags=("--h",)):
    g = p.add_argument_group("integration (dimensionless time)")
    g.add_argument(*step_flags, dest="h", type=float, default=0.005, help="RK4 step in tau (default 0.005)")
    g.add_argument("--tau-end", type=float, default=tau_end, help=f"duration in tau (default {tau_end:g})")
    g.add_argument("--stride", type=int, default=1, help="record every k-th step (default 1)")
    g.add_argument("--blowup", type=float, default=100.0, help="divergence guard, dimensionless max-norm")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualchua", description="Dual Chua oscillator simulation and analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="integrate one trajectory, write CSV (and SVG)")
    sim.add_argument("--mode", choices=(DIMENSIONLESS, PHYSICAL), default=DIMENSIONLESS)
    _add_circuit_args(sim)
    g = sim.add_argument_group("dimensionless parameters (instead of a circuit)")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--m0", type=float, default=-0.6, help="outer slope with --alpha/--beta")
    g.add_argument("--m1", type=float, default=-1.2, help="inner slope with --alpha/--beta")
    g.add_argument("--segments", type=int, choices=(3, 5), default=3,
                   help="nonlinearity used in dimensionless mode with a circuit (default 3)")
    g = sim.add_argument_group("initial condition")
    g.add_argument("--x0", type=float)
    g.add_argument("--y0", type=float)
    g.add_argument("--z0", type=float)
    g.add_argument("--i10", type=float, help="physical mode: i1(0) in mA")
    g.add_argument("--i20", type=float, help="physical mode: i2(0) in mA")
    g.add_argument("--uc0", type=float, help="physical mode: u_C(0) in V")
    _add_integration_args(sim, 500.0, ("--h", "--step"))
    g = sim.add_argument_group("output")
    g.add_argument("--out", help="trajectory CSV path (default: no CSV)")
    g.add_argument("--svg", help="phase portrait SVG path")
    g.add_argument("--projection", default="x,y", help="SVG axes, e.g. x,y or i1,i2 (default x,y)")
    g.add_argument("--lyapunov", action="store_true", help="also estimate the largest Lyapunov exponent")
    g.add_argument("--dump-config", action="store_true", help="print the resolved configuration as JSON")

    sw = sub.add_parser("sweep", help="sweep R0 (Ohm) or u_C(0) (V) and classify each point")
    sw.add_argument("parameter", choices=("r0", "uc0"))
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--step", dest="sweep_step", type=float, required=True)
    _add_circuit_args(sw)
    _add_integration_args(sw, 500.0)
    sw.add_argument("--lyapunov", action=argparse.BooleanOptionalAction, default=True,
                    help="confirm chaos with a Lyapunov estimate (default on)")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", help="result CSV path (default: standard output)")
    sw.add_argument("--dump-config", action="store_true")

    sy = sub.add_parser("synthesize", help="compute the two-op-amp resistor network for target slopes")
    sy.add_argument("--m0", type=float, default=-0.6)
    sy.add_argument("--m1", type=float, default=-1.2)
    sy.add_argument("--s-out", type=float, default=0.6)
    sy.add_argument("--r0", type=float, default=5.0, help="kOhm")
    sy.add_argument("--i-break", type=float, default=1.0, help="inner breakpoint (mA)")
    sy.add_argument("--rf-split", type=float, default=0.5, help="share of R_f total on op amp 1")
    sy.add_argument("--ra1", type=float, default=6.0)
    sy.add_argument("--ra2", type=float, default=10.0)
    sy.add_argument("--headroom", type=float, default=DEFAULT_HEADROOM)
    sy.add_argument("--vcc1", type=float, default=18.0)
    sy.add_argument("--verify", action="store_true", help="re-derive slopes from the result")
    return parser


def _circuit(args) -> Optional[CircuitParams]:
    explicit = {k: getattr(args, k) for k in ("l1", "l2", "c", "r0")}
    given = [k for k, v in explicit.items() if v is not None]
    if args.preset is not None and given:
        raise UsageError(f"--preset cannot be combined with explicit components ({', '.join(given)})")
    if given:
        if len(given) != 4:
            missing = [k for k in explicit if explicit[k] is None]
            raise UsageError(f"explicit components need --l1 --l2 --c --r0; missing {', '.join(missing)}")
        r1, r2 = nominal_network(args.vcc1, args.vcc2, args.headroom)
        return CircuitParams(explicit["l1"], explicit["l2"], explicit["c"], explicit["r0"], r1, r2)
    if args.preset is None:
        return None
    return preset(args.preset, args.vcc1, args.vcc2, args.headroom)


def _settings(args) -> IntegrationSettings:
    return IntegrationSettings(args.h, args.tau_end, args.stride, args.blowup)


def _projection(text: str) -> Tuple[int, int]:
    try:
        a, b = (_AXES[t.strip().lower()] for t in text.split(","))
    except (KeyError, ValueError):
        raise UsageError(f"bad projection {text!r}; use two of x,y,z or i1,i2,uc") from None
    if a == b:
        raise UsageError("projection axes must differ")
    return a, b


def resolve_simulate(args):
    """Turn parsed flags into ``(RunConfig, field, s0, settings, chua_params, circuit)``."""
    cfg = RunConfig(mode=args.mode, segments=args.segments, out=args.out, svg=args.svg,
                    lyapunov=args.lyapunov)
    cfg.projection = _projection(args.projection)
    dimless_ic = [args.x0, args.y0, args.z0]
    phys_ic = [args.i10, args.i20, args.uc0]
    explicit_ab = args.alpha is not None or args.beta is not None
    if explicit_ab and (args.alpha is None or args.beta is None):
        raise UsageError("--alpha and --beta must be given together")
    if explicit_ab and args.mode == PHYSICAL:
        raise UsageError("--alpha/--beta describe the dimensionless system; physical mode needs a circuit")

    circuit = None
    if explicit_ab:
        if any(getattr(args, k) is not None for k in ("preset", "l1", "l2", "c", "r0")):
            raise UsageError("give either --alpha/--beta or a circuit, not both")
        params = ChuaParams(args.alpha, args.beta, three_segment(args.m0, args.m1))
        cfg.alpha, cfg.beta = args.alpha, args.beta
    else:
        circuit = _circuit(args)
        if circuit is None:
            args.preset = "multisim"
            circuit = preset("multisim", args.vcc1, args.vcc2, args.headroom)
        cfg.preset = args.preset
        if args.preset is None:
            cfg.components = {k: getattr(circuit, k) for k in ("l1", "l2", "c", "r0")}
        params = circuit_to_chua(circuit)
        if args.mode == DIMENSIONLESS and args.segments == 3:
            g = params.g
            params = ChuaParams(params.alpha, params.beta, three_segment(g.slopes[1], g.slopes[0], g.breakpoints[0]))
        cfg.alpha, cfg.beta = params.alpha, params.beta

    settings = _settings(args)
    if args.mode == DIMENSIONLESS:
        if any(v is not None for v in phys_ic):
            raise UsageError("--i10/--i20/--uc0 apply to --mode physical; use --x0/--y0/--z0")
        s0 = tuple(d if v is None else v for v, d in zip(dimless_ic, (DEFAULT_PERTURBATION, 0.0, 0.0)))
        field_fn = partial(deriv_dimensionless, params)
    else:
        if any(v is not None for v in dimless_ic):
            raise UsageError("--x0/--y0/--z0 apply to --mode dimensionless; use --i10/--i20/--uc0")
        s0 = tuple(d if v is None else v for v, d in zip(phys_ic, (DEFAULT_PERTURBATION, 0.0, 0.0)))
        _, _, ts = derive_dimensionless(circuit)
        settings = settings.rescaled(ts, blowup_norm=args.blowup * max(1.0, circuit.r0))
        field_fn = partial(deriv_physical, circuit)
    cfg.ic = s0
    cfg.settings = asdict(settings)
    return cfg, field_fn, s0, settings, params, circuit


def cmd_simulate(args) -> int:
    cfg, field_fn, s0, settings, params, circuit = resolve_simulate(args)
    if args.dump_config:
        print(json.dumps(asdict(cfg), indent=2, sort_keys=True))
    traj = integrate(field_fn, s0, settings)
    if cfg.out:
        write_atomic(cfg.out, export_csv(traj, cfg.mode))
    if cfg.svg:
        labels = AXIS_LABELS[cfg.mode]
        write_atomic(cfg.svg, render_svg(traj, cfg.projection, labels=labels,
                                         title=f"{labels[cfg.projection[1]]} vs {labels[cfg.projection[0]]}"))
    eq = equilibria(params)
    lam = None
    if cfg.lyapunov and not traj.diverged:
        start = traj.final_state
        if cfg.mode == PHYSICAL:
            start = physical_to_dimensionless(circuit, start)
        try:
            lam = lyapunov_max(params, start, LyapunovOptions(step=args.h)).value
        except DivergenceError:
            lam = None
    cls = classify(traj, eq, ClassifyOptions(), lyapunov=lam)
    parts = [f"status={traj.status}", f"points={len(traj)}", f"label={cls.label}",
             f"chaotic={'yes' if cls.chaotic else 'no'}", f"transitions={cls.transitions}",
             f"alpha={params.alpha:.6g}", f"beta={params.beta:.6g}"]
    if lam is not None:
        parts.append(f"lambda1={lam:.4g}")
    print(" ".join(parts))
    return EXIT_NUMERIC if traj.diverged else EXIT_OK


def _edges(bands: List[Tuple[float, float]], scale: float, unit: str) -> str:
    if not bands:
        return "none"
    return ", ".join(f"[{a * scale:g}, {b * scale:g}] {unit}" for a, b in bands)


def cmd_sweep(args) -> int:
    circuit = _circuit(args) or preset("multisim", args.vcc1, args.vcc2, args.headroom)
    if not args.sweep_step > 0:
        raise UsageError("--step must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    opts = SweepOptions(settings=_settings(args), lyapunov=args.lyapunov,
                        lyapunov_opts=LyapunovOptions(step=args.h), workers=args.workers)
    if args.dump_config:
        print(json.dumps({"parameter": args.parameter, "from": args.start, "to": args.stop,
                          "step": args.sweep_step, "options": asdict(opts),
                          "circuit": {k: getattr(circuit, k) for k in ("l1", "l2", "c", "r0")}},
                         indent=2, sort_keys=True))
    if args.parameter == "r0":
        result = sweep_r0(args.start / 1000, args.stop / 1000, args.sweep_step / 1000, circuit, opts)
        scale, unit, column = 1000.0, "Ohm", "r0_ohm"
    else:
        result = sweep_ic(args.start, args.stop, args.sweep_step, circuit, opts)
        scale, unit, column = 1.0, "V", "uc0_V"
    lines = [f"{column},label,lambda1,lambda1_stderr,transitions,amplitude,error"]
    for p in result.points:
        c = p.classification
        lam = "" if p.lyapunov is None else repr(p.lyapunov.value)
        se = "" if p.lyapunov is None else repr(p.lyapunov.stderr)
        lines.append(",".join([
            f"{p.value * scale:.10g}",
            "" if c is None else str(c.label),
            lam,
            se,
            "" if c is None else str(c.transitions),
            "" if c is None else repr(c.amplitude),
            (p.error or "").replace(",", ";"),
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"# DoubleScroll: {_edges(result.label_bands(Label.DOUBLE_SCROLL), scale, unit)}; "
          f"SingleScroll: {_edges(result.label_bands(Label.SINGLE_SCROLL), scale, unit)}; "
          f"chaotic: {_edges(result.chaotic_bands(), scale, unit)}")
    return EXIT_OK


def cmd_synthesize(args) -> int:
    req = SynthesisRequest(m0=args.m0, m1=args.m1, s_out=args.s_out, r0=args.r0, i_break=args.i_break,
                           rf_split=args.rf_split, r_a1=args.ra1, r_a2=args.ra2,
                           v_headroom=args.headroom, vcc1=args.vcc1)
    res = synthesize_network(req)
    r1, r2 = res.resistor1, res.resistor2
    print(f"R_f1 = {r1.r_f:g} kOhm, R_a1 = {r1.r_a:g} kOhm, R_b1 = {r1.r_b:g} kOhm, V_CC1 = {res.vcc1:g} V")
    print(f"R_f2 = {r2.r_f:g} kOhm, R_a2 = {r2.r_a:g} kOhm, R_b2 = {r2.r_b:g} kOhm, V_CC2 = {res.vcc2:g} V")
    print(f"u_sat1 = {r1.u_sat:g} V, u_sat2 = {r2.u_sat:g} V")
    print(f"breakpoints: inner {res.inner_breakpoint:g} mA, outer {res.outer_breakpoint:.6g} mA")
    print("slopes S1..S5: " + ", ".join(f"{s:+g}" for s in res.slopes))
    if args.verify:
        base = preset("multisim")
        report = verify_network(res.circuit(base.l1, base.l2, base.c, args.r0))
        want = (args.s_out, args.m0, args.m1, args.m0, args.s_out)
        ok = all(abs(a - b) <= 1e-9 * max(1.0, abs(b)) for a, b in zip(report.slopes, want))
        ok = ok and abs(report.inner_breakpoint - args.i_break) <= 1e-9 * max(1.0, args.i_break)
        print("verify: " + ("PASS" if ok else "FAIL"))
        if not ok:
            return EXIT_NUMERIC
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "synthesize": cmd_synthesize}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help / --version exit 0, usage errors exit EXIT_CONFIG
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    if getattr(args, "preset", None) is not None and args.preset not in PRESET_NAMES:
        print(f"dualchua: error: unknown preset {args.preset!r}; choose from {', '.join(PRESET_NAMES)}",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (InfeasibleRequestError, DivergenceError) as exc:
        print(f"dualchua: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, ConfigurationError, UnknownPresetError) as exc:
        print(f"dualchua: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DualChuaError as exc:
        print(f"dualchua: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"dualchua: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
