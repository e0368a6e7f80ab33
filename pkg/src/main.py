"""
Command-line front end of the lossy-channel teleportation calculator.

Subcommands:
    fidelity          single-point fidelity and classical level
    figure            data behind one of the seven reproduced figures
    sweep             fidelity while one parameter varies
    optimize-lambda   best displacement gain for one channel
    optimize-source   best TMSV source position between Alice and Bob
    average-fidelity  coherent-amplitude-averaged fidelity
    oracle-check      closed forms against the phase-space grid oracle
    mc-check          Monte-Carlo rebuild of the averaged output

Results go to stdout (or --output) as CSV or JSON; logs and progress go to
stderr. Exit codes: 0 success, 1 failed check, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator
from rich.console import Console
from rich.table import Table

from .config import AppConfig, FigureConfig, NumericsConfig
from .core import channel, teleport
from .core.channel import ChannelParams
from .core.measurement import monte_carlo_output
from .core.teleport import FidelityReport, FockInput, GaussianInput, InputState, TeleportSetting
from .errors import ConfigurationError, DomainError, GridResolutionError, SeedRequired, TeleportError
from . import figures, limits_opt, oracle
from .ui import ResultExporter, SweepProgress

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


def setup_logging(verbose: bool = False) -> None:
    """Root logger on stderr, plus a UTF-8 log file when CVTP_LOG_FILE is set."""
    logging.getLogger().handlers.clear()

    formatter = logging.Formatter(AppConfig.LOG_FORMAT)

    # stderr keeps CSV on stdout clean
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG if verbose else getattr(logging, AppConfig.LOG_LEVEL, logging.INFO))
    root_logger.addHandler(console_handler)

    if AppConfig.LOG_FILE:
        file_handler = logging.FileHandler(AppConfig.LOG_FILE, encoding="utf-8")
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)


# Run configuration

class StateConfig(BaseModel):
    """Exactly one input state."""

    kind: Literal["squeezed", "coherent", "fock"]
    zeta0: Optional[float] = None
    alpha0: float = 0.0
    alpha0_imag: float = 0.0
    n: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_kind(self) -> "StateConfig":
        if self.kind == "squeezed" and self.zeta0 is None:
            raise ValueError("zeta0 is required for --state squeezed")
        if self.kind == "fock":
            if self.n is None:
                raise ValueError("n is required for --state fock")
            if self.n > NumericsConfig.N_MAX:
                raise ValueError(f"n={self.n} exceeds N_max={NumericsConfig.N_MAX}")
        for name in ("zeta0", "alpha0", "alpha0_imag"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        return self

    def to_state(self) -> InputState:
        if self.kind == "fock":
            return FockInput(self.n)
        zeta0 = 0.0 if self.kind == "coherent" else self.zeta0
        return GaussianInput(zeta0, complex(self.alpha0, self.alpha0_imag))


class ChannelConfig(BaseModel):
    """Source squeezing and both arms; lengths, when given, override |T|."""

    zeta: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    phi: float = Field(default=0.0, allow_inf_nan=False)
    t1: float = Field(default=1.0, ge=0.0, le=1.0)
    t2: float = Field(default=1.0, ge=0.0, le=1.0)
    r1: float = Field(default=0.0, ge=0.0, le=1.0)
    r2: float = Field(default=0.0, ge=0.0, le=1.0)
    nth1: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    nth2: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    la: float = Field(default=1.0, gt=0.0, allow_inf_nan=False)
    l1: Optional[float] = Field(default=None, ge=0.0, allow_inf_nan=False)
    l2: Optional[float] = Field(default=None, ge=0.0, allow_inf_nan=False)

    def to_params(self) -> ChannelParams:
        if self.l1 is not None or self.l2 is not None:
            return channel.from_lengths(
                self.l1 or 0.0, self.l2 or 0.0, self.la, self.la,
                zeta_mag=self.zeta, phi=self.phi, nth1=self.nth1, nth2=self.nth2,
            )
        return ChannelParams(
            zeta_mag=self.zeta, phi=self.phi,
            T1=complex(self.t1), T2=complex(self.t2), R1=complex(self.r1), R2=complex(self.r2),
            nth1=self.nth1, nth2=self.nth2, lA1=self.la, lA2=self.la,
        )


class OutputConfig(BaseModel):
    format: Literal["csv", "json"] = "csv"
    output: Optional[Path] = None


class SweepRange(BaseModel):
    start: float = Field(allow_inf_nan=False)
    stop: float = Field(allow_inf_nan=False)
    count: int = Field(ge=2)


GainRule = Union[Literal["auto"], float]


class FidelityRun(BaseModel):
    state: StateConfig
    channel: ChannelConfig
    lam: GainRule = "auto"
    method: Literal["closed", "overlap", "grid"] = "closed"
    infinite_squeezing: bool = False
    output: OutputConfig

    @model_validator(mode="after")
    def _positive_gain(self) -> "FidelityRun":
        if self.lam != "auto" and not self.lam > 0.0:
            raise ValueError(f"lam={self.lam!r} must be positive")
        return self


class SweepRun(FidelityRun):
    parameter: Literal["zeta", "t2", "lambda", "l2", "sigma"]
    span: SweepRange


class FigureRun(BaseModel):
    figure_id: int = Field(ge=1, le=7)
    overrides: Dict[str, Any] = Field(default_factory=dict)
    output: OutputConfig


class OptimizeSourceRun(BaseModel):
    state: StateConfig
    l12: float = Field(ge=0.0, allow_inf_nan=False)
    la: float = Field(default=1.0, gt=0.0, allow_inf_nan=False)
    zeta: float = Field(default=NumericsConfig.INFINITE_SQUEEZING, ge=0.0)
    profile: int = Field(default=0, ge=0)
    output: OutputConfig


class AverageFidelityRun(BaseModel):
    zeta0: float = Field(default=0.0, allow_inf_nan=False)
    n_coh: float = Field(gt=0.0, allow_inf_nan=False)
    order: int = Field(default=NumericsConfig.QUADRATURE_ORDER, ge=2)
    lam: Union[Literal["auto", "optimal"], float] = "optimal"
    channel: ChannelConfig
    output: OutputConfig


class OracleRun(BaseModel):
    grid_n: Optional[int] = Field(default=None, ge=1)
    perturb_sigma: float = Field(default=0.0, allow_inf_nan=False)
    fock: List[int] = Field(default_factory=list)
    output: OutputConfig


class MonteCarloRun(BaseModel):
    state: StateConfig
    channel: ChannelConfig
    lam: GainRule = "auto"
    samples: int = Field(default=100_000, ge=2)
    seed: Optional[int] = None
    streams: int = Field(default=4, ge=1)
    output: OutputConfig

    @model_validator(mode="after")
    def _gaussian_only(self) -> "MonteCarloRun":
        if self.state.kind == "fock":
            raise ValueError("state: mc-check needs a Gaussian input (squeezed or coherent)")
        return self


# Argument parsing

def _add_state_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_argument_group("input state")
    group.add_argument("--state", choices=["squeezed", "coherent", "fock"], required=required,
                       help="Input family.")
    group.add_argument("--zeta0", type=float, help="Squeezing of the input (squeezed).")
    group.add_argument("--alpha0", type=float, default=0.0, help="Re of the coherent amplitude.")
    group.add_argument("--alpha0-imag", type=float, default=0.0, help="Im of the coherent amplitude.")
    group.add_argument("--n", type=int, help="Photon number (fock).")


def _add_channel_args(parser: argparse.ArgumentParser, zeta_default: float = 0.0) -> None:
    group = parser.add_argument_group("channel")
    group.add_argument("--zeta", type=float, default=zeta_default, help="TMSV squeezing |zeta|.")
    group.add_argument("--phi", type=float, default=0.0, help="TMSV squeezing phase (radians).")
    group.add_argument("--t1", type=float, default=1.0, help="|T1|, Alice's arm.")
    group.add_argument("--t2", type=float, default=1.0, help="|T2|, Bob's arm.")
    group.add_argument("--r1", type=float, default=0.0, help="|R1|, coupling to Alice's reservoir.")
    group.add_argument("--r2", type=float, default=0.0, help="|R2|, coupling to Bob's reservoir.")
    group.add_argument("--nth1", type=float, default=0.0, help="Thermal photons in Alice's reservoir.")
    group.add_argument("--nth2", type=float, default=0.0, help="Thermal photons in Bob's reservoir.")
    group.add_argument("--la", type=float, default=1.0, help="Absorption length l_A.")
    group.add_argument("--l1", type=float, help="Alice's arm length (overrides --t1).")
    group.add_argument("--l2", type=float, help="Bob's arm length (overrides --t2).")


def _add_output_args(parser: argparse.ArgumentParser, default_format: str = AppConfig.DEFAULT_FORMAT) -> None:
    parser.add_argument("--format", choices=["csv", "json"], default=default_format, help="Output format.")
    parser.add_argument("--output", type=Path, help="Write to this file instead of stdout.")


def _figure_help() -> str:
    lines = []
    for fid, fig in FigureConfig.FIGURES.items():
        lines.append(f"{fid}: {fig.title} (defaults: {json.dumps(fig.params)})")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvtp",
        description="Continuous-variable teleportation through lossy channels.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Enable verbose logging.")
    parser.add_argument("--no-progress", action="store_true", help="Hide progress bars.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="Fidelity and classical level of one setup.")
    _add_state_args(p)
    _add_channel_args(p)
    p.add_argument("--lambda", dest="lam", default="auto", help="Displacement gain, or 'auto' for |T2/T1|.")
    p.add_argument("--method", choices=["closed", "overlap", "grid"], default="closed")
    p.add_argument("--infinite-squeezing", action="store_true", help="Use |zeta| -> infinity.")
    _add_output_args(p)

    p = sub.add_parser(
        "figure", help="Data behind one figure.", description=_figure_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("figure_id", type=int, help="Figure number 1-7.")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="Override a default; VALUE is JSON (e.g. --set 't2=[0.9]').")
    _add_output_args(p)

    p = sub.add_parser("sweep", help="Fidelity along one parameter.")
    _add_state_args(p)
    _add_channel_args(p)
    p.add_argument("--lambda", dest="lam", default="auto")
    p.add_argument("--parameter", choices=["zeta", "t2", "lambda", "l2", "sigma"], required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, default=51)
    _add_output_args(p)

    p = sub.add_parser("optimize-lambda", help="Gain maximizing the fidelity.")
    _add_state_args(p)
    _add_channel_args(p)
    _add_output_args(p)

    p = sub.add_parser("optimize-source", help="Source position maximizing the fidelity.")
    _add_state_args(p)
    p.add_argument("--l12", type=float, required=True, help="Alice-Bob distance.")
    p.add_argument("--la", type=float, default=1.0, help="Absorption length l_A.")
    p.add_argument("--zeta", type=float, default=NumericsConfig.INFINITE_SQUEEZING)
    p.add_argument("--profile", type=int, default=0, help="Also emit F(l1) at this many positions.")
    _add_output_args(p)

    p = sub.add_parser("average-fidelity", help="Fidelity averaged over coherent amplitudes.")
    p.add_argument("--zeta0", type=float, default=0.0, help="Squeezing of the averaged inputs.")
    p.add_argument("--n-coh", type=float, required=True, help="Cutoff coherent photon number.")
    p.add_argument("--order", type=int, default=NumericsConfig.QUADRATURE_ORDER)
    p.add_argument("--lambda", dest="lam", default="optimal", help="Gain, 'auto' or 'optimal'.")
    _add_channel_args(p)
    _add_output_args(p)

    p = sub.add_parser("oracle-check", help="Closed forms against the grid oracle.")
    p.add_argument("--grid-n", type=int, help="Force this many grid points per axis.")
    p.add_argument("--perturb-sigma", type=float, default=0.0, help="Shift sigma on the grid side.")
    p.add_argument("--fock", type=int, action="append", default=[], help="Check these number states only.")
    _add_output_args(p, default_format="json")

    p = sub.add_parser("mc-check", help="Monte-Carlo rebuild against the closed form.")
    _add_state_args(p)
    _add_channel_args(p)
    p.add_argument("--lambda", dest="lam", default="auto")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--streams", type=int, default=4)
    _add_output_args(p)
    return parser


def _parse_override(item: str) -> tuple:
    if "=" not in item:
        raise ConfigurationError(f"override {item!r} is not KEY=VALUE")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _state(args) -> Dict[str, Any]:
    return {"kind": args.state, "zeta0": args.zeta0, "alpha0": args.alpha0,
            "alpha0_imag": args.alpha0_imag, "n": args.n}


def _channel(args) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in
            ("zeta", "phi", "t1", "t2", "r1", "r2", "nth1", "nth2", "la", "l1", "l2")}


def _output(args) -> Dict[str, Any]:
    return {"format": args.format, "output": args.output}


def build_run(args) -> BaseModel:
    """Validated run configuration for the parsed arguments."""
    cmd = args.command
    if cmd == "fidelity":
        return FidelityRun(state=_state(args), channel=_channel(args), lam=args.lam, method=args.method,
                           infinite_squeezing=args.infinite_squeezing, output=_output(args))
    if cmd == "sweep":
        return SweepRun(state=_state(args), channel=_channel(args), lam=args.lam, parameter=args.parameter,
                        span={"start": args.start, "stop": args.stop, "count": args.count},
                        output=_output(args))
    if cmd == "figure":
        return FigureRun(figure_id=args.figure_id, overrides=dict(_parse_override(o) for o in args.overrides),
                         output=_output(args))
    if cmd == "optimize-lambda":
        return FidelityRun(state=_state(args), channel=_channel(args), output=_output(args))
    if cmd == "optimize-source":
        return OptimizeSourceRun(state=_state(args), l12=args.l12, la=args.la, zeta=args.zeta,
                                 profile=args.profile, output=_output(args))
    if cmd == "average-fidelity":
        return AverageFidelityRun(zeta0=args.zeta0, n_coh=args.n_coh, order=args.order, lam=args.lam,
                                  channel=_channel(args), output=_output(args))
    if cmd == "oracle-check":
        return OracleRun(grid_n=args.grid_n, perturb_sigma=args.perturb_sigma, fock=args.fock,
                         output=_output(args))
    if cmd == "mc-check":
        return MonteCarloRun(state=_state(args), channel=_channel(args), lam=args.lam, samples=args.samples,
                             seed=args.seed, streams=args.streams, output=_output(args))
    raise ConfigurationError(f"unknown command {cmd!r}")


# Commands

def _exporter(run: BaseModel) -> ResultExporter:
    return ResultExporter(fmt=run.output.format)


def _metadata(command: str, run: BaseModel) -> Dict[str, Any]:
    meta = run.model_dump(mode="json", exclude={"output"})
    meta["command"] = command
    return meta


def _emit(run: BaseModel, text: str) -> None:
    _exporter(run).write(text, run.output.output)


def evaluate(state: InputState, s: TeleportSetting, method: str = "closed") -> FidelityReport:
    """Fidelity by the requested route; Gaussian inputs with phi_tilde != 0 use the overlap route."""
    if method == "grid":
        return teleport.fidelity_numeric(state, s)
    if isinstance(state, GaussianInput) and (method == "overlap" or abs(s.phi_tilde) > 1e-12):
        F = teleport.fidelity_overlap(state, s)
        level = teleport.fidelity_overlap(state, s.classical())
        return FidelityReport(F=F, classical_level=level, exceeded_classical=F > level,
                              lam=s.lam, sigma=s.sigma, method="overlap")
    return teleport.fidelity(state, s)


def _sigma_inf(p: ChannelParams) -> float:
    try:
        return channel.sigma_infinity(p)
    except DomainError:
        return math.nan


def cmd_fidelity(run: FidelityRun, console) -> int:
    state = run.state.to_state()
    p = run.channel.to_params()
    s = teleport.setting_for(p, run.lam, infinite_squeezing=run.infinite_squeezing)
    report = evaluate(state, s, run.method)
    record = {
        "F": report.F,
        "classical_level": report.classical_level,
        "exceeded_classical": report.exceeded_classical,
        "lambda": s.lam,
        "sigma": s.sigma,
        "sigma_inf": _sigma_inf(p),
        "phi_tilde": s.phi_tilde,
        "method": report.method,
    }
    logger.info(f"F={report.F:.6g} (classical {report.classical_level:.6g}) at lambda={s.lam:.6g}")
    _emit(run, _exporter(run).render_record(record, _metadata("fidelity", run)))
    return EXIT_OK


def _sweep_point(run: SweepRun, state: InputState, p: ChannelParams, x: float) -> FidelityReport:
    lam = run.lam
    if run.parameter == "zeta":
        p = p.with_squeezing(x)
    elif run.parameter == "t2":
        p = dataclasses.replace(p, T2=complex(x), l2=None)
    elif run.parameter == "l2":
        l1, _ = p.lengths()
        p = channel.from_lengths(l1, x, p.lA1, p.lA2, zeta_mag=p.zeta_mag, phi=p.phi, nth1=p.nth1, nth2=p.nth2)
    elif run.parameter == "lambda":
        lam = x
    s = teleport.setting_for(p, lam)
    if run.parameter == "sigma":
        s = TeleportSetting(lam=s.lam, sigma=x, phi_tilde=s.phi_tilde, sigma_classical=s.classical_sigma)
    return evaluate(state, s)


def cmd_sweep(run: SweepRun, console, show_progress: bool = True) -> int:
    state = run.state.to_state()
    p = run.channel.to_params()
    xs = np.linspace(run.span.start, run.span.stop, run.span.count)
    rows: List[tuple] = []
    with SweepProgress(console, f"sweep {run.parameter}", len(xs), enabled=show_progress) as bar:
        for x in xs:
            report = _sweep_point(run, state, p, float(x))
            rows += [(float(x), "F", report.F), (float(x), "classical", report.classical_level)]
            bar.advance(f"{run.parameter}={x:.4g}")
    _emit(run, _exporter(run).render(["x", "series", "value"], rows, _metadata("sweep", run)))
    return EXIT_OK


def cmd_figure(run: FigureRun, console, show_progress: bool = True) -> int:
    total = figures.series_count(run.figure_id, run.overrides)
    with SweepProgress(console, f"figure {run.figure_id}", total, enabled=show_progress) as bar:
        data = figures.build_figure(run.figure_id, run.overrides, progress=bar.advance)
    meta = {"command": "figure", "figure": data.figure_id, "title": data.title,
            "x_label": data.x_label, "params": data.params}
    _emit(run, _exporter(run).render(["x", "series", "value"], data.rows, meta))
    return EXIT_OK


def cmd_optimize_lambda(run: FidelityRun, console) -> int:
    state = run.state.to_state()
    p = run.channel.to_params()
    lam, best = limits_opt.optimize_lambda(state, p)
    record: Dict[str, Any] = {"lambda_opt": lam, "F_max": best}
    try:
        star = channel.lambda_star(p)
        record.update({"lambda_star": star, "F_star": limits_opt.fidelity_at(state, p, star)})
    except DomainError:
        record.update({"lambda_star": math.nan, "F_star": math.nan})
    record["classical_level"] = limits_opt.classical_level(state, p, lam)
    _emit(run, _exporter(run).render_record(record, _metadata("optimize-lambda", run)))
    return EXIT_OK


def cmd_optimize_source(run: OptimizeSourceRun, console) -> int:
    state = run.state.to_state()
    l1, best = limits_opt.optimize_source_position(state, run.l12, run.la, run.zeta)
    meta = _metadata("optimize-source", run)
    if run.profile < 2:
        record = {"l12": run.l12, "l1_opt": l1, "F_max": best}
        _emit(run, _exporter(run).render_record(record, meta))
        return EXIT_OK
    rows = [(run.l12, "l1_opt", l1), (run.l12, "F_max", best)]
    rows += [(x, "profile", f) for x, f in
             limits_opt.source_position_profile(state, run.l12, run.la, run.zeta, count=run.profile)]
    _emit(run, _exporter(run).render(["x", "series", "value"], rows, meta))
    return EXIT_OK


def cmd_average_fidelity(run: AverageFidelityRun, console) -> int:
    p = run.channel.to_params()
    spec = limits_opt.AverageFidelitySpec(n_coh=run.n_coh, order=run.order)
    if run.lam == "optimal":
        lam, value = limits_opt.optimal_lambda_for_average(spec, p, run.zeta0)
    else:
        lam = channel.lambda_star(p) if run.lam == "auto" else float(run.lam)
        value = limits_opt.average_fidelity(spec, p, lam, run.zeta0)
    record = {
        "lambda": lam,
        "F_avg": value,
        "F_avg_closed_form": limits_opt.average_fidelity_closed_form(spec, p, lam, run.zeta0),
    }
    _emit(run, _exporter(run).render_record(record, _metadata("average-fidelity", run)))
    return EXIT_OK


def _oracle_cases(run: OracleRun):
    if not run.fock:
        return None
    return [(FockInput(n), sigma, lam) for n in run.fock for sigma in (0.1, 0.5) for lam in (0.5, 1.0)]


def cmd_oracle_check(run: OracleRun, console, show_progress: bool = True) -> int:
    cases = _oracle_cases(run)
    total = len(cases) if cases is not None else len(oracle.default_cases())
    with SweepProgress(console, "oracle", total, enabled=show_progress) as bar:
        summary = oracle.run_consistency_suite(
            cases=cases, grid_n=run.grid_n, perturb_sigma=run.perturb_sigma, progress=bar.advance
        )

    table = Table(title="Oracle consistency")
    for column in ("case", "closed form", "grid", "delta", "ok"):
        table.add_column(column)
    for case in summary.cases:
        table.add_row(case.label, f"{case.closed_form:.10f}", f"{case.grid:.10f}",
                      f"{case.delta_grid:.2e}", "✅" if case.passed else "❌")
    console.print(table)

    exporter = _exporter(run)
    if run.output.format == "json":
        text = json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    else:
        columns = ["label", "sigma", "lam", "closed_form", "overlap", "grid", "delta_closed", "delta_grid", "passed"]
        rows = [[getattr(c, name) if getattr(c, name) is not None else "" for name in columns]
                for c in summary.cases]
        text = exporter.render(columns, rows, _metadata("oracle-check", run))
    _emit(run, text)
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


def cmd_mc_check(run: MonteCarloRun, console) -> int:
    state = run.state.to_state()
    p = run.channel.to_params()
    s = teleport.setting_for(p, run.lam)
    estimate = monte_carlo_output(state, channel.shared_state(p), s, run.samples, run.seed, streams=run.streams)
    reference = teleport.fidelity_overlap(state, s)
    z = (estimate.fidelity - reference) / estimate.standard_error if estimate.standard_error > 0 else 0.0
    estimate = estimate.model_copy(update={"closed_form": reference, "z_score": z})
    record = estimate.model_dump()
    record["covariance"] = json.dumps(record["covariance"])
    _emit(run, _exporter(run).render_record(record, _metadata("mc-check", run)))
    passed = abs(z) <= 3.0
    if not passed:
        logger.warning(f"Monte-Carlo estimate {estimate.fidelity} is {z:.2f} standard errors from {reference}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _format_validation(err: ValidationError) -> str:
    first = err.errors()[0]
    field = ".".join(str(part) for part in first.get("loc", ())) or "config"
    return f"{field}: {first.get('msg', 'invalid value')}"


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)

    setup_logging(args.verbose)
    console = Console(stderr=True)
    show_progress = not args.no_progress

    try:
        run = build_run(args)
        if args.command == "fidelity":
            return cmd_fidelity(run, console)
        if args.command == "sweep":
            return cmd_sweep(run, console, show_progress)
        if args.command == "figure":
            return cmd_figure(run, console, show_progress)
        if args.command == "optimize-lambda":
            return cmd_optimize_lambda(run, console)
        if args.command == "optimize-source":
            return cmd_optimize_source(run, console)
        if args.command == "average-fidelity":
            return cmd_average_fidelity(run, console)
        if args.command == "oracle-check":
            return cmd_oracle_check(run, console, show_progress)
        return cmd_mc_check(run, console)
    except ValidationError as e:
        print(f"❌ Error: {_format_validation(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError, DomainError, GridResolutionError, SeedRequired) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except TeleportError as e:
        logger.error(f"Computation failed: {e}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


def main() -> None:
    """Main entry point for the calculator."""
    if not AppConfig.validate_environment():
        sys.exit(EXIT_CONFIG)
    try:
        sys.exit(run_command())
    except KeyboardInterrupt:
        print("\n👋 Interrupted by user.", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
