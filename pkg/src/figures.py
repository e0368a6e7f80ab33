"""
Data behind the seven reproduced figures.

Each builder returns long-format rows (x, series, value) together with the
parameters it ran with, so the CLI can echo them in the metadata line.
Defaults come from FigureConfig and every key can be overridden.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import limits_opt
from .config import FigureConfig, NumericsConfig
from .core import channel
from .core.channel import ChannelParams
from .core.teleport import FockInput, GaussianInput, InputState
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

Row = Tuple[float, str, float]
Progress = Optional[Callable[[str], None]]


@dataclass
class FigureData:
    """Rows of one figure plus the parameters that produced them."""

    figure_id: int
    title: str
    x_label: str
    params: Dict[str, Any]
    rows: List[Row] = field(default_factory=list)

    def series(self) -> List[str]:
        seen: Dict[str, None] = {}
        for _, name, _ in self.rows:
            seen.setdefault(name, None)
        return list(seen)

    def column(self, name: str) -> List[Tuple[float, float]]:
        return [(x, v) for x, s, v in self.rows if s == name]


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _axis(params: Dict[str, Any]) -> np.ndarray:
    count = int(params["count"])
    if count < 2:
        raise ConfigurationError(f"count={count!r} must be at least 2")
    return np.linspace(float(params["start"]), float(params["stop"]), count)


def _arms(t1: float, t2: float) -> ChannelParams:
    return ChannelParams(zeta_mag=0.0, T1=complex(t1), T2=complex(t2))


def _tick(progress: Progress, name: str) -> None:
    logger.debug(f"Figure series done: {name}")
    if progress is not None:
        progress(name)


def _squeezing_rows(
    state: InputState, p: ChannelParams, zetas: Sequence[float], rule: str, name: str
) -> List[Row]:
    return [(z, name, f) for z, _, f in limits_opt.fidelity_vs_squeezing(state, p, zetas, rule=rule)]


def _figure_1(params: Dict[str, Any], progress: Progress) -> List[Row]:
    state = GaussianInput(float(params["zeta0"]))
    zetas = _axis(params)
    rows: List[Row] = []
    for t2 in _as_list(params["t2"]):
        p = _arms(params["t1"], t2)
        for rule, label in (("one", "lambda=1"), ("star", "lambda=|T2/T1|")):
            name = f"{label},t2={t2}"
            rows += _squeezing_rows(state, p, zetas, rule, name)
            _tick(progress, name)
    return rows


def _figure_2(params: Dict[str, Any], progress: Progress) -> List[Row]:
    zetas = _axis(params)
    p = _arms(params["t1"], params["t2"])
    states = (
        (f"squeezed zeta0={params['zeta0']}", GaussianInput(float(params["zeta0"]))),
        (f"fock N={params['fock_n']}", FockInput(int(params["fock_n"]))),
    )
    rows: List[Row] = []
    for state_name, state in states:
        for rule, label in (("optimal", "lambda_opt"), ("star", "lambda=|T2/T1|"), ("dotted", "lambda=C2/|S|")):
            name = f"{state_name}:{label}"
            rows += _squeezing_rows(state, p, zetas, rule, name)
            _tick(progress, name)
    return rows


def _figure_3(params: Dict[str, Any], progress: Progress) -> List[Row]:
    n_coh = _axis(params)
    rows: List[Row] = []
    for zeta in _as_list(params["zetas"]):
        p = _arms(params["t1"], params["t2"]).with_squeezing(float(zeta))
        name = f"zeta={zeta}"
        points = limits_opt.optimal_lambda_vs_ncoh(p, float(params["zeta0"]), n_coh)
        rows += [(pt.n_coh, name, pt.lam_opt) for pt in points]
        _tick(progress, name)
    return rows


def _figure_4(params: Dict[str, Any], progress: Progress) -> List[Row]:
    zetas = _axis(params)
    states = (
        (
            f"squeezed zeta0={params['zeta0']} alpha0={params['alpha0']}",
            GaussianInput(float(params["zeta0"]), complex(params["alpha0"])),
        ),
        (f"fock N={params['fock_n']}", FockInput(int(params["fock_n"]))),
    )
    rows: List[Row] = []
    for state_name, state in states:
        for t2 in _as_list(params["t2"]):
            name = f"{state_name}:t2={t2}"
            rows += _squeezing_rows(state, _arms(params["t1"], t2), zetas, "star", name)
            _tick(progress, name)
    return rows


def _length_rows(state: InputState, l2: Sequence[float], lA: float, name: str) -> List[Row]:
    return [(x, name, f) for x, f in limits_opt.fidelity_vs_length(state, l2, lA=lA)]


def _figure_5(params: Dict[str, Any], progress: Progress) -> List[Row]:
    l2 = _axis(params)
    lA = float(params["la"])
    rows: List[Row] = []
    for zeta0 in _as_list(params["zeta0s"]):
        name = f"squeezed zeta0={zeta0}"
        rows += _length_rows(GaussianInput(float(zeta0)), l2, lA, name)
        _tick(progress, name)
    for n in _as_list(params["fock_ns"]):
        name = f"fock N={n}"
        rows += _length_rows(FockInput(int(n)), l2, lA, name)
        _tick(progress, name)
    return rows


def _figure_6(params: Dict[str, Any], progress: Progress) -> List[Row]:
    l2 = _axis(params)
    lA = float(params["la"])
    states = [FockInput(int(n)) for n in _as_list(params["fock_ns"])]
    rows: List[Row] = []
    for state in states:
        name = f"classical N={state.n}"
        rows += [
            (x, name, limits_opt.classical_level(state, channel.from_lengths(0.0, x, lA, lA)))
            for x in l2
        ]
        _tick(progress, name)
    per_state = [dict(limits_opt.fidelity_vs_length(state, l2, lA=lA)) for state in states]
    rows += [(x, "average", float(np.mean([f[x] for f in per_state]))) for x in l2]
    _tick(progress, "average")
    return rows


def _figure_7(params: Dict[str, Any], progress: Progress) -> List[Row]:
    l12 = _axis(params)
    lA = float(params["la"])
    zeta = NumericsConfig.INFINITE_SQUEEZING
    families: List[Tuple[str, InputState]] = [
        (f"squeezed zeta0={z0} alpha0={a0}", GaussianInput(float(z0), complex(a0)))
        for z0, a0 in params["squeezed"]
    ]
    families += [(f"fock N={n}", FockInput(int(n))) for n in _as_list(params["fock_ns"])]

    rows: List[Row] = []
    for name, state in families:
        rows += [(x, name, limits_opt.optimize_source_position(state, x, lA, zeta)[0]) for x in l12]
        inset = float(params["inset_l12"])
        rows += [
            (l1, f"inset {name}", f)
            for l1, f in limits_opt.source_position_profile(state, inset, lA, zeta, count=int(params["count"]))
        ]
        _tick(progress, name)
    return rows


_BUILDERS: Dict[int, Callable[[Dict[str, Any], Progress], List[Row]]] = {
    1: _figure_1,
    2: _figure_2,
    3: _figure_3,
    4: _figure_4,
    5: _figure_5,
    6: _figure_6,
    7: _figure_7,
}


def build_figure(
    figure_id: int, overrides: Optional[Dict[str, Any]] = None, progress: Progress = None
) -> FigureData:
    """
    Compute the rows of one figure.

    Args:
        figure_id: 1 to 7.
        overrides: Replacement values for any caption default.
        progress: Called with each finished series name.

    Raises:
        ConfigurationError: On an unknown id or unknown override key.
    """
    if figure_id not in _BUILDERS:
        raise ConfigurationError(f"figure_id={figure_id!r} must be one of {sorted(_BUILDERS)}")
    defaults = FigureConfig.FIGURES[figure_id]
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(defaults.params)
    if unknown:
        raise ConfigurationError(f"unknown figure {figure_id} parameter(s): {', '.join(sorted(unknown))}")
    params = {**defaults.params, **overrides}

    logger.info(f"Building figure {figure_id}: {defaults.title}")
    rows = _BUILDERS[figure_id](params, progress)
    return FigureData(figure_id=figure_id, title=defaults.title, x_label=defaults.x_label, params=params, rows=rows)


def series_count(figure_id: int, overrides: Optional[Dict[str, Any]] = None) -> int:
    """Number of progress ticks build_figure will emit."""
    params = {**FigureConfig.FIGURES[figure_id].params, **(overrides or {})}
    if figure_id == 1:
        return 2 * len(_as_list(params["t2"]))
    if figure_id == 2:
        return 6
    if figure_id == 3:
        return len(_as_list(params["zetas"]))
    if figure_id == 4:
        return 2 * len(_as_list(params["t2"]))
    if figure_id == 5:
        return len(_as_list(params["zeta0s"])) + len(_as_list(params["fock_ns"]))
    if figure_id == 6:
        return len(_as_list(params["fock_ns"])) + 1
    return len(params["squeezed"]) + len(_as_list(params["fock_ns"]))
