"""
General-purpose numerical helpers shared by the calculator modules.

This module provides the tolerance comparison used by every consistency
check, a golden-section maximizer for the scalar optimizations, grid-size
helpers and an order-preserving thread fan-out for parameter sweeps.
"""

from __future__ import annotations

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

from .config import AppConfig, NumericsConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQ = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def close(a: float, b: float, tol: float = NumericsConfig.CLOSED_FORM_TOL) -> bool:
    """Relative comparison for magnitudes above one, absolute otherwise."""
    scale = max(1.0, abs(a), abs(b))
    return abs(a - b) <= tol * scale


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = NumericsConfig.GOLDEN_TOL,
) -> Tuple[float, float]:
    """
    Golden-section search for the maximum of f on [a, b].

    The bracket endpoints are compared with the interior optimum so that a
    maximum sitting on the boundary is reported as such.

    Args:
        f: Objective, assumed unimodal on the bracket.
        a: Lower end of the bracket.
        b: Upper end of the bracket.
        tol: Final bracket width.

    Returns:
        The maximizer and the objective value there.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    lo, hi = a, b
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQ * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQ * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    x, fx = (c, yc) if yc > yd else (d, yd)
    for edge in (lo, hi):
        fe = f(edge)
        if fe > fx:
            x, fx = edge, fe
    return x, fx


def multistart_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    starts: int = NumericsConfig.MULTISTART,
    tol: float = NumericsConfig.GOLDEN_TOL,
) -> Tuple[float, float]:
    """Run golden-section on `starts` equal sub-brackets and keep the best."""
    edges = [a + (b - a) * k / starts for k in range(starts + 1)]
    best: Optional[Tuple[float, float]] = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        candidate = golden_section_max(f, lo, hi, tol)
        if best is None or candidate[1] > best[1]:
            best = candidate
    assert best is not None
    # Polish around the winner so a maximum near a sub-bracket edge is not clipped.
    width = (b - a) / starts
    lo, hi = max(a, best[0] - width), min(b, best[0] + width)
    polished = golden_section_max(f, lo, hi, tol)
    return polished if polished[1] >= best[1] else best


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (int(n) - 1).bit_length()


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Evaluate func over items on a thread pool, returning results in input order.

    Args:
        func: Pure function of one item.
        items: Work items.
        threads: Worker cap; defaults to AppConfig.THREADS.
    """
    work: Sequence[T] = list(items)
    workers = max(1, min(threads or AppConfig.THREADS, len(work) or 1))
    if workers == 1:
        return [func(item) for item in work]
    logger.debug(f"Fanning out {len(work)} points over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))
