"""Local extrema predicates and alternating extrema sequences."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from sigprop.errors import MissingDerivativeColumn, OutOfDomain, UnknownSignal
from sigprop.trace import Signal, Trace, finite_difference, snap, window


class ExtremumKind(str, Enum):
    MIN = "min"
    MAX = "max"

    def opposite(self) -> ExtremumKind:
        return ExtremumKind.MAX if self is ExtremumKind.MIN else ExtremumKind.MIN


@dataclass(frozen=True)
class Extremum:
    kind: ExtremumKind
    t: float
    v: float
    index: int


class MethodKind(str, Enum):
    PUNCTUAL = "punctual"
    ANALYTICAL = "analytical"
    PRECOMPUTED = "precomputed"


@dataclass(frozen=True)
class ExtremaMethod:
    """How local extrema are recognized.

    ``punctual`` uses forward differences of the signal, ``analytical`` compares
    values over the window, ``precomputed`` reads first/second derivative columns.
    """

    kind: MethodKind = MethodKind.ANALYTICAL
    first: str | None = None
    second: str | None = None

    def __post_init__(self) -> None:
        if self.kind is MethodKind.PRECOMPUTED and not (self.first and self.second):
            raise ValueError("precomputed method needs both derivative column names")

    @classmethod
    def analytical(cls) -> ExtremaMethod:
        return cls(MethodKind.ANALYTICAL)

    @classmethod
    def punctual(cls) -> ExtremaMethod:
        return cls(MethodKind.PUNCTUAL)

    @classmethod
    def precomputed(cls, first: str, second: str) -> ExtremaMethod:
        return cls(MethodKind.PRECOMPUTED, first, second)

    @classmethod
    def named(cls, name: str) -> ExtremaMethod:
        """Default method selected by name in the configuration."""
        return cls(MethodKind(name))

    def columns(self) -> tuple[str, ...]:
        if self.kind is MethodKind.PRECOMPUTED:
            return (self.first, self.second)  # type: ignore[return-value]
        return ()


def derivatives(sig: Signal, method: ExtremaMethod, trace: Trace | None = None) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative on the full grid; NaN where undefined."""
    n = len(sig)
    if method.kind is MethodKind.PRECOMPUTED:
        if trace is None:
            raise MissingDerivativeColumn(f"method precomputed({method.first}, {method.second}) needs the trace")
        try:
            d1 = trace.signal(method.first).values  # type: ignore[arg-type]
            d2 = trace.signal(method.second).values  # type: ignore[arg-type]
        except UnknownSignal as e:
            raise MissingDerivativeColumn(f"derivative column missing: {e}") from None
        return d1[:n], d2[:n]

    d1 = np.full(n, np.nan)
    d2 = np.full(n, np.nan)
    if n >= 2:
        first = finite_difference(sig, 1).values
        d1[: first.size] = first
    if n >= 3:
        second = finite_difference(sig, 2).values
        d2[: second.size] = second
    return d1, d2


def _index_of(sig: Signal, x: float, lo: float, hi: float, tol: float) -> int:
    if not lo - tol <= x <= hi + tol:
        raise OutOfDomain(f"x={x:g} outside window [{lo:g}, {hi:g}]")
    i = snap(sig.times, x, tol)
    if i is None:
        raise OutOfDomain(f"x={x:g} is not a sample point of {sig.name}")
    return i


def _is_extremum(
    kind: ExtremumKind,
    sig: Signal,
    x: float,
    lo: float,
    hi: float,
    method: ExtremaMethod,
    trace: Trace | None,
    eq_tol: float,
    deriv_tol: float,
) -> bool:
    i = _index_of(sig, x, lo, hi, eq_tol)
    if method.kind is MethodKind.ANALYTICAL:
        start, stop = window(sig.times, lo, hi, eq_tol)
        vals = sig.values[start : stop + 1]
        v = sig.values[i]
        if kind is ExtremumKind.MIN:
            return bool(np.all(v <= vals + eq_tol))
        return bool(np.all(v >= vals - eq_tol))
    d1, d2 = derivatives(sig, method, trace)
    return _derivative_test(kind, d1[i], d2[i], deriv_tol)


def _derivative_test(kind: ExtremumKind, d1: float, d2: float, deriv_tol: float) -> bool:
    if not abs(d1) <= deriv_tol:
        return False
    if kind is ExtremumKind.MIN:
        return bool(d2 > deriv_tol)
    return bool(d2 < -deriv_tol)


def is_local_min(
    sig: Signal,
    x: float,
    lo: float,
    hi: float,
    method: ExtremaMethod | None = None,
    trace: Trace | None = None,
    *,
    eq_tol: float = 1e-9,
    deriv_tol: float = 1e-6,
) -> bool:
    return _is_extremum(ExtremumKind.MIN, sig, x, lo, hi, method or ExtremaMethod(), trace, eq_tol, deriv_tol)


def is_local_max(
    sig: Signal,
    x: float,
    lo: float,
    hi: float,
    method: ExtremaMethod | None = None,
    trace: Trace | None = None,
    *,
    eq_tol: float = 1e-9,
    deriv_tol: float = 1e-6,
) -> bool:
    return _is_extremum(ExtremumKind.MAX, sig, x, lo, hi, method or ExtremaMethod(), trace, eq_tol, deriv_tol)


def _runs(vals: np.ndarray, eq_tol: float) -> list[int]:
    """Start index of every flat run of the whole signal."""
    runs: list[int] = []
    for i in range(vals.size):
        if not runs or abs(vals[i] - vals[runs[-1]]) > eq_tol:
            runs.append(i)
    return runs


def _run_candidates(sig: Signal, start: int, stop: int, eq_tol: float) -> list[Extremum]:
    """Flat runs strictly below (min) or above (max) both neighbouring runs.

    Neighbours are looked up over the whole signal, so a run may sit on the window
    bound. A run is reported at its earliest sample inside [start, stop].
    """
    vals = sig.values
    runs = _runs(vals, eq_tol)
    ends = [nxt - 1 for nxt in runs[1:]] + [vals.size - 1]
    found = []
    for r in range(1, len(runs) - 1):
        first, last = runs[r], ends[r]
        if last < start or first > stop:
            continue
        i = max(first, start)
        v = vals[first]
        before, after = vals[runs[r - 1]], vals[runs[r + 1]]
        if before > v and after > v:
            found.append(Extremum(ExtremumKind.MIN, float(sig.times[i]), float(vals[i]), i))
        elif before < v and after < v:
            found.append(Extremum(ExtremumKind.MAX, float(sig.times[i]), float(vals[i]), i))
    return found


def _derivative_candidates(
    sig: Signal, start: int, stop: int, method: ExtremaMethod, trace: Trace | None, deriv_tol: float
) -> list[Extremum]:
    d1, d2 = derivatives(sig, method, trace)
    found = []
    for i in range(start, stop + 1):
        for kind in ExtremumKind:
            if _derivative_test(kind, d1[i], d2[i], deriv_tol):
                found.append(Extremum(kind, float(sig.times[i]), float(sig.values[i]), i))
    return found


def _more_extreme(new: Extremum, old: Extremum) -> bool:
    if new.kind is ExtremumKind.MIN:
        return new.v < old.v
    return new.v > old.v


def alternate(candidates: list[Extremum], prominence: float) -> list[Extremum]:
    """Reduce time-ordered candidates to a strictly alternating sequence.

    Same-kind neighbours keep the more extreme one (the earlier on ties);
    an opposite-kind candidate is kept only if it differs by more than ``prominence``.
    """
    out: list[Extremum] = []
    for c in candidates:
        if not out:
            out.append(c)
        elif c.kind is out[-1].kind:
            if _more_extreme(c, out[-1]):
                out[-1] = c
        elif abs(c.v - out[-1].v) > prominence:
            out.append(c)
    return out


def find_alternating_extrema(
    sig: Signal,
    lo: float,
    hi: float,
    method: ExtremaMethod | None = None,
    prominence: float = 0.0,
    trace: Trace | None = None,
    *,
    eq_tol: float = 1e-9,
    deriv_tol: float = 1e-6,
) -> list[Extremum]:
    method = method or ExtremaMethod()
    start, stop = window(sig.times, lo, hi, eq_tol)
    if start > stop:
        return []
    if method.kind is MethodKind.ANALYTICAL:
        candidates = _run_candidates(sig, start, stop, eq_tol)
    else:
        candidates = _derivative_candidates(sig, start, stop, method, trace, deriv_tol)
    return alternate(candidates, prominence)
