"""Discrete-time STL with bounded future and past operators, used as a reference checker."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sigprop.compare import Op, compare
from sigprop.errors import NotExpressible, OutOfDomain, PunctualInterval
from sigprop.nodes import (
    Body,
    Comparison,
    Conj,
    Const,
    DataAssertion,
    Disj,
    Negation,
    Pred,
    RiseFall,
    SignalRef,
    SpikeTwoParam,
)
from sigprop.trace import Trace, snap


@dataclass(frozen=True)
class Atom:
    signal: str
    op: Op
    c: float


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class Or:
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class And:
    args: tuple[Formula, ...]


def _check_interval(a: float, b: float) -> None:
    if a < 0 or not a < b:
        raise PunctualInterval(f"temporal interval [{a:g}, {b:g}] must satisfy 0 <= a < b")


@dataclass(frozen=True)
class Until:
    lhs: Formula
    rhs: Formula
    a: float
    b: float

    def __post_init__(self) -> None:
        _check_interval(self.a, self.b)


@dataclass(frozen=True)
class Since:
    lhs: Formula
    rhs: Formula
    a: float
    b: float

    def __post_init__(self) -> None:
        _check_interval(self.a, self.b)


Formula = Atom | TrueF | Not | Or | And | Until | Since

TRUE = TrueF()


def eventually(f: Formula, a: float, b: float) -> Until:
    return Until(TRUE, f, a, b)


def globally(f: Formula, a: float, b: float) -> Not:
    return Not(eventually(Not(f), a, b))


def once(f: Formula, a: float, b: float) -> Since:
    return Since(TRUE, f, a, b)


def historically(f: Formula, a: float, b: float) -> Not:
    return Not(once(Not(f), a, b))


def implies(p: Formula, q: Formula) -> Or:
    return Or((Not(p), q))


# --- satisfaction ---


def _count(bits: np.ndarray) -> np.ndarray:
    """Prefix sums with a leading zero: true bits in [i, j] number c[j+1] - c[i]."""
    return np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))


def _any_between(counts: np.ndarray, start: np.ndarray, stop: np.ndarray) -> np.ndarray:
    """Whether some bit in [start, stop] is true; empty ranges are false."""
    n = counts.size - 1
    first = np.clip(start, 0, n)
    last = np.clip(stop + 1, 0, n)
    return counts[np.maximum(last, first)] - counts[first] > 0


def _next_fail(bits: np.ndarray) -> np.ndarray:
    """First index >= i where bits is false, or n."""
    fails = np.flatnonzero(~bits)
    pos = np.searchsorted(fails, np.arange(bits.size), side="left")
    return np.append(fails, bits.size)[pos]


def _prev_fail(bits: np.ndarray) -> np.ndarray:
    """Last index <= i where bits is false, or -1."""
    fails = np.flatnonzero(~bits)
    pos = np.searchsorted(fails, np.arange(bits.size), side="right")
    return np.concatenate(([-1], fails))[pos]


def _until(lhs: np.ndarray, rhs: np.ndarray, times: np.ndarray, a: float, b: float, tol: float) -> np.ndarray:
    lo = np.searchsorted(times, times + a - tol, side="left")
    hi = np.searchsorted(times, times + b + tol, side="right") - 1
    # lhs must hold on every sample from t up to and including t'
    return _any_between(_count(rhs), lo, np.minimum(hi, _next_fail(lhs) - 1))


def _since(lhs: np.ndarray, rhs: np.ndarray, times: np.ndarray, a: float, b: float, tol: float) -> np.ndarray:
    lo = np.searchsorted(times, times - b - tol, side="left")
    hi = np.searchsorted(times, times - a + tol, side="right") - 1
    return _any_between(_count(rhs), np.maximum(lo, _prev_fail(lhs) + 1), hi)


def satisfaction(f: Formula, trace: Trace, tol: float = 1e-9) -> np.ndarray:
    """Truth of ``f`` at every grid point."""
    times = trace.times
    match f:
        case TrueF():
            return np.ones(times.size, dtype=bool)
        case Atom(signal=name, op=op, c=c):
            return np.asarray(compare(trace.signal(name).values, op, c, tol), dtype=bool)
        case Not(arg=arg):
            return ~satisfaction(arg, trace, tol)
        case And(args=args):
            return np.logical_and.reduce([satisfaction(g, trace, tol) for g in args])
        case Or(args=args):
            return np.logical_or.reduce([satisfaction(g, trace, tol) for g in args])
        case Until(lhs=lhs, rhs=rhs, a=a, b=b):
            return _until(satisfaction(lhs, trace, tol), satisfaction(rhs, trace, tol), times, a, b, tol)
        case Since(lhs=lhs, rhs=rhs, a=a, b=b):
            return _since(satisfaction(lhs, trace, tol), satisfaction(rhs, trace, tol), times, a, b, tol)
    raise TypeError(f"not an STL formula: {f!r}")


def eval_stl(f: Formula, trace: Trace, t: float | None = None, tol: float = 1e-9) -> bool:
    """Whether the trace satisfies ``f`` at grid time ``t`` (the first sample by default)."""
    i = 0 if t is None else snap(trace.times, t, tol)
    if i is None:
        raise OutOfDomain(f"t={t:g} is not a grid point of the trace")
    return bool(satisfaction(f, trace, tol)[i])


# --- translation of property bodies ---


def _atom(pred: Comparison) -> Formula:
    match pred.lhs, pred.rhs:
        case SignalRef(name=name), Const(value=c):
            return Atom(name, pred.op, c)
        case Const(value=c), SignalRef(name=name):
            return Atom(name, pred.op.dual(), c)
    raise NotExpressible("only comparisons between a signal and a constant are STL atoms", pred.span)


def pred_to_stl(pred: Pred) -> Formula:
    match pred:
        case Comparison():
            return _atom(pred)
        case Negation(arg=arg):
            return Not(pred_to_stl(arg))
        case Conj(args=args):
            return And(tuple(pred_to_stl(a) for a in args))
        case Disj(args=args):
            return Or(tuple(pred_to_stl(a) for a in args))
    raise TypeError(f"not a predicate: {pred!r}")


def rising_edge(p: Formula, delta: float) -> Formula:
    """p holds now and failed at the previous sample of a grid with step ``delta``."""
    return And((p, once(Not(p), delta / 2, 3 * delta / 2)))


def _edge_of(body: Body, delta: float) -> Formula:
    if isinstance(body, DataAssertion) and not body.intervals:
        return rising_edge(pred_to_stl(body.predicate), delta)
    raise NotExpressible("only untimed data assertions have an STL edge form", body.span)


def _whole(horizon: float | None, body: Body) -> float:
    if horizon is None:
        raise NotExpressible("an untimed property needs the trace horizon", body.span)
    return horizon


def to_stl(body: Body, delta: float, horizon: float | None = None) -> Formula:
    """STL formula equivalent to ``body`` on a uniform grid with step ``delta``.

    ``horizon`` is the trace length, needed for properties quantified over the whole trace.
    """
    match body:
        case DataAssertion(predicate=pred, intervals=intervals):
            p = pred_to_stl(pred)
            if not intervals:
                return globally(p, 0.0, _whole(horizon, body) + delta / 2)
            parts = []
            for iv in intervals:
                lo, hi = (max(iv.lo - delta / 2, 0.0), iv.hi + delta / 2) if iv.lo == iv.hi else (iv.lo, iv.hi)
                parts.append(globally(p, lo, hi))
            return And(tuple(parts))
        case SpikeTwoParam(m=m, w=w, derivative=column) if column is not None:
            up = Atom(column, Op.GT, m)
            down = Atom(column, Op.LT, -m)
            return eventually(And((up, eventually(down, 0.0, w))), 0.0, _whole(horizon, body) + delta / 2)
        case RiseFall(spec=spec) if not spec.monotonic:
            trigger = _edge_of(spec.trigger, delta)
            target = _edge_of(spec.target, delta)
            span = _whole(horizon, body) + delta / 2
            return globally(implies(trigger, eventually(target, 0.0, spec.rt)), 0.0, span)
    raise NotExpressible(f"{type(body).__name__} has no STL translation here", getattr(body, "span", None))
