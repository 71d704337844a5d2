"""Data assertions: predicates over signal values, untimed or on disjoint intervals."""

from __future__ import annotations

import numpy as np

from sigprop.compare import compare
from sigprop.config import EvalConfig
from sigprop.nodes import Comparison, Conj, DataAssertion, Disj, Negation, Pred
from sigprop.trace import Trace, snap, window
from sigprop.transform import evaluate
from sigprop.verdict import TimePoint, Verdict


def predicate_mask(pred: Pred, trace: Trace, eq_tol: float = 1e-9) -> np.ndarray:
    """Truth of ``pred`` at each grid point where all its operands are defined."""
    match pred:
        case Comparison(lhs=lhs, op=op, rhs=rhs):
            _, lv = evaluate(lhs, trace, eq_tol)
            _, rv = evaluate(rhs, trace, eq_tol)
            n = min(lv.size, rv.size)
            return np.asarray(compare(lv[:n], op, rv[:n], eq_tol), dtype=bool)
        case Negation(arg=arg):
            return ~predicate_mask(arg, trace, eq_tol)
        case Conj(args=args) | Disj(args=args):
            masks = [predicate_mask(a, trace, eq_tol) for a in args]
            n = min(m.size for m in masks)
            stacked = np.stack([m[:n] for m in masks])
            return stacked.all(axis=0) if isinstance(pred, Conj) else stacked.any(axis=0)
    raise TypeError(f"not a predicate: {pred!r}")


def predicate_at(pred: Pred, trace: Trace, t: float, eq_tol: float = 1e-9) -> bool | None:
    """Truth of ``pred`` at an arbitrary instant using linearly interpolated operands.

    None when some operand is undefined at ``t``.
    """
    match pred:
        case Comparison(lhs=lhs, op=op, rhs=rhs):
            values = []
            for side in (lhs, rhs):
                times, vals = evaluate(side, trace, eq_tol)
                if t < times[0] - eq_tol or t > times[-1] + eq_tol:
                    return None
                values.append(float(np.interp(t, times, vals)))
            return bool(compare(values[0], op, values[1], eq_tol))
        case Negation(arg=arg):
            inner = predicate_at(arg, trace, t, eq_tol)
            return None if inner is None else not inner
        case Conj(args=args) | Disj(args=args):
            results = [predicate_at(a, trace, t, eq_tol) for a in args]
            if any(r is None for r in results):
                return None
            return all(results) if isinstance(pred, Conj) else any(results)
    raise TypeError(f"not a predicate: {pred!r}")


def assertion_mask(da: DataAssertion, trace: Trace, eq_tol: float = 1e-9) -> np.ndarray:
    """Per-sample truth restricted to the assertion's intervals, padded to the grid."""
    mask = predicate_mask(da.predicate, trace, eq_tol)
    out = np.zeros(len(trace), dtype=bool)
    out[: mask.size] = mask
    if da.intervals:
        inside = np.zeros(len(trace), dtype=bool)
        for interval in da.intervals:
            start, stop = window(trace.times, interval.lo, interval.hi, eq_tol)
            inside[start : stop + 1] = True
        out &= inside
    return out


def _lhs_value(pred: Pred, trace: Trace, index: int, eq_tol: float) -> float | None:
    if isinstance(pred, Comparison):
        _, values = evaluate(pred.lhs, trace, eq_tol)
        if index < values.size:
            return float(values[index])
    return None


def check_assertion(da: DataAssertion, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    cfg = config or EvalConfig()
    tol = cfg.eq_tol
    times = trace.times
    mask = predicate_mask(da.predicate, trace, tol)
    defined = mask.size
    spans = [(i.lo, i.hi) for i in da.intervals] or [(float(times[0]), float(times[defined - 1]))]

    violations: list[TimePoint] = []
    checked = 0
    for lo, hi in spans:
        start, stop = window(times, lo, hi, tol)
        stop = min(stop, defined - 1)
        if start > stop:
            continue
        checked += stop - start + 1
        bad = np.flatnonzero(~mask[start : stop + 1])
        if bad.size:
            i = start + int(bad[0])
            violations.append(TimePoint(i, float(times[i]), _lhs_value(da.predicate, trace, i, tol)))
        if cfg.interp == "linear":
            for t in (lo, hi):
                if snap(times, t, tol) is not None:
                    continue
                if predicate_at(da.predicate, trace, t, tol) is False:
                    i = max(int(np.searchsorted(times, t)) - 1, 0)
                    violations.append(TimePoint(i, float(t)))

    if violations:
        first = min(violations, key=lambda p: p.t)
        return Verdict.violated(f"predicate fails at t={first.t:g}", witness=first)
    return Verdict.holds(reason=f"{checked} samples checked")
