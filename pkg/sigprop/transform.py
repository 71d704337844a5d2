"""Pointwise evaluation of signal-transforming expressions."""

from __future__ import annotations

import numpy as np

from sigprop.errors import DivisionByZero, InvalidTransform, TooFewSamples
from sigprop.nodes import Abs, BinOp, Const, Derivative, Expr, Negate, SignalRef
from sigprop.trace import Signal, Trace


def is_signal_valued(expr: Expr) -> bool:
    match expr:
        case SignalRef():
            return True
        case Const():
            return False
        case BinOp(left=left, right=right):
            return is_signal_valued(left) or is_signal_valued(right)
        case Abs(arg=arg) | Negate(arg=arg) | Derivative(arg=arg):
            return is_signal_valued(arg)
    raise TypeError(f"not an expression: {expr!r}")


def evaluate(expr: Expr, trace: Trace, eq_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Times and values of ``expr``; derivatives shorten the result by their order."""
    match expr:
        case SignalRef(name=name):
            sig = trace.signal(name)
            return sig.times, sig.values
        case Const(value=value):
            return trace.times, np.full(len(trace), float(value))
        case Negate(arg=arg):
            times, values = evaluate(arg, trace, eq_tol)
            return times, -values
        case Abs(arg=arg):
            times, values = evaluate(arg, trace, eq_tol)
            return times, np.abs(values)
        case Derivative(arg=arg, order=order):
            if not is_signal_valued(arg):
                raise InvalidTransform("der() applied to a constant expression", expr.span)
            times, values = evaluate(arg, trace, eq_tol)
            if values.size < order + 1:
                raise TooFewSamples(f"order-{order} derivative needs {order + 1} samples")
            for _ in range(order):
                values = np.diff(values) / np.diff(times)
                times = times[:-1]
            return times, values
        case BinOp(op=op, left=left, right=right):
            lt, lv = evaluate(left, trace, eq_tol)
            rt, rv = evaluate(right, trace, eq_tol)
            n = min(lv.size, rv.size)
            times, lv, rv = (lt if lt.size <= rt.size else rt)[:n], lv[:n], rv[:n]
            match op:
                case "+":
                    return times, lv + rv
                case "-":
                    return times, lv - rv
                case "*":
                    return times, lv * rv
                case "/":
                    zero = np.abs(rv) <= eq_tol
                    if np.any(zero):
                        raise DivisionByZero(float(times[int(np.argmax(zero))]))
                    return times, lv / rv
            raise InvalidTransform(f"unknown operator {op!r}", expr.span)
    raise TypeError(f"not an expression: {expr!r}")


def apply_transform(expr: Expr, trace: Trace, name: str = "target", eq_tol: float = 1e-9) -> Signal:
    """The target signal obtained by applying ``expr`` at every grid point."""
    times, values = evaluate(expr, trace, eq_tol)
    return Signal(name, times, values)
