"""Canonical pretty-printer for property syntax trees."""

from __future__ import annotations

from collections.abc import Iterable

from sigprop.compare import Bound
from sigprop.extrema import ExtremaMethod, MethodKind
from sigprop.nodes import (
    Abs,
    BinOp,
    Body,
    Comparison,
    Conj,
    Const,
    DataAssertion,
    Derivative,
    Disj,
    Expr,
    Functional,
    Interval,
    Negate,
    Negation,
    OscillationBody,
    Order,
    OverUnderShoot,
    Pattern,
    Pred,
    Property,
    RiseFall,
    SignalRef,
    SpikeBody,
    SpikeTwoParam,
)
from sigprop.oscillation import AmplitudeMode, PeriodMode
from sigprop.transient import Limit, ShootKind

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_number(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _bound(bound: Bound) -> str:
    return f"{bound.op.value} {format_number(bound.threshold)}"


def _interval(iv: Interval | tuple[float, float]) -> str:
    lo, hi = (iv.lo, iv.hi) if isinstance(iv, Interval) else iv
    return f"[{format_number(lo)}, {format_number(hi)}]"


def _level(expr: Expr) -> int:
    match expr:
        case BinOp(op=op):
            return _PRECEDENCE[op]
        case Negate():
            return 3
        case Const(value=v) if v < 0:
            return 3
    return 4


def format_expr(expr: Expr) -> str:
    match expr:
        case SignalRef(name=name):
            return name
        case Const(value=v):
            return format_number(v)
        case Abs(arg=arg):
            return f"abs({format_expr(arg)})"
        case Derivative(arg=arg, order=1):
            return f"der({format_expr(arg)})"
        case Derivative(arg=arg, order=order):
            return f"der({format_expr(arg)}, {order})"
        case Negate(arg=arg):
            inner = format_expr(arg)
            return f"-{inner}" if _level(arg) >= 3 else f"-({inner})"
        case BinOp(op=op, left=left, right=right):
            level = _PRECEDENCE[op]
            lhs = format_expr(left)
            rhs = format_expr(right)
            if _level(left) < level:
                lhs = f"({lhs})"
            # left associative: an equal-level right operand keeps its parentheses
            if _level(right) <= level:
                rhs = f"({rhs})"
            return f"{lhs} {op} {rhs}"
    raise TypeError(f"not an expression: {expr!r}")


def format_pred(pred: Pred) -> str:
    match pred:
        case Comparison(lhs=lhs, op=op, rhs=rhs):
            return f"{format_expr(lhs)} {op.value} {format_expr(rhs)}"
        case Disj(args=args):
            return " or ".join(_wrap(a, Disj) for a in args)
        case Conj(args=args):
            return " and ".join(_wrap(a, Disj | Conj) for a in args)
        case Negation(arg=arg):
            return f"not {_wrap(arg, Disj | Conj)}"
    raise TypeError(f"not a predicate: {pred!r}")


def _wrap(pred: Pred, types) -> str:
    text = format_pred(pred)
    return f"({text})" if isinstance(pred, types) else text


def _method(method: ExtremaMethod) -> str:
    if method.kind is MethodKind.PRECOMPUTED:
        return f"precomputed({method.first}, {method.second})"
    return method.kind.value


def _limit(kind: ShootKind, limit: Limit) -> str:
    side = "max" if kind is ShootKind.OVERSHOOT else "min"
    if not limit.relative:
        return f"{side} {format_number(limit.value)}"
    sign = "-" if limit.value < 0 else "+"
    return f"{side} target {sign} {format_number(abs(limit.value))}"


def format_body(body: Body) -> str:
    match body:
        case DataAssertion(predicate=pred, intervals=intervals):
            text = f"assert {format_pred(pred)}"
            if intervals:
                text += " in " + ", ".join(_interval(iv) for iv in intervals)
            return text
        case SpikeBody(signal=signal, spec=spec, anchor=anchor):
            constraints = ", ".join(f"{name} {_bound(b)}" for name, b in spec.constraints)
            parts = [f"spike on {signal} in {_interval(spec.window)} with {constraints}"]
            if spec.psi is not None:
                parts.append(f"psi {spec.psi.value}")
            if spec.method is not None:
                parts.append(f"method {_method(spec.method)}")
            if spec.polarity is not None:
                parts.append(spec.polarity.value)
            if anchor is not None:
                parts.append(f"anchor {anchor.value}")
            return " ".join(parts)
        case SpikeTwoParam(signal=signal, m=m, w=w, derivative=derivative):
            text = f"spike2 on {signal} with m = {format_number(m)}, w = {format_number(w)}"
            return text + (f" deriv {derivative}" if derivative else "")
        case OscillationBody(signal=signal, spec=spec, at=at):
            bounds = []
            if spec.period is not None:
                bounds.append(f"period {_bound(spec.period)}")
            if spec.amplitude is not None:
                bounds.append(f"amplitude {_bound(spec.amplitude)}")
            parts = [f"oscillation on {signal} in {_interval(spec.window)} with {', '.join(bounds)}"]
            match spec.amplitude_mode:
                case AmplitudeMode.REFERENCE:
                    parts.append(f"ref {format_number(spec.ref)}")
                case AmplitudeMode.AVG_PEAK_TO_PEAK:
                    parts.append("avg_pp")
            if spec.period_mode is PeriodMode.AVERAGE:
                parts.append("avg_period")
            if spec.method is not None:
                parts.append(f"method {_method(spec.method)}")
            if spec.prominence is not None:
                parts.append(f"prominence {format_number(spec.prominence)}")
            if spec.damping is not None:
                parts.append(spec.damping.value)
            if spec.trend:
                parts.append("trend")
            if at is not None:
                parts.append(f"at {at}")
            return " ".join(parts)
        case Functional(target=target, expr=expr, body=inner):
            return f"let {target} = {format_expr(expr)} then {format_body(inner)}"
        case Order(pattern=Pattern.RESPONSE) as o:
            text = (
                f"whenever {o.cause_kind.value} ({format_body(o.cause)}) "
                f"then {o.effect_kind.value} ({format_body(o.effect)})"
            )
            return text + (f" within {_bound(o.bound)}" if o.bound else "")
        case Order(pattern=Pattern.PRECEDENCE) as o:
            text = (
                f"before {o.effect_kind.value} ({format_body(o.effect)}) "
                f"requires {o.cause_kind.value} ({format_body(o.cause)})"
            )
            return text + (f" within {_bound(o.bound)}" if o.bound else "")
        case RiseFall(signal=signal, spec=spec):
            text = (
                f"{spec.direction.value} on {signal} to ({format_body(spec.target)}) "
                f"after ({format_body(spec.trigger)}) within {format_number(spec.rt)}"
            )
            return text + (" monotonic" if spec.monotonic else "")
        case OverUnderShoot(signal=signal, spec=spec):
            text = (
                f"{spec.kind.value} on {signal} to ({format_body(spec.target)}) "
                f"after ({format_body(spec.trigger)}) {_limit(spec.kind, spec.limit)} over {format_number(spec.oi)}"
            )
            return text + (" monotonic" if spec.monotonic else "")
    raise TypeError(f"not a property body: {body!r}")


def format_property(prop: Property) -> str:
    return f"property {prop.name}: {format_body(prop.body)};"


def format_properties(props: Iterable[Property]) -> str:
    return "".join(format_property(p) + "\n" for p in props)
