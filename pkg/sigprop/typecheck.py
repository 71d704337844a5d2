"""Static checks of parsed properties against a trace header."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from sigprop.compare import Bound, Op
from sigprop.errors import (
    InvalidThreshold,
    InvalidTransform,
    MissingDerivativeColumn,
    NotProjectable,
    UnknownSignal,
)
from sigprop.extrema import ExtremaMethod
from sigprop.nodes import (
    Abs,
    BinOp,
    Body,
    Comparison,
    Conj,
    DataAssertion,
    Derivative,
    Disj,
    Expr,
    Functional,
    Negate,
    Negation,
    OscillationBody,
    Order,
    OverUnderShoot,
    Pred,
    Property,
    ProjectionKind,
    RiseFall,
    SignalRef,
    SourceSpan,
    SpikeBody,
    SpikeTwoParam,
)
from sigprop.trace import CLOCK
from sigprop.transform import is_signal_valued
from sigprop.transient import target_value


@dataclass(frozen=True)
class CheckedProperty:
    prop: Property
    signals: frozenset[str]

    @property
    def name(self) -> str:
        return self.prop.name


def expr_signals(expr: Expr) -> Iterator[SignalRef]:
    match expr:
        case SignalRef():
            yield expr
        case BinOp(left=left, right=right):
            yield from expr_signals(left)
            yield from expr_signals(right)
        case Abs(arg=arg) | Negate(arg=arg) | Derivative(arg=arg):
            yield from expr_signals(arg)


def pred_exprs(pred: Pred) -> Iterator[Expr]:
    match pred:
        case Comparison(lhs=lhs, rhs=rhs):
            yield lhs
            yield rhs
        case Conj(args=args) | Disj(args=args):
            for arg in args:
                yield from pred_exprs(arg)
        case Negation(arg=arg):
            yield from pred_exprs(arg)


def _derivatives(expr: Expr) -> Iterator[Derivative]:
    match expr:
        case Derivative(arg=arg):
            yield expr
            yield from _derivatives(arg)
        case BinOp(left=left, right=right):
            yield from _derivatives(left)
            yield from _derivatives(right)
        case Abs(arg=arg) | Negate(arg=arg):
            yield from _derivatives(arg)


class _Checker:
    def __init__(self, header: Iterable[str]) -> None:
        self.header = frozenset(header) | {CLOCK}
        self.used: set[str] = set()

    def signal(self, name: str, scope: frozenset[str], span: SourceSpan | None) -> None:
        if name not in scope:
            raise UnknownSignal(f"unknown signal {name!r}", span)
        self.used.add(name)

    def column(self, name: str, scope: frozenset[str], span: SourceSpan | None, what: str) -> None:
        if name not in scope:
            raise MissingDerivativeColumn(f"{what} column {name!r} not in trace", span)
        self.used.add(name)

    def expr(self, expr: Expr, scope: frozenset[str]) -> None:
        for ref in expr_signals(expr):
            self.signal(ref.name, scope, ref.span or expr.span)
        for der in _derivatives(expr):
            if not is_signal_valued(der.arg):
                raise InvalidTransform("der() applied to a constant expression", der.span)

    def method(self, method: ExtremaMethod | None, scope: frozenset[str], span: SourceSpan | None) -> None:
        for col in method.columns() if method else ():
            self.column(col, scope, span, "derivative")

    def body(self, body: Body, scope: frozenset[str]) -> None:
        span = body.span
        match body:
            case DataAssertion(predicate=pred):
                for expr in pred_exprs(pred):
                    self.expr(expr, scope)

            case SpikeBody(signal=signal, spec=spec):
                self.signal(signal, scope, span)
                _window(spec.window, "spike", span)
                for feature, bound in spec.constraints:
                    _non_negative(bound, f"spike feature {feature}", span)
                self.method(spec.method, scope, span)

            case SpikeTwoParam(signal=signal, m=m, w=w, derivative=derivative):
                self.signal(signal, scope, span)
                if m <= 0 or w <= 0:
                    raise InvalidThreshold(f"spike2 needs m > 0 and w > 0, got m={m:g}, w={w:g}", span)
                if derivative is not None:
                    self.column(derivative, scope, span, "derivative")

            case OscillationBody(signal=signal, spec=spec):
                self.signal(signal, scope, span)
                _window(spec.window, "oscillation", span)
                if spec.period is not None:
                    _non_negative(spec.period, "oscillation period", span)
                if spec.amplitude is not None:
                    _non_negative(spec.amplitude, "oscillation amplitude", span)
                if spec.prominence is not None and spec.prominence < 0:
                    raise InvalidThreshold(f"prominence must be >= 0, got {spec.prominence:g}", span)
                self.method(spec.method, scope, span)

            case Functional(target=target, expr=expr, body=inner):
                self.expr(expr, scope)
                if not is_signal_valued(expr):
                    raise InvalidTransform(f"let {target} does not depend on any signal", span)
                self.body(inner, scope | {target})

            case Order(cause=cause, effect=effect, bound=bound):
                if bound is not None:
                    _non_negative(bound, "distance bound", span)
                self.sub_body(cause, body.cause_kind, scope)
                self.sub_body(effect, body.effect_kind, scope)

            case RiseFall(signal=signal, spec=spec):
                self.signal(signal, scope, span)
                if not spec.rt > 0:
                    raise InvalidThreshold(f"rise time must be > 0, got {spec.rt:g}", span)
                self.sub_body(spec.trigger, ProjectionKind.EVENT, scope)
                self.sub_body(spec.target, ProjectionKind.EVENT, scope)

            case OverUnderShoot(signal=signal, spec=spec):
                self.signal(signal, scope, span)
                if not spec.oi > 0:
                    raise InvalidThreshold(f"overshoot interval must be > 0, got {spec.oi:g}", span)
                if spec.limit.relative and target_value(spec.target) is None:
                    raise InvalidThreshold("a target-relative limit needs a target of the form SIG op CONST", span)
                self.sub_body(spec.trigger, ProjectionKind.EVENT, scope)
                self.sub_body(spec.target, ProjectionKind.EVENT, scope)

    def sub_body(self, body: Body, kind: ProjectionKind, scope: frozenset[str]) -> None:
        """A body nested in a relationship must have a boolean projection of ``kind``."""
        inner = body
        while isinstance(inner, Functional):
            inner = inner.body
        if isinstance(inner, SpikeTwoParam):
            raise NotProjectable("spike2 has no boolean projection", inner.span)
        if kind is ProjectionKind.STATE and isinstance(inner, Order | RiseFall | OverUnderShoot):
            raise NotProjectable(f"{type(inner).__name__} can only be projected as an event", inner.span)
        self.body(body, scope)


def _window(window: tuple[float, float], what: str, span: SourceSpan | None) -> None:
    lo, hi = window
    if not lo < hi:
        raise InvalidThreshold(f"{what} window [{lo:g}, {hi:g}] is empty", span)


def _non_negative(bound: Bound, what: str, span: SourceSpan | None) -> None:
    if bound.threshold < 0:
        raise InvalidThreshold(f"{what} {bound} has a negative threshold", span)
    if bound.threshold == 0 and bound.op is Op.LT:
        raise InvalidThreshold(f"{what} {bound} can never be met", span)


def typecheck(prop: Property, header: Iterable[str]) -> CheckedProperty:
    """Resolve every signal reference of ``prop`` against the trace columns."""
    checker = _Checker(header)
    checker.body(prop.body, checker.header)
    return CheckedProperty(prop, frozenset(checker.used))
