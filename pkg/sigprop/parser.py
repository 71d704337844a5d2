"""Property file parser: lark grammar to syntax tree."""

from __future__ import annotations

import functools
import math
from pathlib import Path

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from sigprop.compare import Bound, Op
from sigprop.errors import DuplicatePropertyName, OverlappingIntervals, PropertyError, PropertySyntaxError
from sigprop.extrema import ExtremaMethod, MethodKind
from sigprop.nodes import (
    Abs,
    BinOp,
    Comparison,
    Conj,
    Const,
    DataAssertion,
    Derivative,
    Disj,
    Functional,
    Interval,
    Negate,
    Negation,
    OscillationBody,
    Order,
    OverUnderShoot,
    Pattern,
    ProjectionKind,
    Property,
    RiseFall,
    SignalRef,
    SourceSpan,
    SpikeBody,
    SpikeTwoParam,
)
from sigprop.oscillation import AmplitudeMode, Damping, OscillationSpec, PeriodMode
from sigprop.spike import FEATURES, Anchor, Polarity, Psi, SpikeSpec
from sigprop.transient import Direction, Limit, OvershootSpec, RiseTimeSpec, ShootKind


@functools.cache
def _parser() -> Lark:
    return Lark.open(
        "grammar.lark",
        rel_to=__file__,
        parser="lalr",
        propagate_positions=True,
        maybe_placeholders=True,
    )


def _span(meta) -> SourceSpan | None:
    if getattr(meta, "empty", True):
        return None
    return SourceSpan(meta.line, meta.column, meta.start_pos, meta.end_pos)


def _token_span(tok: Token) -> SourceSpan:
    return SourceSpan(tok.line, tok.column, tok.start_pos, tok.end_pos)


def _number(tok: Token) -> float:
    value = float(tok)
    if not math.isfinite(value):
        raise PropertySyntaxError(f"numeric literal {tok} is not finite", _token_span(tok))
    return value


def _collect(options: tuple[tuple[str, object], ...], what: str, span: SourceSpan | None) -> dict[str, object]:
    seen: dict[str, object] = {}
    for key, value in options:
        if key in seen:
            raise PropertySyntaxError(f"{what} option {key!r} given twice", span)
        seen[key] = value
    return seen


@v_args(inline=True, meta=True)
class _Builder(Transformer):
    # --- file and properties ---

    def start(self, meta, *props: Property) -> list[Property]:
        names: set[str] = set()
        for prop in props:
            if prop.name in names:
                raise DuplicatePropertyName(f"property {prop.name!r} declared twice", prop.span)
            names.add(prop.name)
        return list(props)

    def prop(self, meta, name: Token, body) -> Property:
        return Property(str(name), body, _span(meta))

    # --- numbers and intervals ---

    def number(self, meta, tok: Token) -> float:
        return _number(tok)

    def negative(self, meta, tok: Token) -> float:
        return -_number(tok)

    def interval(self, meta, lo: float, hi: float) -> Interval:
        span = _span(meta)
        if lo < 0 or hi < 0:
            raise PropertySyntaxError(f"interval [{lo:g}, {hi:g}] has a negative bound", span)
        if lo > hi:
            raise PropertySyntaxError(f"interval [{lo:g}, {hi:g}] is reversed", span)
        return Interval(lo, hi, span)

    def intervals(self, meta, *items: Interval) -> tuple[Interval, ...]:
        ordered = sorted(items, key=lambda iv: iv.lo)
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.lo <= prev.hi:
                raise OverlappingIntervals(
                    f"intervals [{prev.lo:g}, {prev.hi:g}] and [{cur.lo:g}, {cur.hi:g}] overlap", cur.span
                )
        return tuple(items)

    # --- expressions and predicates ---

    def const(self, meta, tok: Token) -> Const:
        return Const(_number(tok), _span(meta))

    def ref(self, meta, tok: Token) -> SignalRef:
        return SignalRef(str(tok), _span(meta))

    def add(self, meta, left, right) -> BinOp:
        return BinOp("+", left, right, _span(meta))

    def sub(self, meta, left, right) -> BinOp:
        return BinOp("-", left, right, _span(meta))

    def mul(self, meta, left, right) -> BinOp:
        return BinOp("*", left, right, _span(meta))

    def div(self, meta, left, right) -> BinOp:
        return BinOp("/", left, right, _span(meta))

    def negate(self, meta, arg) -> Negate:
        return Negate(arg, _span(meta))

    def absolute(self, meta, arg) -> Abs:
        return Abs(arg, _span(meta))

    def derivative(self, meta, arg, order: Token | None) -> Derivative:
        n = 1 if order is None else _number(order)
        if n not in (1, 2):
            raise PropertySyntaxError(f"derivative order must be 1 or 2, got {order}", _span(meta))
        return Derivative(arg, int(n), _span(meta))

    def comparison(self, meta, lhs, op: Token, rhs) -> Comparison:
        return Comparison(lhs, Op.parse(str(op)), rhs, _span(meta))

    def conj(self, meta, *args) -> Conj:
        return Conj(tuple(args), _span(meta))

    def disj(self, meta, *args) -> Disj:
        return Disj(tuple(args), _span(meta))

    def negation(self, meta, arg) -> Negation:
        return Negation(arg, _span(meta))

    def assertion(self, meta, pred, intervals: tuple[Interval, ...] | None) -> DataAssertion:
        return DataAssertion(pred, intervals or (), _span(meta))

    # --- spikes ---

    def constraint(self, meta, name: Token, op: Token, value: float) -> tuple[str, str, Bound]:
        if str(name) not in FEATURES:
            raise PropertySyntaxError(
                f"unknown spike feature {str(name)!r}, expected one of {', '.join(FEATURES)}", _token_span(name)
            )
        return ("constraint", str(name), Bound(Op.parse(str(op)), value))

    def psi_fn(self, meta, tok: Token) -> str:
        return str(tok)

    def psi(self, meta, fn: str) -> tuple[str, Psi]:
        return ("psi", Psi(fn))

    def polarity(self, meta, tok: Token) -> tuple[str, Polarity]:
        return ("polarity", Polarity(str(tok)))

    def anchor_point(self, meta, tok: Token) -> str:
        return str(tok)

    def anchor(self, meta, point: str) -> tuple[str, Anchor]:
        return ("anchor", Anchor(point))

    def method(self, meta, name: Token, first: Token | None, second: Token | None) -> ExtremaMethod:
        try:
            kind = MethodKind(str(name))
        except ValueError:
            raise PropertySyntaxError(
                f"unknown extrema method {str(name)!r}, expected punctual, analytical or precomputed", _span(meta)
            ) from None
        if kind is MethodKind.PRECOMPUTED:
            if first is None:
                raise PropertySyntaxError("precomputed method needs (first, second) derivative columns", _span(meta))
            return ExtremaMethod.precomputed(str(first), str(second))
        if first is not None:
            raise PropertySyntaxError(f"method {kind.value} takes no derivative columns", _span(meta))
        return ExtremaMethod(kind)

    def method_opt(self, meta, method: ExtremaMethod) -> tuple[str, ExtremaMethod]:
        return ("method", method)

    def spike(self, meta, name: Token, window: Interval, *rest) -> SpikeBody:
        span = _span(meta)
        constraints = tuple((feature, bound) for tag, feature, bound in (r for r in rest if r[0] == "constraint"))
        features = [feature for feature, _ in constraints]
        for feature in set(features):
            if features.count(feature) > 1:
                raise PropertySyntaxError(f"spike feature {feature!r} constrained twice", span)
        opts = _collect(tuple(r for r in rest if r[0] != "constraint"), "spike", span)
        spec = SpikeSpec(
            window=(window.lo, window.hi),
            constraints=constraints,
            psi=opts.get("psi"),
            method=opts.get("method"),
            polarity=opts.get("polarity"),
        )
        return SpikeBody(str(name), spec, opts.get("anchor"), span)

    def param(self, meta, name: Token, value: float) -> tuple[str, float]:
        if str(name) not in ("m", "w"):
            raise PropertySyntaxError(f"unknown spike2 parameter {str(name)!r}, expected m or w", _token_span(name))
        return (str(name), value)

    def spike2(self, meta, name: Token, p1, p2, deriv: Token | None) -> SpikeTwoParam:
        params = _collect((p1, p2), "spike2", _span(meta))
        return SpikeTwoParam(
            str(name), params["m"], params["w"], None if deriv is None else str(deriv), _span(meta)
        )

    # --- oscillations ---

    def period_bound(self, meta, op: Token, value: float):
        return ("period", Bound(Op.parse(str(op)), value))

    def amplitude_bound(self, meta, op: Token, value: float):
        return ("amplitude", Bound(Op.parse(str(op)), value))

    def ref_value(self, meta, value: float):
        return ("ref", value)

    def pp(self, meta):
        return ("amplitude_mode", AmplitudeMode.PEAK_TO_PEAK)

    def avg_pp(self, meta):
        return ("amplitude_mode", AmplitudeMode.AVG_PEAK_TO_PEAK)

    def avg_period(self, meta):
        return ("period_mode", PeriodMode.AVERAGE)

    def prominence(self, meta, value: float):
        return ("prominence", value)

    def damped(self, meta):
        return ("damping", Damping.DAMPED)

    def driven(self, meta):
        return ("damping", Damping.DRIVEN)

    def trend(self, meta):
        return ("trend", True)

    def extreme(self, meta, tok: Token) -> str:
        return str(tok)

    def at(self, meta, which: str):
        return ("at", which)

    def oscillation(self, meta, name: Token, window: Interval, *rest) -> OscillationBody:
        span = _span(meta)
        opts = _collect(rest, "oscillation", span)
        if "ref" in opts and "amplitude_mode" in opts:
            raise PropertySyntaxError("ref selects the reference amplitude; it cannot be combined with pp or avg_pp", span)
        mode = AmplitudeMode.REFERENCE if "ref" in opts else opts.get("amplitude_mode", AmplitudeMode.PEAK_TO_PEAK)
        spec = OscillationSpec(
            window=(window.lo, window.hi),
            period=opts.get("period"),
            amplitude=opts.get("amplitude"),
            amplitude_mode=mode,
            ref=opts.get("ref"),
            period_mode=opts.get("period_mode", PeriodMode.PER_CYCLE),
            method=opts.get("method"),
            prominence=opts.get("prominence"),
            damping=opts.get("damping"),
            trend=bool(opts.get("trend", False)),
        )
        return OscillationBody(str(name), spec, opts.get("at"), span)

    # --- functional and order relationships ---

    def functional(self, meta, name: Token, expr, body) -> Functional:
        return Functional(str(name), expr, body, _span(meta))

    def kind(self, meta, tok: Token) -> ProjectionKind:
        return ProjectionKind(str(tok))

    def bound(self, meta, op: Token, value: float) -> Bound:
        return Bound(Op.parse(str(op)), value)

    def response(self, meta, cause_kind, cause, effect_kind, effect, bound) -> Order:
        return Order(Pattern.RESPONSE, cause_kind, cause, effect_kind, effect, bound, _span(meta))

    def precedence(self, meta, effect_kind, effect, cause_kind, cause, bound) -> Order:
        return Order(Pattern.PRECEDENCE, cause_kind, cause, effect_kind, effect, bound, _span(meta))

    # --- transients ---

    def direction(self, meta, tok: Token) -> Direction:
        return Direction(str(tok))

    def monotonic(self, meta, tok: Token) -> bool:
        return True

    def rise(self, meta, direction: Direction, name: Token, target, trigger, rt: float, monotonic) -> RiseFall:
        spec = RiseTimeSpec(trigger, target, rt, direction, bool(monotonic))
        return RiseFall(str(name), spec, _span(meta))

    def shoot_kind(self, meta, tok: Token) -> ShootKind:
        return ShootKind(str(tok))

    def limit_side(self, meta, tok: Token) -> str:
        return str(tok)

    def absolute_limit(self, meta, value: float) -> Limit:
        return Limit(value)

    def target_plus(self, meta, tok: Token) -> Limit:
        return Limit(_number(tok), relative=True)

    def target_minus(self, meta, tok: Token) -> Limit:
        return Limit(-_number(tok), relative=True)

    def limit(self, meta, side: str, value: Limit) -> tuple[str, Limit]:
        return (side, value)

    def shoot(self, meta, kind: ShootKind, name: Token, target, trigger, limit, oi: float, monotonic) -> OverUnderShoot:
        side, value = limit
        expected = "max" if kind is ShootKind.OVERSHOOT else "min"
        if side != expected:
            raise PropertySyntaxError(f"{kind.value} takes a {expected} limit, got {side}", _span(meta))
        spec = OvershootSpec(trigger, target, oi, value, kind, bool(monotonic))
        return OverUnderShoot(str(name), spec, _span(meta))


def _error_span(text: str, err: UnexpectedInput) -> SourceSpan:
    pos = err.pos_in_stream if isinstance(err.pos_in_stream, int) and err.pos_in_stream >= 0 else len(text) - 1
    pos = min(max(pos, 0), max(len(text) - 1, 0))
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return SourceSpan(line, column, pos, min(pos + 1, len(text)))


def _error_message(text: str, err: UnexpectedInput) -> str:
    match err:
        case UnexpectedToken(token=tok) if tok.type == "$END":
            return "unexpected end of input"
        case UnexpectedToken(token=tok):
            expected = ", ".join(sorted(err.accepts or err.expected))
            return f"unexpected {tok.value!r}, expected one of: {expected}"
        case UnexpectedCharacters():
            return f"unexpected character {text[err.pos_in_stream]!r}"
    return str(err).splitlines()[0]


def parse(text: str) -> list[Property]:
    """Parse a property file into syntax trees, in declaration order."""
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as e:
        raise PropertySyntaxError(_error_message(text, e), _error_span(text, e)) from None
    try:
        return _Builder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, PropertyError):
            raise e.orig_exc from None
        raise PropertySyntaxError(str(e.orig_exc)) from e.orig_exc


def parse_file(path: str | Path) -> list[Property]:
    return parse(Path(path).read_text(encoding="utf-8"))
