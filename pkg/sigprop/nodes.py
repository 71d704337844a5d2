"""Syntax tree of the property language."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sigprop.compare import Bound, Op
    from sigprop.oscillation import OscillationSpec
    from sigprop.spike import Anchor, SpikeSpec
    from sigprop.transient import OvershootSpec, RiseTimeSpec


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int


def _span():
    return field(default=None, compare=False, repr=False)


# --- transform expressions ---


@dataclass(frozen=True)
class SignalRef:
    name: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Const:
    value: float
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: Expr
    right: Expr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Abs:
    arg: Expr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Negate:
    arg: Expr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Derivative:
    arg: Expr
    order: int = 1
    span: SourceSpan | None = _span()


Expr = SignalRef | Const | BinOp | Abs | Negate | Derivative


# --- predicates ---


@dataclass(frozen=True)
class Comparison:
    lhs: Expr
    op: Op
    rhs: Expr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Conj:
    args: tuple[Pred, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Disj:
    args: tuple[Pred, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Negation:
    arg: Pred
    span: SourceSpan | None = _span()


Pred = Comparison | Conj | Disj | Negation


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    span: SourceSpan | None = _span()


# --- property bodies ---


class ProjectionKind(str, Enum):
    EVENT = "event"
    STATE = "state"


class Pattern(str, Enum):
    RESPONSE = "response"
    PRECEDENCE = "precedence"


@dataclass(frozen=True)
class DataAssertion:
    predicate: Pred
    intervals: tuple[Interval, ...] = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SpikeBody:
    signal: str
    spec: SpikeSpec
    anchor: Anchor | None = None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SpikeTwoParam:
    signal: str
    m: float
    w: float
    derivative: str | None = None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class OscillationBody:
    signal: str
    spec: OscillationSpec
    at: str | None = None  # "min", "max" or "any"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Functional:
    target: str
    expr: Expr
    body: Body
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Order:
    pattern: Pattern
    cause_kind: ProjectionKind
    cause: Body
    effect_kind: ProjectionKind
    effect: Body
    bound: Bound | None = None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RiseFall:
    signal: str
    spec: RiseTimeSpec
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class OverUnderShoot:
    signal: str
    spec: OvershootSpec
    span: SourceSpan | None = _span()


Body = DataAssertion | SpikeBody | SpikeTwoParam | OscillationBody | Functional | Order | RiseFall | OverUnderShoot


@dataclass(frozen=True)
class Property:
    name: str
    body: Body
    span: SourceSpan | None = _span()
