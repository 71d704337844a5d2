"""Verdicts and the witnesses attached to them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any


class Status(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TimePoint:
    index: int
    t: float
    value: float | None = None


@dataclass(frozen=True)
class Pair:
    """A cause occurrence and the effect occurrence that discharges it."""

    cause: TimePoint
    effect: TimePoint

    @property
    def distance(self) -> float:
        return abs(self.effect.t - self.cause.t)


@dataclass(frozen=True)
class Pairs:
    pairs: tuple[Pair, ...]


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Any = None
    reason: str = ""
    name: str = ""
    config: dict[str, Any] | None = field(default=None, compare=False)

    @classmethod
    def holds(cls, witness: Any = None, reason: str = "") -> Verdict:
        return cls(Status.HOLDS, witness, reason)

    @classmethod
    def violated(cls, reason: str, witness: Any = None) -> Verdict:
        return cls(Status.VIOLATED, witness, reason)

    @classmethod
    def inconclusive(cls, reason: str, witness: Any = None) -> Verdict:
        return cls(Status.INCONCLUSIVE, witness, reason)

    @property
    def ok(self) -> bool:
        return self.status is Status.HOLDS

    def named(self, name: str, config: dict[str, Any] | None = None) -> Verdict:
        return replace(self, name=name, config=config)
