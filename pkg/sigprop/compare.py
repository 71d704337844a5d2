"""Relational operators with absolute tolerance."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Op(str, Enum):
    LT = "<"
    LE = "<="
    EQ = "=="
    NE = "!="
    GE = ">="
    GT = ">"

    @classmethod
    def parse(cls, symbol: str) -> Op:
        if symbol == "=":
            return cls.EQ
        return cls(symbol)

    def dual(self) -> Op:
        """Operator obtained by swapping the operand order."""
        return _FLIPPED[self]

    def negated(self) -> Op:
        return _NEGATED[self]


_FLIPPED = {Op.LT: Op.GT, Op.LE: Op.GE, Op.GT: Op.LT, Op.GE: Op.LE, Op.EQ: Op.EQ, Op.NE: Op.NE}
_NEGATED = {Op.LT: Op.GE, Op.LE: Op.GT, Op.GT: Op.LE, Op.GE: Op.LT, Op.EQ: Op.NE, Op.NE: Op.EQ}


def compare(x, op: Op, y, tol: float):
    """Evaluate ``x op y`` with tolerance; works on scalars and numpy arrays.

    ``<`` and ``>=`` are exact complements, as are ``>``/``<=`` and ``==``/``!=``.
    """
    match op:
        case Op.LT:
            return x < y - tol
        case Op.LE:
            return x <= y + tol
        case Op.GT:
            return x > y + tol
        case Op.GE:
            return x >= y - tol
        case Op.EQ:
            return np.abs(x - y) <= tol
        case Op.NE:
            return np.abs(x - y) > tol
    raise ValueError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class Bound:
    """A constraint ``value op threshold``, used for features and distances."""

    op: Op
    threshold: float

    def holds(self, value: float, tol: float) -> bool:
        return bool(compare(value, self.op, self.threshold, tol))

    def upper_limit(self) -> float | None:
        """Largest admissible value, or None when the admissible set is unbounded above."""
        if self.op in (Op.LT, Op.LE, Op.EQ):
            return self.threshold
        return None

    def __str__(self) -> str:
        return f"{self.op.value} {self.threshold:g}"
