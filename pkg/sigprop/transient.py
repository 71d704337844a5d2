"""Rise/fall time and overshoot/undershoot after a trigger event."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from sigprop.compare import Op, compare
from sigprop.config import EvalConfig
from sigprop.errors import InvalidThreshold
from sigprop.nodes import Comparison, Const, DataAssertion, ProjectionKind, SignalRef
from sigprop.relationship import Matching, occurrences, project
from sigprop.trace import Signal, Trace, window
from sigprop.verdict import Pair, TimePoint, Verdict

if TYPE_CHECKING:
    from sigprop.nodes import Body, OverUnderShoot, RiseFall


class Direction(str, Enum):
    RISE = "rise"
    FALL = "fall"


class ShootKind(str, Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"


@dataclass(frozen=True)
class RiseTimeSpec:
    trigger: Body
    target: Body
    rt: float
    direction: Direction = Direction.RISE
    monotonic: bool = False


@dataclass(frozen=True)
class Limit:
    """Absolute bound, or an offset from the target value when ``relative``."""

    value: float
    relative: bool = False

    def resolve(self, target: float | None) -> float:
        if not self.relative:
            return self.value
        if target is None:
            raise InvalidThreshold("relative limit needs a target of the form SIG op CONST")
        return target + self.value


@dataclass(frozen=True)
class OvershootSpec:
    trigger: Body
    target: Body
    oi: float
    limit: Limit
    kind: ShootKind = ShootKind.OVERSHOOT
    monotonic: bool = False

    @property
    def direction(self) -> Direction:
        return Direction.RISE if self.kind is ShootKind.OVERSHOOT else Direction.FALL


def target_value(body: Body) -> float | None:
    """The constant a target assertion compares its signal against, if it has one."""
    if not isinstance(body, DataAssertion) or not isinstance(body.predicate, Comparison):
        return None
    pred = body.predicate
    if isinstance(pred.lhs, SignalRef) and isinstance(pred.rhs, Const):
        return pred.rhs.value
    if isinstance(pred.lhs, Const) and isinstance(pred.rhs, SignalRef):
        return pred.lhs.value
    return None


def is_monotone(values: np.ndarray, start: int, stop: int, direction: Direction, tol: float) -> bool:
    """Strictly increasing (rise) or decreasing (fall) over samples start..stop."""
    seg = values[start : stop + 1]
    op = Op.LT if direction is Direction.RISE else Op.GT
    return bool(np.all(compare(seg[:-1], op, seg[1:], tol)))


def _edges(trigger: Body, target: Body, trace: Trace, cfg: EvalConfig) -> tuple[np.ndarray, np.ndarray]:
    trig = occurrences(project(trigger, trace, ProjectionKind.EVENT, cfg))
    tgt = occurrences(project(target, trace, ProjectionKind.EVENT, cfg))
    return trig, tgt


def _point(sig: Signal, i: int) -> TimePoint:
    return TimePoint(int(i), float(sig.times[i]), float(sig.values[i]))


def _rise(sig: Signal, spec: RiseTimeSpec, trace: Trace, cfg: EvalConfig) -> Matching:
    tol = cfg.eq_tol
    times, values = sig.times, sig.values
    t_last = float(times[-1])
    trig, tgt = _edges(spec.trigger, spec.target, trace, cfg)
    result = Matching()
    for st in trig:
        deadline = times[st] + spec.rt
        reached = None
        for k in tgt[tgt >= st]:
            if times[k] > deadline + tol:
                break
            if not spec.monotonic or is_monotone(values, st, k, spec.direction, tol):
                reached = k
                break
        if reached is not None:
            result.pairs.append(Pair(_point(sig, st), _point(sig, reached)))
        elif deadline > t_last + tol:
            result.open.append(_point(sig, st))
        else:
            result.violated.append(_point(sig, st))
    return result


def _shoot(sig: Signal, spec: OvershootSpec, trace: Trace, cfg: EvalConfig) -> Matching:
    tol = cfg.eq_tol
    times, values = sig.times, sig.values
    t_last = float(times[-1])
    limit = spec.limit.resolve(target_value(spec.target))
    op = Op.LE if spec.kind is ShootKind.OVERSHOOT else Op.GE
    trig, tgt = _edges(spec.trigger, spec.target, trace, cfg)
    result = Matching()
    for st in trig:
        candidates = tgt[tgt >= st]
        undetermined = candidates.size == 0
        matched = False
        for k in candidates:
            if spec.monotonic and not is_monotone(values, st, k, spec.direction, tol):
                continue
            end = times[k] + spec.oi
            _, stop = window(times, times[k], end, tol)
            if not np.all(compare(values[k : stop + 1], op, limit, tol)):
                continue
            if end > t_last + tol and math.isfinite(limit):
                undetermined = True
                continue
            result.pairs.append(Pair(_point(sig, st), _point(sig, k)))
            matched = True
            break
        if not matched:
            (result.open if undetermined else result.violated).append(_point(sig, st))
    return result


def rise_matching(body: RiseFall, trace: Trace, config: EvalConfig | None = None) -> Matching:
    return _rise(trace.signal(body.signal), body.spec, trace, config or EvalConfig())


def overshoot_matching(body: OverUnderShoot, trace: Trace, config: EvalConfig | None = None) -> Matching:
    return _shoot(trace.signal(body.signal), body.spec, trace, config or EvalConfig())


def check_rise_time(sig: Signal, spec: RiseTimeSpec, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    """Every trigger edge is followed within rt by the target being reached."""
    cfg = config or EvalConfig()
    return _rise(sig, spec, trace, cfg).verdict("trigger", cfg.strict)


def check_overshoot(sig: Signal, spec: OvershootSpec, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    """After each trigger, the target is reached and the signal then stays within the limit for oi."""
    cfg = config or EvalConfig()
    return _shoot(sig, spec, trace, cfg).verdict("trigger", cfg.strict)
