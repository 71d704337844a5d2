"""Functional and order relationships over boolean projections of sub-properties."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sigprop.assertion import assertion_mask
from sigprop.compare import Bound, compare
from sigprop.config import EvalConfig
from sigprop.errors import GridMismatch, NotProjectable
from sigprop.nodes import (
    Body,
    DataAssertion,
    Functional,
    OscillationBody,
    Order,
    OverUnderShoot,
    Pattern,
    ProjectionKind,
    RiseFall,
    SpikeBody,
)
from sigprop.oscillation import check_oscillation
from sigprop.spike import Anchor, find_spikes
from sigprop.trace import Trace
from sigprop.transform import apply_transform
from sigprop.verdict import Pair, Pairs, TimePoint, Verdict


@dataclass(frozen=True, eq=False)
class BooleanProjection:
    kind: ProjectionKind
    bits: np.ndarray
    times: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        if self.bits.shape != self.times.shape:
            raise GridMismatch(f"projection has {self.bits.size} bits for {self.times.size} samples")


def rising_edge_indices(bits: np.ndarray) -> np.ndarray:
    """Samples i >= 1 where bits switch from false to true."""
    bits = np.asarray(bits, dtype=bool)
    return np.flatnonzero(bits[1:] & ~bits[:-1]) + 1


def rising_edges(proj: BooleanProjection) -> np.ndarray:
    return proj.times[rising_edge_indices(proj.bits)]


def occurrences(proj: BooleanProjection) -> np.ndarray:
    """Edges of an event projection, or every true sample of a state projection."""
    if proj.kind is ProjectionKind.EVENT:
        return rising_edge_indices(proj.bits)
    return np.flatnonzero(proj.bits)


def functional_trace(body: Functional, trace: Trace, config: EvalConfig | None = None) -> Trace:
    """The trace extended with the target signal, cut to the target's length."""
    cfg = config or EvalConfig()
    target = apply_transform(body.expr, trace, body.target, cfg.eq_tol)
    base = trace if len(target) == len(trace) else trace.truncated(len(target))
    return base.with_signal(target)


def project(
    body: Body, trace: Trace, kind: ProjectionKind, config: EvalConfig | None = None
) -> BooleanProjection:
    """Boolean signal marking where ``body`` occurs (event) or holds (state)."""
    cfg = config or EvalConfig()
    n = len(trace)
    bits = np.zeros(n, dtype=bool)
    label = type(body).__name__

    match body:
        case DataAssertion():
            mask = assertion_mask(body, trace, cfg.eq_tol)
            if kind is ProjectionKind.STATE:
                bits = mask
            else:
                bits[1:] = mask[1:] & ~mask[:-1]

        case SpikeBody():
            anchor = body.anchor or Anchor(cfg.spike_anchor)
            for spike in find_spikes(trace.signal(body.signal), body.spec, trace, cfg):
                if kind is ProjectionKind.EVENT:
                    bits[spike.anchor_index(anchor)] = True
                else:
                    bits[spike.indices[0] : spike.indices[2] + 1] = True

        case OscillationBody():
            verdict = check_oscillation(trace.signal(body.signal), body.spec, trace, cfg)
            if verdict.ok:
                extrema = verdict.witness.stats.extrema
                if kind is ProjectionKind.EVENT:
                    for e in extrema:
                        if body.at in (None, "any") or e.kind.value == body.at:
                            bits[e.index] = True
                else:
                    bits[extrema[0].index : extrema[-1].index + 1] = True

        case Functional():
            sub = project(body.body, functional_trace(body, trace, cfg), kind, cfg)
            bits[: sub.bits.size] = sub.bits

        case Order() | RiseFall() | OverUnderShoot():
            if kind is not ProjectionKind.EVENT:
                raise NotProjectable(f"{label} can only be projected as an event", body.span)
            for pair in _matching_for(body, trace, cfg).pairs:
                bits[pair.effect.index] = True

        case _:
            raise NotProjectable(f"{label} has no boolean projection", getattr(body, "span", None))

    return BooleanProjection(kind, np.asarray(bits, dtype=bool), trace.times, label)


def _matching_for(body: Order | RiseFall | OverUnderShoot, trace: Trace, cfg: EvalConfig) -> Matching:
    if isinstance(body, Order):
        return order_matching(body, trace, cfg)
    from sigprop.transient import overshoot_matching, rise_matching

    if isinstance(body, RiseFall):
        return rise_matching(body, trace, cfg)
    return overshoot_matching(body, trace, cfg)


@dataclass
class Matching:
    """Outcome of pairing obligations with their discharging occurrences."""

    pairs: list[Pair] = field(default_factory=list)
    violated: list[TimePoint] = field(default_factory=list)
    open: list[TimePoint] = field(default_factory=list)

    def verdict(self, what: str, strict: bool = False) -> Verdict:
        unmatched = self.violated + (self.open if strict else [])
        if unmatched:
            first = min(unmatched, key=lambda p: p.t)
            return Verdict.violated(f"{what} at t={first.t:g} is not matched", witness=first)
        if self.open:
            first = min(self.open, key=lambda p: p.t)
            return Verdict.inconclusive(f"{what} at t={first.t:g} is unmatched before the end of the trace", first)
        if not self.pairs:
            return Verdict.holds(Pairs(()), reason=f"no {what} occurrences")
        return Verdict.holds(Pairs(tuple(self.pairs)))


def _check_grid(trace: Trace, *projections: BooleanProjection) -> None:
    for proj in projections:
        if proj.bits.size != len(trace) or not np.array_equal(proj.times, trace.times):
            raise GridMismatch(f"projection {proj.source or '?'} is not on the trace grid")


def window_cut(t: float, bound: Bound | None, t_last: float, tol: float) -> bool:
    """True when part of the admissible window after t lies beyond the trace."""
    limit = bound.upper_limit() if bound is not None else None
    return limit is None or t + limit > t_last + tol


def _point(times: np.ndarray, i: int) -> TimePoint:
    return TimePoint(int(i), float(times[i]))


def match_response(
    causes: np.ndarray,
    effects: np.ndarray,
    times: np.ndarray,
    bound: Bound | None,
    tol: float,
    *,
    inclusive: bool = False,
) -> Matching:
    """Pair each cause with the first later effect whose distance satisfies ``bound``.

    With ``inclusive`` an effect at the cause instant also counts.
    """
    result = Matching()
    t_last = float(times[-1])
    effect_times = times[effects]
    for i in causes:
        first = int(np.searchsorted(effects, i, side="left" if inclusive else "right"))
        dist = effect_times[first:] - times[i]
        ok = np.ones(dist.size, dtype=bool) if bound is None else bound_mask(dist, bound, tol)
        if ok.any():
            j = int(effects[first + int(np.argmax(ok))])
            result.pairs.append(Pair(_point(times, i), _point(times, j)))
        elif window_cut(float(times[i]), bound, t_last, tol):
            result.open.append(_point(times, i))
        else:
            result.violated.append(_point(times, i))
    return result


def match_precedence(
    causes: np.ndarray, effects: np.ndarray, times: np.ndarray, bound: Bound | None, tol: float
) -> Matching:
    """Pair each effect with the latest earlier cause whose distance satisfies ``bound``."""
    result = Matching()
    cause_times = times[causes]
    for j in effects:
        last = int(np.searchsorted(causes, j, side="left"))
        dist = times[j] - cause_times[:last]
        ok = np.ones(dist.size, dtype=bool) if bound is None else bound_mask(dist, bound, tol)
        if ok.any():
            k = int(causes[int(np.flatnonzero(ok)[-1])])
            result.pairs.append(Pair(_point(times, k), _point(times, j)))
        else:
            result.violated.append(_point(times, j))
    return result


def bound_mask(distances: np.ndarray, bound: Bound, tol: float) -> np.ndarray:
    return np.asarray(compare(np.abs(distances), bound.op, bound.threshold, tol), dtype=bool)


def check_response(
    cause: BooleanProjection,
    effect: BooleanProjection,
    bound: Bound | None,
    trace: Trace,
    config: EvalConfig | None = None,
) -> Verdict:
    cfg = config or EvalConfig()
    _check_grid(trace, cause, effect)
    matching = match_response(occurrences(cause), occurrences(effect), trace.times, bound, cfg.eq_tol)
    return matching.verdict("cause", cfg.strict)


def check_precedence(
    cause: BooleanProjection,
    effect: BooleanProjection,
    bound: Bound | None,
    trace: Trace,
    config: EvalConfig | None = None,
) -> Verdict:
    cfg = config or EvalConfig()
    _check_grid(trace, cause, effect)
    matching = match_precedence(occurrences(cause), occurrences(effect), trace.times, bound, cfg.eq_tol)
    return matching.verdict("effect", cfg.strict)


def order_matching(body: Order, trace: Trace, config: EvalConfig | None = None) -> Matching:
    cfg = config or EvalConfig()
    cause = project(body.cause, trace, body.cause_kind, cfg)
    effect = project(body.effect, trace, body.effect_kind, cfg)
    if body.pattern is Pattern.RESPONSE:
        return match_response(occurrences(cause), occurrences(effect), trace.times, body.bound, cfg.eq_tol)
    return match_precedence(occurrences(cause), occurrences(effect), trace.times, body.bound, cfg.eq_tol)


def check_order(body: Order, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    cfg = config or EvalConfig()
    what = "cause" if body.pattern is Pattern.RESPONSE else "effect"
    return order_matching(body, trace, cfg).verdict(what, cfg.strict)
