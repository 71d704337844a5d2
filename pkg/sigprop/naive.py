"""Brute-force reference evaluator.

Every property is decided by nested loops over grid points that follow the
quantified definitions directly. Meant for cross-checking the engine on small traces.
"""

from __future__ import annotations

import math

import numpy as np

from sigprop.compare import Bound, Op, compare
from sigprop.config import EvalConfig
from sigprop.errors import (
    DivisionByZero,
    InvalidTransform,
    MissingDerivativeColumn,
    OutOfDomain,
    TraceTooLarge,
    UnknownSignal,
)
from sigprop.extrema import ExtremaMethod, Extremum, ExtremumKind, MethodKind
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
    Negate,
    Negation,
    OscillationBody,
    Order,
    OverUnderShoot,
    Pattern,
    Pred,
    ProjectionKind,
    Property,
    RiseFall,
    SignalRef,
    SpikeBody,
    SpikeTwoParam,
)
from sigprop.oscillation import AmplitudeMode, Damping, OscillationSpec, PeriodMode
from sigprop.spike import Anchor, Polarity, Psi, SpikeSpec
from sigprop.trace import Signal, Trace
from sigprop.transient import Direction, ShootKind, target_value
from sigprop.typecheck import CheckedProperty
from sigprop.verdict import Verdict


# --- expressions and predicates, one sample at a time ---


def expr_at(expr: Expr, trace: Trace, i: int, tol: float) -> float | None:
    """Value of ``expr`` at sample i, or None past the end of its domain."""
    n = len(trace)
    match expr:
        case SignalRef(name=name):
            return float(trace.signal(name).values[i]) if i < n else None
        case Const(value=v):
            return float(v) if i < n else None
        case Negate(arg=arg):
            v = expr_at(arg, trace, i, tol)
            return None if v is None else -v
        case Abs(arg=arg):
            v = expr_at(arg, trace, i, tol)
            return None if v is None else abs(v)
        case Derivative(arg=arg, order=order):
            if order == 1:
                return _difference(arg, trace, i, tol)
            return _second_difference(arg, trace, i, tol)
        case BinOp(op=op, left=left, right=right):
            lv = expr_at(left, trace, i, tol)
            rv = expr_at(right, trace, i, tol)
            if lv is None or rv is None:
                return None
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if abs(rv) <= tol:
                raise DivisionByZero(float(trace.times[i]))
            return lv / rv
    raise TypeError(f"not an expression: {expr!r}")


def _difference(arg: Expr, trace: Trace, i: int, tol: float) -> float | None:
    if not _signal_valued(arg):
        raise InvalidTransform("der() applied to a constant expression")
    if i + 1 >= len(trace):
        return None
    a = expr_at(arg, trace, i, tol)
    b = expr_at(arg, trace, i + 1, tol)
    if a is None or b is None:
        return None
    return (b - a) / (trace.times[i + 1] - trace.times[i])


def _second_difference(arg: Expr, trace: Trace, i: int, tol: float) -> float | None:
    a = _difference(arg, trace, i, tol)
    b = _difference(arg, trace, i + 1, tol) if i + 1 < len(trace) else None
    if a is None or b is None:
        return None
    return (b - a) / (trace.times[i + 1] - trace.times[i])


def _signal_valued(expr: Expr) -> bool:
    match expr:
        case SignalRef():
            return True
        case BinOp(left=left, right=right):
            return _signal_valued(left) or _signal_valued(right)
        case Abs(arg=arg) | Negate(arg=arg) | Derivative(arg=arg):
            return _signal_valued(arg)
    return False


def pred_at(pred: Pred, trace: Trace, i: int, tol: float) -> bool | None:
    match pred:
        case Comparison(lhs=lhs, op=op, rhs=rhs):
            lv = expr_at(lhs, trace, i, tol)
            rv = expr_at(rhs, trace, i, tol)
            if lv is None or rv is None:
                return None
            return bool(compare(lv, op, rv, tol))
        case Negation(arg=arg):
            v = pred_at(arg, trace, i, tol)
            return None if v is None else not v
        case Conj(args=args) | Disj(args=args):
            values = [pred_at(a, trace, i, tol) for a in args]
            if any(v is None for v in values):
                return None
            return all(values) if isinstance(pred, Conj) else any(values)
    raise TypeError(f"not a predicate: {pred!r}")


def _pred_interpolated(pred: Pred, trace: Trace, t: float, tol: float) -> bool | None:
    match pred:
        case Comparison(lhs=lhs, op=op, rhs=rhs):
            sides = []
            for side in (lhs, rhs):
                values = [expr_at(side, trace, i, tol) for i in range(len(trace))]
                defined = [i for i, v in enumerate(values) if v is not None]
                times = trace.times[: len(defined)]
                if t < times[0] - tol or t > times[-1] + tol:
                    return None
                sides.append(float(np.interp(t, times, [values[i] for i in defined])))
            return bool(compare(sides[0], op, sides[1], tol))
        case Negation(arg=arg):
            v = _pred_interpolated(arg, trace, t, tol)
            return None if v is None else not v
        case Conj(args=args) | Disj(args=args):
            values = [_pred_interpolated(a, trace, t, tol) for a in args]
            if any(v is None for v in values):
                return None
            return all(values) if isinstance(pred, Conj) else any(values)
    raise TypeError(f"not a predicate: {pred!r}")


def _in_window(times: np.ndarray, i: int, lo: float, hi: float, tol: float) -> bool:
    if lo == hi:
        nearest = min(range(times.size), key=lambda j: (abs(times[j] - lo), j))
        return i == nearest and times[0] - tol <= lo <= times[-1] + tol
    return lo - tol <= times[i] <= hi + tol


def _assertion_truth(da: DataAssertion, trace: Trace, tol: float) -> list[bool]:
    """Per-sample truth of ``da``, false where undefined or outside its intervals."""
    times = trace.times
    truth = []
    for i in range(len(trace)):
        value = pred_at(da.predicate, trace, i, tol)
        inside = not da.intervals or any(_in_window(times, i, iv.lo, iv.hi, tol) for iv in da.intervals)
        truth.append(bool(value) and inside)
    return truth


def _check_assertion(da: DataAssertion, trace: Trace, cfg: EvalConfig) -> Verdict:
    tol = cfg.eq_tol
    times = trace.times
    values = [pred_at(da.predicate, trace, i, tol) for i in range(len(trace))]
    for i, value in enumerate(values):
        if value is None:
            continue
        inside = not da.intervals or any(_in_window(times, i, iv.lo, iv.hi, tol) for iv in da.intervals)
        if inside and not value:
            return Verdict.violated(f"predicate fails at t={times[i]:g}")
    if cfg.interp == "linear":
        for iv in da.intervals:
            for t in (iv.lo, iv.hi):
                if any(abs(t - x) <= tol for x in times):
                    continue
                if _pred_interpolated(da.predicate, trace, t, tol) is False:
                    return Verdict.violated(f"predicate fails at t={t:g}")
    return Verdict.holds()


# --- extrema ---


def _window_indices(sig: Signal, lo: float, hi: float, tol: float) -> list[int]:
    return [i for i in range(len(sig)) if _in_window(sig.times, i, lo, hi, tol)]


def _run_extremum(values: np.ndarray, i: int, kind: ExtremumKind, tol: float) -> bool:
    """The flat run through sample i lies strictly below (above) the samples on both sides."""
    left = i - 1
    while left >= 0 and abs(values[left] - values[i]) <= tol:
        left -= 1
    right = i + 1
    while right < values.size and abs(values[right] - values[i]) <= tol:
        right += 1
    if left < 0 or right >= values.size:
        return False
    if kind is ExtremumKind.MIN:
        return values[left] > values[i] and values[right] > values[i]
    return values[left] < values[i] and values[right] < values[i]


def _slopes(sig: Signal, method: ExtremaMethod, trace: Trace) -> tuple[list[float | None], list[float | None]]:
    """First and second derivative at every sample, None where undefined."""
    n = len(sig)
    if method.kind is MethodKind.PRECOMPUTED:
        try:
            d1 = trace.signal(method.first).values  # type: ignore[arg-type]
            d2 = trace.signal(method.second).values  # type: ignore[arg-type]
        except UnknownSignal as e:
            raise MissingDerivativeColumn(f"derivative column missing: {e}") from None
        return [float(d1[i]) for i in range(n)], [float(d2[i]) for i in range(n)]
    times, values = sig.times, sig.values
    first: list[float | None] = [None] * n
    second: list[float | None] = [None] * n
    for i in range(n - 1):
        first[i] = (values[i + 1] - values[i]) / (times[i + 1] - times[i])
    for i in range(n - 2):
        second[i] = (first[i + 1] - first[i]) / (times[i + 1] - times[i])  # type: ignore[operator]
    return first, second


def _zero_slope_extremum(d1: float | None, d2: float | None, kind: ExtremumKind, deriv_tol: float) -> bool:
    if d1 is None or d2 is None or math.isnan(d1) or math.isnan(d2) or abs(d1) > deriv_tol:
        return False
    return d2 > deriv_tol if kind is ExtremumKind.MIN else d2 < -deriv_tol


def naive_extrema(
    sig: Signal,
    lo: float,
    hi: float,
    method: ExtremaMethod,
    prominence: float,
    trace: Trace,
    cfg: EvalConfig,
) -> list[Extremum]:
    """Local extrema in [lo, hi], thinned to an alternating sequence."""
    tol = cfg.eq_tol
    values = sig.values
    indices = _window_indices(sig, lo, hi, tol)
    candidates = []
    if method.kind is MethodKind.ANALYTICAL:
        for i in indices:
            # a run entering the window is reported at its first sample inside it
            if i != indices[0] and abs(values[i - 1] - values[i]) <= tol:
                continue
            for kind in ExtremumKind:
                if _run_extremum(values, i, kind, tol):
                    candidates.append(Extremum(kind, float(sig.times[i]), float(values[i]), i))
    else:
        d1, d2 = _slopes(sig, method, trace)
        for i in indices:
            for kind in ExtremumKind:
                if _zero_slope_extremum(d1[i], d2[i], kind, cfg.deriv_tol):
                    candidates.append(Extremum(kind, float(sig.times[i]), float(values[i]), i))

    kept: list[Extremum] = []
    for c in candidates:
        if kept and c.kind is kept[-1].kind:
            deeper = c.v < kept[-1].v if c.kind is ExtremumKind.MIN else c.v > kept[-1].v
            if deeper:
                kept[-1] = c
        elif not kept or abs(c.v - kept[-1].v) > prominence:
            kept.append(c)
    return kept


def _consecutive(extrema: list[Extremum], i: int, j: int) -> bool:
    """No extremum lies strictly between the i-th and j-th one."""
    return not any(extrema[i].t < e.t < extrema[j].t for e in extrema)


# --- spikes ---


def _spike_features(triple: tuple[Extremum, Extremum, Extremum], psi: Psi) -> dict[str, float]:
    vp1, pp, vp2 = triple
    a1 = abs(pp.v - vp1.v)
    a2 = abs(pp.v - vp2.v)
    return {
        "a": psi(a1, a2),
        "sp1": a1 / (pp.t - vp1.t),
        "sp2": a2 / (vp2.t - pp.t),
        "w": vp2.t - vp1.t,
    }


def _spikes(sig: Signal, spec: SpikeSpec, trace: Trace, cfg: EvalConfig) -> list[tuple[Extremum, Extremum, Extremum]]:
    """Valley-peak-valley shapes in the window that meet every constraint."""
    f, g = spec.window
    tol = cfg.eq_tol
    if f > sig.length + tol or g < sig.times[0] - tol:
        raise OutOfDomain(f"window [{f:g}, {g:g}] lies outside {sig.name}")
    method = spec.method or ExtremaMethod.named(cfg.extrema_method)
    extrema = naive_extrema(sig, f, g, method, cfg.prominence, trace, cfg)
    psi = spec.psi or Psi(cfg.psi)
    outer = ExtremumKind.MAX if spec.polarity is Polarity.DOWNWARD else ExtremumKind.MIN
    found = []
    for i in range(len(extrema)):
        for j in range(i + 1, len(extrema)):
            for k in range(j + 1, len(extrema)):
                e0, e1, e2 = extrema[i], extrema[j], extrema[k]
                if not (e0.kind is outer and e1.kind is outer.opposite() and e2.kind is outer):
                    continue
                if not (_consecutive(extrema, i, j) and _consecutive(extrema, j, k)):
                    continue
                features = _spike_features((e0, e1, e2), psi)
                if all(bound.holds(features[name], tol) for name, bound in spec.constraints):
                    found.append((e0, e1, e2))
    return found


def _check_spike(body: SpikeBody, trace: Trace, cfg: EvalConfig) -> Verdict:
    found = _spikes(trace.signal(body.signal), body.spec, trace, cfg)
    if found:
        return Verdict.holds()
    return Verdict.violated(f"no matching spike on {body.signal}")


def _check_spike_two_param(body: SpikeTwoParam, trace: Trace, cfg: EvalConfig) -> Verdict:
    tol = cfg.eq_tol
    times = trace.times
    if body.derivative is None:
        sig = trace.signal(body.signal)
        d = [(sig.values[i + 1] - sig.values[i]) / (times[i + 1] - times[i]) for i in range(len(sig) - 1)]
    else:
        try:
            d = list(trace.signal(body.derivative).values)
        except UnknownSignal:
            raise MissingDerivativeColumn(f"derivative column {body.derivative!r} not in trace") from None
    for i in range(len(d)):
        if not compare(d[i], Op.GT, body.m, tol):
            continue
        for k in range(len(d)):
            if times[i] - tol <= times[k] <= times[i] + body.w + tol and compare(d[k], Op.LT, -body.m, tol):
                return Verdict.holds()
    return Verdict.violated(f"no up/down slope pair on {body.signal}")


# --- oscillations ---


def _oscillation(sig: Signal, spec: OscillationSpec, trace: Trace, cfg: EvalConfig) -> tuple[bool, list[Extremum]]:
    tol = cfg.eq_tol
    a, b = spec.window
    if a > sig.length + tol or b < sig.times[0] - tol:
        raise OutOfDomain(f"window [{a:g}, {b:g}] lies outside {sig.name}")
    method = spec.method or ExtremaMethod.named(cfg.extrema_method)
    prominence = cfg.prominence if spec.prominence is None else spec.prominence
    ex = naive_extrema(sig, a, b, method, prominence, trace, cfg)
    m = len(ex)
    if m < 3:
        return False, ex
    v = [float(sig.values[e.index]) for e in ex]
    for i in range(m - 2):
        if spec.period is not None and spec.period_mode is PeriodMode.PER_CYCLE:
            if not spec.period.holds(ex[i + 2].t - ex[i].t, tol):
                return False, ex
        if spec.amplitude is not None:
            if spec.amplitude_mode is AmplitudeMode.REFERENCE:
                amp = max(abs(v[i + d] - spec.ref) for d in range(3))  # type: ignore[operator]
            elif spec.amplitude_mode is AmplitudeMode.PEAK_TO_PEAK:
                amp = max(abs(v[i] - v[i + 1]), abs(v[i + 1] - v[i + 2]))
            else:
                continue
            if not spec.amplitude.holds(amp, tol):
                return False, ex
    osc_n = (m - 1) // 2
    if spec.period is not None and spec.period_mode is PeriodMode.AVERAGE:
        avg_period = sum(abs(ex[2 * i].t - ex[2 * i + 2].t) for i in range(osc_n)) / osc_n
        if not spec.period.holds(avg_period, tol):
            return False, ex
    if spec.amplitude is not None and spec.amplitude_mode is AmplitudeMode.AVG_PEAK_TO_PEAK:
        avg_pp = sum(abs(v[i + 1] - v[i]) for i in range(m - 1)) / (m - 1)
        if not spec.amplitude.holds(avg_pp, tol):
            return False, ex
    if spec.damping is not None:
        diffs = [abs(v[i + 1] - v[i]) for i in range(m - 1)]
        if spec.trend:
            slope = float(np.polyfit(np.arange(len(diffs)), diffs, 1)[0])
            damped, driven = slope <= tol, slope >= -tol
        else:
            damped = all(diffs[i] >= diffs[i + 1] - tol for i in range(len(diffs) - 1))
            driven = all(diffs[i] <= diffs[i + 1] + tol for i in range(len(diffs) - 1))
        wanted = damped if spec.damping is Damping.DAMPED else driven
        if not wanted:
            return False, ex
    return True, ex


# --- boolean projections and relationships ---


def _functional_trace(body: Functional, trace: Trace, tol: float) -> Trace:
    values = [expr_at(body.expr, trace, i, tol) for i in range(len(trace))]
    defined = [v for v in values if v is not None]
    base = trace if len(defined) == len(trace) else trace.truncated(len(defined))
    return base.with_signal(Signal(body.target, base.times, defined))


def _project(body: Body, trace: Trace, kind: ProjectionKind, cfg: EvalConfig) -> list[bool]:
    n = len(trace)
    bits = [False] * n
    match body:
        case DataAssertion():
            truth = _assertion_truth(body, trace, cfg.eq_tol)
            if kind is ProjectionKind.STATE:
                return truth
            return [i > 0 and truth[i] and not truth[i - 1] for i in range(n)]
        case SpikeBody():
            anchor = body.anchor or Anchor(cfg.spike_anchor)
            found = _spikes(trace.signal(body.signal), body.spec, trace, cfg)
            for triple in found:
                if kind is ProjectionKind.EVENT:
                    bits[triple[list(Anchor).index(anchor)].index] = True
                else:
                    for i in range(triple[0].index, triple[2].index + 1):
                        bits[i] = True
        case OscillationBody():
            ok, ex = _oscillation(trace.signal(body.signal), body.spec, trace, cfg)
            if ok:
                if kind is ProjectionKind.EVENT:
                    for e in ex:
                        if body.at in (None, "any") or e.kind.value == body.at:
                            bits[e.index] = True
                else:
                    for i in range(ex[0].index, ex[-1].index + 1):
                        bits[i] = True
        case Functional():
            inner = _project(body.body, _functional_trace(body, trace, cfg.eq_tol), kind, cfg)
            bits[: len(inner)] = inner
        case Order() | RiseFall() | OverUnderShoot():
            for _, effect in _matching(body, trace, cfg)[0]:
                bits[effect] = True
    return bits


def _occurrences(bits: list[bool], kind: ProjectionKind) -> list[int]:
    if kind is ProjectionKind.EVENT:
        return [i for i in range(1, len(bits)) if bits[i] and not bits[i - 1]]
    return [i for i, b in enumerate(bits) if b]


_Matching = tuple[list[tuple[int, int]], list[int], list[int]]


def _response(causes: list[int], effects: list[int], trace: Trace, bound: Bound | None, cfg: EvalConfig) -> _Matching:
    tol = cfg.eq_tol
    times = trace.times
    t_last = float(times[-1])
    pairs, violated, open_ = [], [], []
    for i in causes:
        match = next(
            (j for j in effects if j > i and (bound is None or bound.holds(times[j] - times[i], tol))), None
        )
        if match is not None:
            pairs.append((i, match))
            continue
        limit = None if bound is None else bound.upper_limit()
        if limit is None or times[i] + limit > t_last + tol:
            open_.append(i)
        else:
            violated.append(i)
    return pairs, violated, open_


def _precedence(causes: list[int], effects: list[int], trace: Trace, bound: Bound | None, cfg: EvalConfig) -> _Matching:
    times = trace.times
    pairs, violated = [], []
    for j in effects:
        earlier = [i for i in causes if i < j and (bound is None or bound.holds(times[j] - times[i], cfg.eq_tol))]
        if earlier:
            pairs.append((earlier[-1], j))
        else:
            violated.append(j)
    return pairs, violated, []


def _edges(body: Body, trace: Trace, cfg: EvalConfig) -> list[int]:
    return _occurrences(_project(body, trace, ProjectionKind.EVENT, cfg), ProjectionKind.EVENT)


def _monotone(values: np.ndarray, start: int, stop: int, direction: Direction, tol: float) -> bool:
    op = Op.LT if direction is Direction.RISE else Op.GT
    return all(compare(values[i], op, values[i + 1], tol) for i in range(start, stop))


def _rise(body: RiseFall, trace: Trace, cfg: EvalConfig) -> _Matching:
    tol = cfg.eq_tol
    spec = body.spec
    sig = trace.signal(body.signal)
    times = trace.times
    t_last = float(times[-1])
    triggers = _edges(spec.trigger, trace, cfg)
    targets = _edges(spec.target, trace, cfg)
    pairs, violated, open_ = [], [], []
    for st in triggers:
        reached = next(
            (
                k
                for k in targets
                if k >= st
                and times[k] <= times[st] + spec.rt + tol
                and (not spec.monotonic or _monotone(sig.values, st, k, spec.direction, tol))
            ),
            None,
        )
        if reached is not None:
            pairs.append((st, reached))
        elif times[st] + spec.rt > t_last + tol:
            open_.append(st)
        else:
            violated.append(st)
    return pairs, violated, open_


def _shoot(body: OverUnderShoot, trace: Trace, cfg: EvalConfig) -> _Matching:
    tol = cfg.eq_tol
    spec = body.spec
    sig = trace.signal(body.signal)
    times = trace.times
    t_last = float(times[-1])
    limit = spec.limit.resolve(target_value(spec.target))
    op = Op.LE if spec.kind is ShootKind.OVERSHOOT else Op.GE
    triggers = _edges(spec.trigger, trace, cfg)
    targets = _edges(spec.target, trace, cfg)
    pairs, violated, open_ = [], [], []
    for st in triggers:
        candidates = [k for k in targets if k >= st]
        undetermined = not candidates
        matched = None
        for k in candidates:
            if spec.monotonic and not _monotone(sig.values, st, k, spec.direction, tol):
                continue
            end = times[k] + spec.oi
            inside = [i for i in range(k, len(sig)) if times[i] <= end + tol]
            if not all(compare(sig.values[i], op, limit, tol) for i in inside):
                continue
            if end > t_last + tol and math.isfinite(limit):
                undetermined = True
                continue
            matched = k
            break
        if matched is not None:
            pairs.append((st, matched))
        elif undetermined:
            open_.append(st)
        else:
            violated.append(st)
    return pairs, violated, open_


def _matching(body: Order | RiseFall | OverUnderShoot, trace: Trace, cfg: EvalConfig) -> _Matching:
    match body:
        case Order(pattern=pattern, bound=bound):
            causes = _occurrences(_project(body.cause, trace, body.cause_kind, cfg), body.cause_kind)
            effects = _occurrences(_project(body.effect, trace, body.effect_kind, cfg), body.effect_kind)
            if pattern is Pattern.RESPONSE:
                return _response(causes, effects, trace, bound, cfg)
            return _precedence(causes, effects, trace, bound, cfg)
        case RiseFall():
            return _rise(body, trace, cfg)
    return _shoot(body, trace, cfg)


def _matching_verdict(matching: _Matching, trace: Trace, strict: bool) -> Verdict:
    _, violated, open_ = matching
    times = trace.times
    if violated or (strict and open_):
        first = min(violated + (open_ if strict else []))
        return Verdict.violated(f"obligation at t={times[first]:g} is not met")
    if open_:
        return Verdict.inconclusive(f"obligation at t={times[min(open_)]:g} is cut off by the end of the trace")
    return Verdict.holds()


# --- entry point ---


def naive_body(body: Body, trace: Trace, cfg: EvalConfig) -> Verdict:
    match body:
        case DataAssertion():
            return _check_assertion(body, trace, cfg)
        case SpikeBody():
            return _check_spike(body, trace, cfg)
        case SpikeTwoParam():
            return _check_spike_two_param(body, trace, cfg)
        case OscillationBody():
            ok, _ = _oscillation(trace.signal(body.signal), body.spec, trace, cfg)
            return Verdict.holds() if ok else Verdict.violated(f"oscillation on {body.signal} fails")
        case Functional(body=inner):
            return naive_body(inner, _functional_trace(body, trace, cfg.eq_tol), cfg)
        case Order() | RiseFall() | OverUnderShoot():
            return _matching_verdict(_matching(body, trace, cfg), trace, cfg.strict)
    raise TypeError(f"not a property body: {body!r}")


def evaluate_naive(prop: CheckedProperty | Property, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    """Verdict of ``prop`` by exhaustive search; same status as the engine."""
    cfg = config or EvalConfig()
    if len(trace) > cfg.naive_limit:
        raise TraceTooLarge(f"trace has {len(trace)} samples, naive evaluation is limited to {cfg.naive_limit}")
    p = prop.prop if isinstance(prop, CheckedProperty) else prop
    return naive_body(p.body, trace, cfg).named(p.name)

