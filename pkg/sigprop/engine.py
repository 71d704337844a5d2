"""Evaluates checked properties against a trace and assembles the report."""

from __future__ import annotations

import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

from sigprop.assertion import check_assertion
from sigprop.config import EvalConfig
from sigprop.errors import EvaluationError, SigpropError
from sigprop.nodes import (
    Body,
    DataAssertion,
    Functional,
    OscillationBody,
    Order,
    OverUnderShoot,
    Property,
    RiseFall,
    SpikeBody,
    SpikeTwoParam,
)
from sigprop.oscillation import check_oscillation
from sigprop.relationship import check_order, functional_trace
from sigprop.spike import check_spike_two_param, detect_spike
from sigprop.trace import Trace
from sigprop.transient import check_overshoot, check_rise_time
from sigprop.typecheck import CheckedProperty
from sigprop.verdict import Status, Verdict


@dataclass(frozen=True)
class TraceInfo:
    path: str | None
    samples: int
    length: float
    signals: tuple[str, ...]

    @classmethod
    def of(cls, trace: Trace) -> TraceInfo:
        return cls(
            path=None if trace.path is None else str(trace.path),
            samples=len(trace),
            length=trace.length,
            signals=trace.names,
        )


@dataclass(frozen=True)
class Report:
    trace: TraceInfo
    verdicts: tuple[Verdict, ...] = ()
    config: dict[str, Any] = field(default_factory=dict)

    def count(self, status: Status) -> int:
        return sum(v.status is status for v in self.verdicts)

    @property
    def status(self) -> Status:
        """Worst status over all verdicts; an empty report holds."""
        if self.count(Status.VIOLATED):
            return Status.VIOLATED
        if self.count(Status.INCONCLUSIVE):
            return Status.INCONCLUSIVE
        return Status.HOLDS

    @property
    def exit_code(self) -> int:
        return {Status.HOLDS: 0, Status.VIOLATED: 1, Status.INCONCLUSIVE: 2}[self.status]


def evaluate_body(body: Body, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    cfg = config or EvalConfig()
    match body:
        case DataAssertion():
            return check_assertion(body, trace, cfg)
        case SpikeBody(signal=name, spec=spec):
            return detect_spike(trace.signal(name), spec, trace, cfg)
        case SpikeTwoParam(signal=name, m=m, w=w, derivative=derivative):
            return check_spike_two_param(trace.signal(name), m, w, derivative, trace, cfg)
        case OscillationBody(signal=name, spec=spec):
            return check_oscillation(trace.signal(name), spec, trace, cfg)
        case Functional(body=inner):
            return evaluate_body(inner, functional_trace(body, trace, cfg), cfg)
        case Order():
            return check_order(body, trace, cfg)
        case RiseFall(signal=name, spec=spec):
            return check_rise_time(trace.signal(name), spec, trace, cfg)
        case OverUnderShoot(signal=name, spec=spec):
            return check_overshoot(trace.signal(name), spec, trace, cfg)
    raise TypeError(f"not a property body: {body!r}")


def _unwrap(prop: CheckedProperty | Property) -> Property:
    return prop.prop if isinstance(prop, CheckedProperty) else prop


def evaluate_property(prop: CheckedProperty | Property, trace: Trace, config: EvalConfig | None = None) -> Verdict:
    cfg = config or EvalConfig()
    p = _unwrap(prop)
    try:
        verdict = evaluate_body(p.body, trace, cfg)
    except SigpropError as e:
        raise EvaluationError(p.name, e, getattr(e, "span", None) or p.span) from e
    return verdict.named(p.name, asdict(cfg))


def _workers(threads: int | None, jobs: int) -> int:
    if threads is None or threads <= 0:
        threads = os.cpu_count() or 1
    return max(1, min(threads, jobs))


def evaluate(
    props: Sequence[CheckedProperty | Property],
    trace: Trace,
    config: EvalConfig | None = None,
    threads: int | None = 1,
) -> Report:
    """One verdict per property, in declaration order.

    ``threads`` <= 0 or None uses one worker per CPU.
    """
    cfg = config or EvalConfig()
    workers = _workers(threads, len(props))
    if workers == 1:
        verdicts = [evaluate_property(p, trace, cfg) for p in props]
    else:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="sigprop") as pool:
            verdicts = list(pool.map(lambda p: evaluate_property(p, trace, cfg), props))
    return Report(TraceInfo.of(trace), tuple(verdicts), asdict(cfg))
