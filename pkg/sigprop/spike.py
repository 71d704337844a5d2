"""Spike detection from valley-peak-valley extrema, and the slope-based alternative."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from sigprop.compare import Bound, Op, compare
from sigprop.config import EvalConfig
from sigprop.errors import InvalidThreshold, MissingDerivativeColumn, OutOfDomain, UnknownSignal
from sigprop.extrema import ExtremaMethod, Extremum, ExtremumKind, find_alternating_extrema
from sigprop.trace import Signal, Trace, finite_difference
from sigprop.verdict import Pair, TimePoint, Verdict

FEATURES = ("a", "sp1", "sp2", "w")


class Psi(str, Enum):
    """Combines the rising and falling amplitudes into a."""

    MIN = "min"
    MAX = "max"
    MEAN = "mean"

    def __call__(self, a1: float, a2: float) -> float:
        match self:
            case Psi.MIN:
                return min(a1, a2)
            case Psi.MAX:
                return max(a1, a2)
        return (a1 + a2) / 2


class Polarity(str, Enum):
    UPWARD = "upward"
    DOWNWARD = "downward"


class Anchor(str, Enum):
    VP1 = "vp1"
    PEAK = "peak"
    VP2 = "vp2"


@dataclass(frozen=True)
class SpikeSpec:
    window: tuple[float, float]
    constraints: tuple[tuple[str, Bound], ...]
    psi: Psi | None = None
    method: ExtremaMethod | None = None
    polarity: Polarity | None = None

    def __post_init__(self) -> None:
        if not self.constraints:
            raise InvalidThreshold("a spike needs at least one feature constraint")
        for feature, _ in self.constraints:
            if feature not in FEATURES:
                raise InvalidThreshold(f"unknown spike feature {feature!r}")


@dataclass(frozen=True)
class SpikeFeatures:
    vp1: float
    pp: float
    vp2: float
    a1: float
    a2: float
    a: float
    sp1: float
    sp2: float
    w: float
    w1: float
    w2: float
    indices: tuple[int, int, int]

    def feature(self, name: str) -> float:
        return getattr(self, name)

    def anchor_index(self, anchor: Anchor) -> int:
        return self.indices[list(Anchor).index(anchor)]


def spike_features(triple: tuple[Extremum, Extremum, Extremum], psi: Psi) -> SpikeFeatures:
    vp1, pp, vp2 = triple
    a1 = abs(pp.v - vp1.v)
    a2 = abs(pp.v - vp2.v)
    w1 = pp.t - vp1.t
    w2 = vp2.t - pp.t
    return SpikeFeatures(
        vp1=vp1.t,
        pp=pp.t,
        vp2=vp2.t,
        a1=a1,
        a2=a2,
        a=psi(a1, a2),
        sp1=a1 / w1,
        sp2=a2 / w2,
        w=vp2.t - vp1.t,
        w1=w1,
        w2=w2,
        indices=(vp1.index, pp.index, vp2.index),
    )


def _check_window(sig: Signal, window: tuple[float, float], tol: float) -> None:
    f, g = window
    if f > sig.length + tol or g < sig.times[0] - tol:
        raise OutOfDomain(f"window [{f:g}, {g:g}] lies outside {sig.name} ([{sig.times[0]:g}, {sig.length:g}])")


def spike_triples(
    sig: Signal, spec: SpikeSpec, trace: Trace | None = None, config: EvalConfig | None = None
) -> list[tuple[Extremum, Extremum, Extremum]]:
    """Consecutive valley-peak-valley triples (peak-valley-peak for downward spikes)."""
    cfg = config or EvalConfig()
    _check_window(sig, spec.window, cfg.eq_tol)
    method = spec.method or ExtremaMethod.named(cfg.extrema_method)
    extrema = find_alternating_extrema(
        sig, *spec.window, method, cfg.prominence, trace, eq_tol=cfg.eq_tol, deriv_tol=cfg.deriv_tol
    )
    outer = ExtremumKind.MAX if spec.polarity is Polarity.DOWNWARD else ExtremumKind.MIN
    return [
        (e0, e1, e2)
        for e0, e1, e2 in zip(extrema, extrema[1:], extrema[2:])
        if e0.kind is outer
    ]


def _satisfies(features: SpikeFeatures, spec: SpikeSpec, tol: float) -> bool:
    return all(bound.holds(features.feature(name), tol) for name, bound in spec.constraints)


def _describe(spec: SpikeSpec) -> str:
    return ", ".join(f"{name} {bound}" for name, bound in spec.constraints)


def find_spikes(
    sig: Signal, spec: SpikeSpec, trace: Trace | None = None, config: EvalConfig | None = None
) -> list[SpikeFeatures]:
    """Every spike in the window that meets all feature constraints, in time order."""
    cfg = config or EvalConfig()
    psi = spec.psi or Psi(cfg.psi)
    found = (spike_features(triple, psi) for triple in spike_triples(sig, spec, trace, cfg))
    return [f for f in found if _satisfies(f, spec, cfg.eq_tol)]


def detect_spike(
    sig: Signal, spec: SpikeSpec, trace: Trace | None = None, config: EvalConfig | None = None
) -> Verdict:
    cfg = config or EvalConfig()
    psi = spec.psi or Psi(cfg.psi)
    triples = spike_triples(sig, spec, trace, cfg)
    f, g = spec.window
    if not triples:
        return Verdict.violated(f"no spike shape in [{f:g}, {g:g}] of {sig.name}")
    features = [spike_features(triple, psi) for triple in triples]
    for feat in features:
        if _satisfies(feat, spec, cfg.eq_tol):
            return Verdict.holds(feat)
    return Verdict.violated(
        f"{len(features)} spike(s) in [{f:g}, {g:g}] of {sig.name}, none with {_describe(spec)}",
        witness=features[0],
    )


def _derivative(sig: Signal, column: str | None, trace: Trace | None) -> tuple[np.ndarray, np.ndarray]:
    if column is None:
        d = finite_difference(sig, 1)
        return d.times, d.values
    if trace is None:
        raise MissingDerivativeColumn(f"derivative column {column!r} needs the trace")
    try:
        col = trace.signal(column)
    except UnknownSignal:
        raise MissingDerivativeColumn(f"derivative column {column!r} not in trace") from None
    return col.times, col.values


def check_spike_two_param(
    sig: Signal,
    m: float,
    w: float,
    derivative: str | None = None,
    trace: Trace | None = None,
    config: EvalConfig | None = None,
) -> Verdict:
    """Holds iff some slope above m is followed within w by a slope below -m."""
    cfg = config or EvalConfig()
    if m <= 0 or w <= 0:
        raise InvalidThreshold(f"spike2 needs m > 0 and w > 0, got m={m:g}, w={w:g}")
    times, d = _derivative(sig, derivative, trace)
    tol = cfg.eq_tol
    ups = np.flatnonzero(compare(d, Op.GT, m, tol))
    downs = np.flatnonzero(compare(d, Op.LT, -m, tol))
    down_times = times[downs]
    for i in ups:
        j = int(np.searchsorted(down_times, times[i] - tol, side="left"))
        if j < downs.size and down_times[j] <= times[i] + w + tol:
            k = int(downs[j])
            return Verdict.holds(
                Pair(TimePoint(int(i), float(times[i]), float(d[i])), TimePoint(k, float(times[k]), float(d[k])))
            )
    if ups.size == 0:
        return Verdict.violated(f"{sig.name}' never exceeds {m:g}")
    return Verdict.violated(f"no slope below {-m:g} within {w:g} of a slope above {m:g} in {sig.name}'")
