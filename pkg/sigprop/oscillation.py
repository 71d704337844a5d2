"""Oscillation checks over alternating extrema, averaged features and damping."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from sigprop.compare import Bound
from sigprop.config import EvalConfig
from sigprop.errors import InvalidThreshold, OutOfDomain, TooFewExtrema
from sigprop.extrema import ExtremaMethod, Extremum, find_alternating_extrema
from sigprop.trace import Signal, Trace
from sigprop.verdict import Verdict


class AmplitudeMode(str, Enum):
    REFERENCE = "reference"
    PEAK_TO_PEAK = "peak_to_peak"
    AVG_PEAK_TO_PEAK = "avg_peak_to_peak"


class PeriodMode(str, Enum):
    PER_CYCLE = "per_cycle"
    AVERAGE = "average"


class Damping(str, Enum):
    DAMPED = "damped"
    DRIVEN = "driven"
    NEITHER = "neither"
    BOTH = "both"


@dataclass(frozen=True)
class OscillationSpec:
    window: tuple[float, float]
    period: Bound | None = None
    amplitude: Bound | None = None
    amplitude_mode: AmplitudeMode = AmplitudeMode.PEAK_TO_PEAK
    ref: float | None = None
    period_mode: PeriodMode = PeriodMode.PER_CYCLE
    method: ExtremaMethod | None = None
    prominence: float | None = None
    damping: Damping | None = None
    trend: bool = False

    def __post_init__(self) -> None:
        if self.period is None and self.amplitude is None:
            raise InvalidThreshold("an oscillation needs a period or an amplitude constraint")
        if self.amplitude_mode is AmplitudeMode.REFERENCE and self.ref is None:
            raise InvalidThreshold("reference amplitude mode needs a reference value")
        if self.damping in (Damping.NEITHER, Damping.BOTH):
            raise InvalidThreshold("damping requirement must be damped or driven")


@dataclass(frozen=True)
class OscillationStats:
    extrema: tuple[Extremum, ...]
    osc_n: int
    avg_amp_pp: float
    avg_period: float | None


@dataclass(frozen=True)
class Cycle:
    """One complete oscillation: same-kind extrema around an opposite one."""

    start: Extremum
    middle: Extremum
    end: Extremum
    period: float
    amplitude: float | None


@dataclass(frozen=True)
class OscillationWitness:
    stats: OscillationStats | None
    cycle: Cycle | None = None
    damping: Damping | None = None


def _values(extrema: Sequence[Extremum], sig: Signal) -> np.ndarray:
    return np.array([sig.values[e.index] for e in extrema], dtype=np.float64)


def oscillation_stats(extrema: Sequence[Extremum], sig: Signal) -> OscillationStats:
    m = len(extrema)
    if m < 2:
        raise TooFewExtrema(f"average amplitude needs 2 extrema, got {m}")
    values = _values(extrema, sig)
    times = np.array([e.t for e in extrema])
    osc_n = (m - 1) // 2
    avg_amp_pp = float(np.sum(np.abs(np.diff(values))) / (m - 1))
    avg_period = None
    if osc_n:
        avg_period = float(np.sum(np.abs(times[0 : 2 * osc_n : 2] - times[2 : 2 * osc_n + 1 : 2])) / osc_n)
    return OscillationStats(tuple(extrema), osc_n, avg_amp_pp, avg_period)


def cycles(extrema: Sequence[Extremum], sig: Signal, spec: OscillationSpec) -> list[Cycle]:
    out = []
    for e0, e1, e2 in zip(extrema, extrema[1:], extrema[2:]):
        v0, v1, v2 = (float(sig.values[e.index]) for e in (e0, e1, e2))
        match spec.amplitude_mode:
            case AmplitudeMode.REFERENCE:
                amplitude = max(abs(v - spec.ref) for v in (v0, v1, v2))  # type: ignore[operator]
            case AmplitudeMode.PEAK_TO_PEAK:
                amplitude = max(abs(v0 - v1), abs(v1 - v2))
            case _:
                amplitude = None
        out.append(Cycle(e0, e1, e2, e2.t - e0.t, amplitude))
    return out


def classify_damping(
    extrema: Sequence[Extremum], sig: Signal, *, trend: bool = False, tol: float = 1e-9
) -> Damping:
    """Damped when peak-to-peak amplitudes never grow, driven when they never shrink.

    With ``trend`` the least-squares slope of the amplitudes decides instead.
    """
    if len(extrema) < 3:
        raise TooFewExtrema(f"damping needs 3 extrema, got {len(extrema)}")
    diffs = np.abs(np.diff(_values(extrema, sig)))
    if trend:
        slope = float(np.polyfit(np.arange(diffs.size), diffs, 1)[0])
        damped, driven = slope <= tol, slope >= -tol
    else:
        damped = bool(np.all(diffs[:-1] >= diffs[1:] - tol))
        driven = bool(np.all(diffs[:-1] <= diffs[1:] + tol))
    if damped and driven:
        return Damping.BOTH
    if damped:
        return Damping.DAMPED
    if driven:
        return Damping.DRIVEN
    return Damping.NEITHER


def oscillation_extrema(
    sig: Signal, spec: OscillationSpec, trace: Trace | None = None, config: EvalConfig | None = None
) -> list[Extremum]:
    cfg = config or EvalConfig()
    a, b = spec.window
    if a > sig.length + cfg.eq_tol or b < sig.times[0] - cfg.eq_tol:
        raise OutOfDomain(f"window [{a:g}, {b:g}] lies outside {sig.name} ([{sig.times[0]:g}, {sig.length:g}])")
    method = spec.method or ExtremaMethod.named(cfg.extrema_method)
    prominence = cfg.prominence if spec.prominence is None else spec.prominence
    return find_alternating_extrema(sig, a, b, method, prominence, trace, eq_tol=cfg.eq_tol, deriv_tol=cfg.deriv_tol)


def check_oscillation(
    sig: Signal, spec: OscillationSpec, trace: Trace | None = None, config: EvalConfig | None = None
) -> Verdict:
    cfg = config or EvalConfig()
    tol = cfg.eq_tol
    extrema = oscillation_extrema(sig, spec, trace, cfg)
    stats = oscillation_stats(extrema, sig) if len(extrema) >= 2 else None
    if len(extrema) < 3:
        return Verdict.violated(
            f"no complete oscillation in [{spec.window[0]:g}, {spec.window[1]:g}] of {sig.name}",
            witness=OscillationWitness(stats),
        )
    assert stats is not None

    all_cycles = cycles(extrema, sig, spec)
    for cycle in all_cycles:
        if spec.period is not None and spec.period_mode is PeriodMode.PER_CYCLE:
            if not spec.period.holds(cycle.period, tol):
                return Verdict.violated(
                    f"cycle at t={cycle.start.t:g} has period {cycle.period:g}, expected {spec.period}",
                    witness=OscillationWitness(stats, cycle),
                )
        if spec.amplitude is not None and cycle.amplitude is not None:
            if not spec.amplitude.holds(cycle.amplitude, tol):
                return Verdict.violated(
                    f"cycle at t={cycle.start.t:g} has amplitude {cycle.amplitude:g}, expected {spec.amplitude}",
                    witness=OscillationWitness(stats, cycle),
                )

    if spec.period is not None and spec.period_mode is PeriodMode.AVERAGE:
        if not spec.period.holds(stats.avg_period, tol):  # type: ignore[arg-type]
            return Verdict.violated(
                f"average period {stats.avg_period:g}, expected {spec.period}", witness=OscillationWitness(stats)
            )
    if spec.amplitude is not None and spec.amplitude_mode is AmplitudeMode.AVG_PEAK_TO_PEAK:
        if not spec.amplitude.holds(stats.avg_amp_pp, tol):
            return Verdict.violated(
                f"average peak-to-peak amplitude {stats.avg_amp_pp:g}, expected {spec.amplitude}",
                witness=OscillationWitness(stats),
            )

    damping = None
    if spec.damping is not None:
        damping = classify_damping(extrema, sig, trend=spec.trend, tol=tol)
        if damping not in (spec.damping, Damping.BOTH):
            return Verdict.violated(
                f"oscillation of {sig.name} is {damping.value}, expected {spec.damping.value}",
                witness=OscillationWitness(stats, damping=damping),
            )
    return Verdict.holds(OscillationWitness(stats, all_cycles[0], damping))
