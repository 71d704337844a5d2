from __future__ import annotations

import math

import numpy as np
import pytest

from figures import sine_trace
from sigprop.compare import Bound, Op
from sigprop.errors import InvalidThreshold, OutOfDomain, TooFewExtrema
from sigprop.extrema import find_alternating_extrema
from sigprop.oscillation import (
    AmplitudeMode,
    Damping,
    OscillationSpec,
    PeriodMode,
    check_oscillation,
    classify_damping,
    cycles,
    oscillation_stats,
)
from sigprop.trace import Trace
from sigprop.verdict import Status


def trace_of(values: list[float]) -> Trace:
    return Trace(np.arange(len(values), dtype=float), {"s": values})


def check(trace: Trace, **kwargs) -> object:
    window = kwargs.pop("window", (0.0, trace.length))
    return check_oscillation(trace.signal("s"), OscillationSpec(window, **kwargs), trace)


DAMPED = [5, 10, 1, 9, 2, 8, 3, 7, 5]
UNEVEN = [5, 10, 1, 11, 4, 12, 7, 13, 10]


class TestSineOscillation:
    def test_fast_sine_holds(self):
        """sin(t/2) + 1 has period 4*pi and peak-to-peak amplitude 2."""
        trace = sine_trace(2)
        verdict = check(trace, period=Bound(Op.LT, 20), amplitude=Bound(Op.LT, 3))
        assert verdict.status is Status.HOLDS
        assert verdict.witness.cycle.period == pytest.approx(4 * math.pi, abs=0.05)
        assert verdict.witness.cycle.amplitude == pytest.approx(2.0, abs=0.01)

    def test_average_period_estimate(self):
        trace = sine_trace(2)
        extrema = find_alternating_extrema(trace.signal("s"), 0, 60)
        stats = oscillation_stats(extrema, trace.signal("s"))
        assert len(extrema) == 10
        assert stats.osc_n == 4
        assert stats.avg_period == pytest.approx(4 * math.pi, abs=0.05)
        assert stats.avg_amp_pp == pytest.approx(2.0, abs=0.01)

    def test_slow_sine_is_violated(self):
        """sin(t/6) + 1 completes one cycle of period 12*pi inside [0, 60]."""
        trace = sine_trace(6)
        verdict = check(trace, period=Bound(Op.LT, 20), amplitude=Bound(Op.LT, 3))
        assert verdict.status is Status.VIOLATED
        assert verdict.witness.cycle.period == pytest.approx(12 * math.pi, abs=0.05)

    def test_average_period_mode(self):
        trace = sine_trace(2)
        verdict = check(trace, period=Bound(Op.LT, 12), period_mode=PeriodMode.AVERAGE)
        assert verdict.status is Status.VIOLATED
        assert "average period" in verdict.reason

    def test_reference_amplitude(self):
        trace = sine_trace(2)
        mode = AmplitudeMode.REFERENCE
        assert check(trace, amplitude=Bound(Op.LE, 1.01), amplitude_mode=mode, ref=1.0).ok
        assert not check(trace, amplitude=Bound(Op.LE, 0.9), amplitude_mode=mode, ref=1.0).ok

    def test_reference_amplitude_around_the_mean(self):
        """Around its own mean a sampled sine swings by its peak amplitude, up to 2*dt*max|slope|."""
        dt = 0.01
        times = np.arange(0.0, 4 * math.pi, dt)
        trace = Trace(times, {"s": np.sin(times)})
        mean = float(np.mean(trace.signal("s").values))
        spec = OscillationSpec(
            (0.0, trace.length), amplitude=Bound(Op.LE, 1 + 2 * dt), amplitude_mode=AmplitudeMode.REFERENCE, ref=mean
        )
        extrema = find_alternating_extrema(trace.signal("s"), 0.0, trace.length)
        assert len(extrema) == 4
        for cycle in cycles(extrema, trace.signal("s"), spec):
            assert cycle.amplitude == pytest.approx(1.0, abs=2 * dt)
        assert check_oscillation(trace.signal("s"), spec, trace).ok

    def test_window_outside_trace(self):
        trace = sine_trace(2)
        with pytest.raises(OutOfDomain):
            check(trace, window=(70.0, 90.0), period=Bound(Op.LT, 20))


class TestSampledOscillation:
    def test_too_few_extrema(self):
        verdict = check(trace_of([0, 1, 0, 0]), period=Bound(Op.LE, 10))
        assert verdict.status is Status.VIOLATED
        assert verdict.witness.stats is None

    def test_average_peak_to_peak(self):
        trace = trace_of([0, 2, 0, 3, 0])
        verdict = check(trace, amplitude=Bound(Op.LE, 2.5), amplitude_mode=AmplitudeMode.AVG_PEAK_TO_PEAK)
        assert verdict.ok
        assert verdict.witness.stats.avg_amp_pp == pytest.approx(2.5)

    def test_per_cycle_amplitude_uses_larger_swing(self):
        trace = trace_of([0, 2, 0, 3, 0])
        assert not check(trace, amplitude=Bound(Op.LE, 2.5)).ok

    def test_prominence_option_merges_ripples(self):
        trace = trace_of([0, 4, 3.8, 4.1, 0, 4, 0])
        assert not check(trace, amplitude=Bound(Op.GE, 1)).ok
        assert check(trace, amplitude=Bound(Op.GE, 1), prominence=0.5).ok

    def test_damped_requirement(self):
        assert check(trace_of(DAMPED), period=Bound(Op.LE, 100), damping=Damping.DAMPED).ok
        verdict = check(trace_of(DAMPED), period=Bound(Op.LE, 100), damping=Damping.DRIVEN)
        assert verdict.status is Status.VIOLATED
        assert verdict.witness.damping is Damping.DAMPED

    def test_driven_requirement(self):
        assert check(trace_of(DAMPED[::-1]), period=Bound(Op.LE, 100), damping=Damping.DRIVEN).ok

    def test_trend_decides_uneven_amplitudes(self):
        trace = trace_of(UNEVEN)
        assert not check(trace, period=Bound(Op.LE, 100), damping=Damping.DAMPED).ok
        assert check(trace, period=Bound(Op.LE, 100), damping=Damping.DAMPED, trend=True).ok


class TestDampingClassification:
    def extrema(self, values):
        trace = trace_of(values)
        return find_alternating_extrema(trace.signal("s"), 0, trace.length), trace.signal("s")

    def test_shrinking(self):
        assert classify_damping(*self.extrema(DAMPED)) is Damping.DAMPED

    def test_growing(self):
        assert classify_damping(*self.extrema(DAMPED[::-1])) is Damping.DRIVEN

    def test_constant_is_both(self):
        assert classify_damping(*self.extrema([1, 2, 0, 2, 0, 2, 1])) is Damping.BOTH

    def test_uneven_is_neither(self):
        assert classify_damping(*self.extrema(UNEVEN)) is Damping.NEITHER

    def test_uneven_trend(self):
        extrema, sig = self.extrema(UNEVEN)
        assert classify_damping(extrema, sig, trend=True) is Damping.DAMPED

    def test_reversal_swaps_damped_and_driven(self):
        swapped = {
            Damping.DAMPED: Damping.DRIVEN,
            Damping.DRIVEN: Damping.DAMPED,
            Damping.BOTH: Damping.BOTH,
            Damping.NEITHER: Damping.NEITHER,
        }
        checked = 0
        for seed in range(50):
            values = np.cumsum(np.random.default_rng(seed).choice([-3, -1, 1, 2], size=30))
            trace = trace_of(values.tolist())
            extrema, sig = self.extrema(values.tolist())
            if len(extrema) < 3:
                continue
            back = trace.reversed()
            mirrored = find_alternating_extrema(back.signal("s"), 0, back.length)
            assert classify_damping(mirrored, back.signal("s")) is swapped[classify_damping(extrema, sig)]
            checked += 1
        assert checked > 40

    def test_needs_three_extrema(self):
        with pytest.raises(TooFewExtrema):
            classify_damping(*self.extrema([0, 1, 0]))


class TestSpecValidation:
    def test_needs_a_constraint(self):
        with pytest.raises(InvalidThreshold):
            OscillationSpec((0.0, 1.0))

    def test_reference_mode_needs_value(self):
        with pytest.raises(InvalidThreshold):
            OscillationSpec((0.0, 1.0), amplitude=Bound(Op.LE, 1), amplitude_mode=AmplitudeMode.REFERENCE)

    def test_damping_requirement_is_damped_or_driven(self):
        with pytest.raises(InvalidThreshold):
            OscillationSpec((0.0, 1.0), period=Bound(Op.LE, 1), damping=Damping.BOTH)
