from __future__ import annotations

import numpy as np
import pytest

from figures import spike_trace
from sigprop.errors import MissingDerivativeColumn, OutOfDomain
from sigprop.extrema import (
    ExtremaMethod,
    Extremum,
    ExtremumKind,
    alternate,
    find_alternating_extrema,
    is_local_max,
    is_local_min,
)
from sigprop.trace import Signal, Trace

MIN, MAX = ExtremumKind.MIN, ExtremumKind.MAX


def sig(values: list[float]) -> Signal:
    return Signal("s", np.arange(len(values), dtype=float), values)


def kinds(extrema: list[Extremum]) -> list[tuple[str, float]]:
    return [(e.kind.value, e.t) for e in extrema]


class TestLocalExtremumPredicates:
    def test_analytical_min_over_window(self):
        s = sig([3, 2, 1, 2, 0])
        assert is_local_min(s, 2, 1, 3)
        assert not is_local_min(s, 2, 0, 4)

    def test_analytical_max_over_window(self):
        s = sig([0, 2, 5, 2, 0])
        assert is_local_max(s, 2, 0, 4)
        assert not is_local_max(s, 1, 0, 4)

    def test_point_outside_window(self):
        with pytest.raises(OutOfDomain):
            is_local_min(sig([1, 0, 1]), 2, 0, 1)

    def test_point_off_grid(self):
        with pytest.raises(OutOfDomain):
            is_local_min(sig([1, 0, 1]), 0.5, 0, 2)

    def test_punctual_uses_difference_signs(self):
        # forward difference at 1 is 0, second difference is positive
        s = sig([2, 1, 1, 3, 6])
        assert is_local_min(s, 1, 0, 4, ExtremaMethod.punctual())
        assert not is_local_max(s, 1, 0, 4, ExtremaMethod.punctual())

    def test_precomputed_reads_columns(self):
        times = np.arange(3, dtype=float)
        trace = Trace(times, {"s": [1, 0, 1], "d1": [-1, 0, 1], "d2": [2, 2, 2]})
        method = ExtremaMethod.precomputed("d1", "d2")
        assert is_local_min(trace.signal("s"), 1, 0, 2, method, trace)

    def test_precomputed_missing_column(self):
        trace = Trace(np.arange(3, dtype=float), {"s": [1, 0, 1], "d1": [-1, 0, 1]})
        method = ExtremaMethod.precomputed("d1", "d2")
        with pytest.raises(MissingDerivativeColumn):
            is_local_min(trace.signal("s"), 1, 0, 2, method, trace)


class TestAlternatingExtrema:
    def test_zigzag(self):
        found = find_alternating_extrema(sig([0, 2, 1, 3, 0, 4, 4]), 0, 6)
        assert kinds(found) == [("max", 1), ("min", 2), ("max", 3), ("min", 4)]

    def test_end_samples_are_never_extrema(self):
        assert find_alternating_extrema(sig([5, 1, 5]), 0, 2) == [Extremum(MIN, 1.0, 1.0, 1)]
        assert find_alternating_extrema(sig([0, 1, 2, 3]), 0, 3) == []

    def test_flat_run_reports_its_first_sample(self):
        found = find_alternating_extrema(sig([3, 1, 1, 1, 3]), 0, 4)
        assert found == [Extremum(MIN, 1.0, 1.0, 1)]

    def test_shoulder_is_not_an_extremum(self):
        assert find_alternating_extrema(sig([0, 1, 1, 2]), 0, 3) == []

    def test_window_limits_search(self):
        s = sig([0, 2, 0, 2, 0, 2, 0])
        assert kinds(find_alternating_extrema(s, 2, 6)) == [("min", 2), ("max", 3), ("min", 4), ("max", 5)]

    def test_extremum_on_window_bound(self):
        s = sig([2, 0, 2, 0, 2])
        assert kinds(find_alternating_extrema(s, 1, 3)) == [("min", 1), ("max", 2), ("min", 3)]

    def test_window_cutting_a_ramp(self):
        assert find_alternating_extrema(sig([0, 1, 2, 3, 2, 1]), 0, 2) == []

    def test_run_entering_the_window(self):
        # the flat valley spans samples 1..3; only 2..3 are inside
        found = find_alternating_extrema(sig([3, 1, 1, 1, 3]), 2, 4)
        assert found == [Extremum(MIN, 2.0, 1.0, 2)]

    def test_sequence_alternates(self):
        rng = np.random.default_rng(7)
        s = sig(list(rng.integers(0, 5, size=60)))
        found = find_alternating_extrema(s, 0, 59)
        assert all(a.kind is not b.kind for a, b in zip(found, found[1:]))
        assert all(a.t < b.t for a, b in zip(found, found[1:]))

    def test_prominence_drops_small_swings(self):
        s = sig([0, 5, 4.5, 5.2, 0, 1])
        assert kinds(find_alternating_extrema(s, 0, 5)) == [("max", 1), ("min", 2), ("max", 3), ("min", 4)]
        assert kinds(find_alternating_extrema(s, 0, 5, prominence=1.0)) == [("max", 3), ("min", 4)]

    def test_alternate_keeps_more_extreme_of_same_kind(self):
        candidates = [Extremum(MAX, 1, 3, 1), Extremum(MAX, 2, 4, 2), Extremum(MIN, 3, 0, 3)]
        assert alternate(candidates, 0.0) == [Extremum(MAX, 2, 4, 2), Extremum(MIN, 3, 0, 3)]

    def test_alternate_prefers_earlier_on_ties(self):
        candidates = [Extremum(MIN, 1, 0, 1), Extremum(MIN, 4, 0, 4)]
        assert alternate(candidates, 0.0) == [Extremum(MIN, 1, 0, 1)]

    def test_empty_window(self):
        assert find_alternating_extrema(sig([0, 1, 0]), 5, 9) == []

    def test_spike_waveform(self):
        trace = spike_trace()
        found = find_alternating_extrema(trace.signal("s1"), 0, 50)
        assert [(e.kind.value, e.t, e.v) for e in found] == [("min", 10.0, 1.0), ("max", 20.0, 2.0), ("min", 30.0, 1.0)]

    def test_punctual_method_on_smooth_signal(self):
        times = np.arange(0.0, 7.0, 0.5)
        s = Signal("s", times, (times - 3) ** 2)
        # |s'| <= 0.6 at t=2.5 and t=3; the lower of the two is kept
        found = find_alternating_extrema(s, 0, 6.5, ExtremaMethod.punctual(), deriv_tol=0.6)
        assert kinds(found) == [("min", 3.0)]


def random_walk(seed: int, n: int = 40) -> np.ndarray:
    """Integer walk without repeated neighbours, so every extremum is a single sample."""
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.choice([-2, -1, 1, 2], size=n)).astype(float)


class TestExtremaInvariants:
    @pytest.mark.parametrize("seed", range(10))
    def test_punctual_and_precomputed_agree(self, seed):
        rng = np.random.default_rng(seed)
        values = rng.integers(0, 4, size=30).astype(float)
        times = np.arange(values.size, dtype=float)
        d1 = np.append(np.diff(values), 1e3)
        d2 = np.append(np.diff(np.diff(values)), [0.0, 0.0])
        trace = Trace(times, {"s": values, "d1": d1, "d2": d2})
        s = trace.signal("s")
        columns = ExtremaMethod.precomputed("d1", "d2")
        for x in times:
            for predicate in (is_local_min, is_local_max):
                punctual = predicate(s, x, 0, times[-1], ExtremaMethod.punctual(), trace)
                assert punctual == predicate(s, x, 0, times[-1], columns, trace), (predicate.__name__, x)

    @pytest.mark.parametrize("seed", range(10))
    def test_each_extremum_is_local_between_its_neighbours(self, seed):
        rng = np.random.default_rng(seed)
        s = sig(list(rng.integers(0, 5, size=40)))
        found = find_alternating_extrema(s, 0, 39)
        bounds = [0.0] + [e.t for e in found] + [39.0]
        for k, e in enumerate(found):
            lo, hi = bounds[k], bounds[k + 2]
            predicate = is_local_min if e.kind is MIN else is_local_max
            assert predicate(s, e.t, lo, hi), e

    @pytest.mark.parametrize("seed", range(10))
    def test_time_reversal_mirrors_extrema(self, seed):
        values = random_walk(seed)
        trace = Trace(np.arange(values.size, dtype=float), {"s": values})
        last = trace.length
        forward = find_alternating_extrema(trace.signal("s"), 0, last)
        backward = find_alternating_extrema(trace.reversed().signal("s"), 0, last)
        assert sorted((e.kind.value, last - e.t, e.v) for e in forward) == sorted(
            (e.kind.value, e.t, e.v) for e in backward
        )
