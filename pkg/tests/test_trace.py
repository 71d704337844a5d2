from __future__ import annotations

import numpy as np
import pytest

from sigprop.errors import (
    GridMismatch,
    MalformedCsv,
    NonFiniteValue,
    NonMonotoneTime,
    OutOfDomain,
    TooFewSamples,
    TraceNotFound,
    UnknownSignal,
)
from sigprop.trace import (
    CLOCK,
    InterpolationMode,
    Signal,
    Trace,
    finite_difference,
    load_trace,
    value_at,
    window,
    write_trace,
)


class TestTraceModel:
    def test_signals_share_the_grid(self):
        trace = Trace([0.0, 1.0, 2.0], {"x": [1, 2, 3], "y": [0, 0, 1]})
        assert trace.names == ("x", "y")
        assert len(trace) == 3
        assert trace.length == 2.0
        assert np.array_equal(trace.signal("y").times, trace.times)

    def test_arrays_are_read_only(self):
        trace = Trace([0.0, 1.0], {"x": [1, 2]})
        with pytest.raises(ValueError):
            trace.signal("x").values[0] = 5.0

    def test_single_sample_is_rejected(self):
        with pytest.raises(TooFewSamples):
            Trace([0.0], {"x": [1.0]})

    def test_time_must_strictly_increase(self):
        with pytest.raises(NonMonotoneTime, match="sample 2"):
            Trace([0.0, 1.0, 1.0], {"x": [1, 2, 3]})

    def test_non_finite_values_are_rejected(self):
        with pytest.raises(NonFiniteValue):
            Trace([0.0, 1.0], {"x": [1.0, float("nan")]})

    def test_column_length_must_match_grid(self):
        with pytest.raises(GridMismatch):
            Trace([0.0, 1.0, 2.0], {"x": [1.0, 2.0]})

    def test_unknown_signal_lists_columns(self):
        trace = Trace([0.0, 1.0], {"x": [1, 2]})
        with pytest.raises(UnknownSignal, match="x"):
            trace.signal("speed")

    def test_clock_is_the_grid(self):
        trace = Trace([0.0, 0.5, 2.0], {"x": [1, 2, 3]})
        assert CLOCK in trace
        assert np.array_equal(trace.signal(CLOCK).values, [0.0, 0.5, 2.0])

    def test_bind_exposes_column_under_old_name(self):
        trace = Trace([0.0, 1.0], {"x": [1, 2], "x_run2": [5, 6]})
        bound = trace.bind({"x": "x_run2"})
        assert list(bound.signal("x").values) == [5, 6]
        assert list(trace.signal("x").values) == [1, 2]

    def test_truncated_keeps_prefix(self):
        trace = Trace([0.0, 1.0, 2.0, 3.0], {"x": [1, 2, 3, 4]})
        short = trace.truncated(2)
        assert list(short.times) == [0.0, 1.0]
        assert list(short.signal("x").values) == [1, 2]

    def test_reversed_mirrors_time(self):
        trace = Trace([0.0, 1.0, 3.0], {"x": [1, 2, 3]})
        rev = trace.reversed()
        assert list(rev.times) == [0.0, 2.0, 3.0]
        assert list(rev.signal("x").values) == [3, 2, 1]
        assert rev.reversed() == trace

    def test_with_signal_rejects_foreign_grid(self):
        trace = Trace([0.0, 1.0, 2.0], {"x": [1, 2, 3]})
        with pytest.raises(GridMismatch):
            trace.with_signal(Signal("y", [0.0, 1.0], [1.0, 2.0]))


class TestQueries:
    def test_grid_lookup(self):
        sig = Signal("x", [0.0, 1.0, 2.0], [10.0, 20.0, 30.0])
        assert value_at(sig, 1.0) == 20.0

    def test_grid_lookup_off_grid_fails(self):
        sig = Signal("x", [0.0, 1.0, 2.0], [10.0, 20.0, 30.0])
        with pytest.raises(OutOfDomain):
            value_at(sig, 0.5)

    def test_linear_lookup_interpolates(self):
        sig = Signal("x", [0.0, 1.0, 2.0], [10.0, 20.0, 30.0])
        assert value_at(sig, 0.25, InterpolationMode.LINEAR) == pytest.approx(12.5)

    def test_lookup_outside_trace_fails(self):
        sig = Signal("x", [0.0, 1.0], [1.0, 2.0])
        with pytest.raises(OutOfDomain):
            value_at(sig, 1.5, InterpolationMode.LINEAR)

    def test_linear_lookup_is_lipschitz(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            times = np.cumsum(rng.uniform(0.1, 1.0, 30))
            sig = Signal("x", times, rng.normal(size=30))
            slope = np.max(np.abs(np.diff(sig.values) / np.diff(times)))
            for t1, t2 in rng.uniform(times[0], times[-1], (50, 2)):
                f1 = value_at(sig, t1, InterpolationMode.LINEAR)
                f2 = value_at(sig, t2, InterpolationMode.LINEAR)
                assert abs(f1 - f2) <= slope * abs(t1 - t2) + 1e-9

    def test_window_is_inclusive(self):
        times = np.arange(10, dtype=float)
        assert window(times, 2.0, 5.0, 1e-9) == (2, 5)

    def test_singular_window_snaps_to_nearest_sample(self):
        times = np.array([0.0, 1.0, 2.0])
        assert window(times, 1.4, 1.4, 1e-9) == (1, 1)

    def test_window_beyond_trace_is_empty(self):
        start, stop = window(np.arange(5, dtype=float), 7.0, 9.0, 1e-9)
        assert start > stop


class TestFiniteDifference:
    def test_derivative_of_sine_is_cosine(self):
        times = np.arange(0.0, 10.0, 0.01)
        sig = Signal("s", times, np.sin(times))
        d = finite_difference(sig)
        assert len(d) == len(sig) - 1
        assert np.max(np.abs(d.values - np.cos(d.times))) < 0.01

    def test_ramp_has_constant_slope(self):
        times = np.arange(40) * 0.25
        for c in (-3.0, 0.0, 0.5, 7.0):
            d = finite_difference(Signal("s", times, c * times))
            assert np.array_equal(d.values, np.full(39, c))

    def test_second_order_drops_two_samples(self):
        times = np.arange(6, dtype=float)
        sig = Signal("s", times, times**2)
        d2 = finite_difference(sig, 2)
        assert len(d2) == 4
        assert np.allclose(d2.values, 2.0)

    def test_order_must_be_one_or_two(self):
        sig = Signal("s", [0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            finite_difference(sig, 3)


class TestCsv:
    def test_load(self, write_file):
        path = write_file("run.csv", "time,x,y\n0,1,2\n0.5,3,4\n1.0,5,6\n")
        trace = load_trace(path)
        assert trace.names == ("x", "y")
        assert list(trace.times) == [0.0, 0.5, 1.0]
        assert list(trace.signal("y").values) == [2, 4, 6]
        assert trace.path == str(path)

    def test_time_column_need_not_be_first(self, write_file):
        path = write_file("run.csv", "x,t\n1,0\n2,1\n")
        trace = load_trace(path, time_column="t")
        assert list(trace.times) == [0.0, 1.0]

    def test_semicolon_delimiter(self, write_file):
        path = write_file("run.csv", "time;x\n0;1\n1;2\n")
        assert list(load_trace(path, delimiter=";").signal("x").values) == [1, 2]

    def test_missing_file(self, tmp_path):
        with pytest.raises(TraceNotFound):
            load_trace(tmp_path / "nope.csv")

    def test_missing_time_column(self, write_file):
        with pytest.raises(MalformedCsv, match="time"):
            load_trace(write_file("run.csv", "t,x\n0,1\n1,2\n"))

    def test_ragged_row_names_the_line(self, write_file):
        with pytest.raises(MalformedCsv, match=":3:"):
            load_trace(write_file("run.csv", "time,x\n0,1\n1\n"))

    def test_unparsable_cell(self, write_file):
        with pytest.raises(MalformedCsv, match="abc"):
            load_trace(write_file("run.csv", "time,x\n0,1\n1,abc\n"))

    def test_nan_cell(self, write_file):
        with pytest.raises(NonFiniteValue):
            load_trace(write_file("run.csv", "time,x\n0,1\n1,nan\n"))

    def test_duplicate_header(self, write_file):
        with pytest.raises(MalformedCsv, match="duplicate"):
            load_trace(write_file("run.csv", "time,x,x\n0,1,2\n1,2,3\n"))

    def test_too_short(self, write_file):
        with pytest.raises(MalformedCsv):
            load_trace(write_file("run.csv", "time,x\n0,1\n"))

    def test_unsorted_time(self, write_file):
        with pytest.raises(NonMonotoneTime):
            load_trace(write_file("run.csv", "time,x\n0,1\n2,1\n1,1\n"))

    def test_written_trace_reloads_exactly(self, tmp_path):
        times = np.linspace(0.0, 1.0, 7)
        trace = Trace(times, {"x": np.sin(times) / 3, "y": np.exp(times)})
        write_trace(trace, tmp_path / "out.csv")
        assert load_trace(tmp_path / "out.csv") == trace
