"""Differential tests: the vectorized engine against the brute-force evaluator."""

from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from figures import data_assertion_trace
from helpers import int_traces, one
from sigprop.config import EvalConfig
from sigprop.engine import evaluate_property
from sigprop.errors import TraceTooLarge
from sigprop.naive import evaluate_naive
from sigprop.nodes import Property
from sigprop.trace import Trace
from sigprop.typecheck import typecheck

# {L} is the last sample; {H} lies strictly inside the trace.
TEMPLATES = [
    "assert s >= 1",
    "assert s < 3 or c >= 1 in [1, {L}]",
    "assert s - c != 2 in [0, 1], [{L}, {L}]",
    "spike on s in [0, {L}] with a >= 1, w <= 4",
    "spike on s in [0, {L}] with sp1 >= 1 psi max",
    "spike on s in [0, {L}] with a <= 2 downward anchor vp2",
    "spike on s in [1, {L}] with a >= 1",
    "spike on s in [0, {H}] with w <= 3 psi mean",
    "spike on s in [0, {L}] with a >= 1 method punctual",
    "spike2 on s with m = 1, w = 3",
    "oscillation on s in [0, {L}] with period <= 6",
    "oscillation on s in [0, {L}] with amplitude >= 2 avg_pp",
    "oscillation on s in [0, {L}] with amplitude <= 3 ref 2",
    "oscillation on s in [1, {H}] with period <= 4",
    "oscillation on s in [0, {L}] with amplitude >= 2 prominence 1",
    "oscillation on s in [0, {L}] with period <= 8 prominence 2 avg_period",
    "oscillation on s in [0, {L}] with period <= 6 method punctual",
    "let d = s - c then assert d >= -1",
    "let d = der(s) then assert d <= 2",
    "whenever event (assert s >= 3) then event (assert c >= 1) within <= 3",
    "whenever state (assert s >= 3) then event (assert c >= 1)",
    "whenever event (spike on s in [0, {L}] with a >= 2) then event (assert c >= 1) within <= 4",
    "before event (assert c >= 1) requires event (assert s >= 2) within <= 4",
    "before event (assert c >= 1) requires state (assert s <= 1)",
    "rise on s to (assert s >= 3) after (assert c >= 1) within 3",
    "fall on s to (assert s <= 0) after (assert c >= 1) within 4 monotonic",
    "overshoot on s to (assert s >= 2) after (assert c >= 1) max target + 1 over 2",
    "undershoot on s to (assert s <= 1) after (assert c >= 1) min 0 over 2",
]

# Evaluated on traces that also carry derivative columns d1 and d2.
DERIVATIVE_TEMPLATES = [
    "spike on s in [0, {L}] with a >= 1 method precomputed(d1, d2)",
    "spike on s in [1, {H}] with w <= 4 psi max method precomputed(d1, d2)",
    "oscillation on s in [0, {L}] with period <= 6 method precomputed(d1, d2)",
    "oscillation on s in [0, {L}] with amplitude >= 1 prominence 1 method precomputed(d1, d2)",
]

# Spikes take their minimum swing from the configuration only.
PROMINENCE_TEMPLATES = [
    "spike on s in [0, {L}] with a >= 1, w <= 6",
    "spike on s in [1, {H}] with sp1 >= 1 psi max method punctual",
    "whenever event (spike on s in [0, {L}] with a >= 2) then event (assert c >= 1) within <= 4",
]

CONFIGS = [EvalConfig(), EvalConfig(end_policy="strict")]
PROMINENT = EvalConfig(prominence=1.0)


def integer_trace(s: list[int], c: list[int]) -> Trace:
    return Trace(np.arange(len(s), dtype=float), {"s": s, "c": c})


def with_derivatives(trace: Trace) -> Trace:
    """Add forward-difference columns d1 and d2, padded with finite values at the end."""
    s = trace.signal("s").values
    d1 = np.append(np.diff(s), 1.0)
    d2 = np.append(np.diff(d1), 0.0)
    return Trace(trace.times, {"s": s, "c": trace.signal("c").values, "d1": d1, "d2": d2})


@functools.cache
def prepared(template: str, n: int, names: tuple[str, ...]) -> Property:
    L = n - 1
    return typecheck(one(template.format(L=L, H=L // 2 + 1)), names)


def statuses(template: str, trace: Trace, cfg: EvalConfig):
    prop = prepared(template, len(trace), trace.names)
    return evaluate_property(prop, trace, cfg).status, evaluate_naive(prop, trace, cfg).status


def seeded_trace(seed: int) -> Trace:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 50))
    return integer_trace(list(rng.integers(0, 5, size=n)), list(rng.integers(0, 2, size=n)))


class TestAgreement:
    @pytest.mark.parametrize("template", TEMPLATES)
    @given(trace=int_traces(), strict=st.booleans())
    def test_same_status(self, template, trace, strict):
        engine, naive = statuses(template, trace, CONFIGS[strict])
        assert engine is naive

    @pytest.mark.parametrize("template", DERIVATIVE_TEMPLATES)
    @given(trace=int_traces())
    def test_precomputed_derivatives(self, template, trace):
        engine, naive = statuses(template, with_derivatives(trace), CONFIGS[0])
        assert engine is naive

    @pytest.mark.parametrize("template", PROMINENCE_TEMPLATES)
    @given(trace=int_traces())
    def test_configured_prominence(self, template, trace):
        engine, naive = statuses(template, trace, PROMINENT)
        assert engine is naive

    @pytest.mark.parametrize("seed", range(1000))
    def test_seeded_traces(self, seed):
        trace = seeded_trace(seed)
        for template in TEMPLATES:
            engine, naive = statuses(template, trace, CONFIGS[seed % 2])
            assert engine is naive, template
        for template in PROMINENCE_TEMPLATES:
            engine, naive = statuses(template, trace, PROMINENT)
            assert engine is naive, template
        derived = with_derivatives(trace)
        for template in DERIVATIVE_TEMPLATES:
            engine, naive = statuses(template, derived, CONFIGS[seed % 2])
            assert engine is naive, template

    def test_waveform_assertions(self):
        trace = data_assertion_trace()
        for name in ("s1", "s2"):
            prop = typecheck(one(f"assert {name} < 3 in [2, 6], [10, 15]"), trace.names)
            assert evaluate_naive(prop, trace).status is evaluate_property(prop, trace).status


class TestLimits:
    def test_trace_too_large(self):
        trace = integer_trace([0] * 6, [0] * 6)
        prop = one("assert s >= 0")
        with pytest.raises(TraceTooLarge):
            evaluate_naive(prop, trace, EvalConfig(naive_limit=5))
        assert evaluate_naive(prop, trace, EvalConfig(naive_limit=6)).ok

    def test_verdict_is_named(self):
        trace = integer_trace([0, 1, 2], [0, 0, 0])
        verdict = evaluate_naive(one("property ramp: assert s <= 1;"), trace)
        assert verdict.name == "ramp"
        assert not verdict.ok
