"""Sampled signal traces: loading, querying, finite differences."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

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

CLOCK = "time"


class InterpolationMode(str, Enum):
    GRID = "grid"
    LINEAR = "linear"


def _frozen(values: np.ndarray | list[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """One named series on a time grid. Immutable."""

    name: str
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = _frozen(self.times)
        values = _frozen(self.values)
        if times.shape != values.shape or times.ndim != 1:
            raise GridMismatch(f"signal {self.name}: {times.size} timestamps for {values.size} values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> float:
        """|s|: the last timestamp."""
        return float(self.times[-1])

    def __len__(self) -> int:
        return int(self.times.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def renamed(self, name: str) -> Signal:
        return Signal(name, self.times, self.values)


def window(times: np.ndarray, lo: float, hi: float, tol: float) -> tuple[int, int]:
    """Inclusive index range of grid points in [lo, hi]; empty when start > stop.

    A singular interval (lo == hi) snaps to the nearest sample.
    """
    if lo == hi:
        if lo < times[0] - tol or lo > times[-1] + tol:
            return 1, 0
        i = int(np.argmin(np.abs(times - lo)))
        return i, i
    start = int(np.searchsorted(times, lo - tol, side="left"))
    stop = int(np.searchsorted(times, hi + tol, side="right")) - 1
    return start, stop


def snap(times: np.ndarray, t: float, tol: float) -> int | None:
    """Index of the grid point within tol of t, if any."""
    i = int(np.searchsorted(times, t - tol, side="left"))
    if i < times.size and abs(times[i] - t) <= tol:
        return i
    return None


class Trace:
    """Signals sharing one strictly increasing time grid."""

    def __init__(
        self,
        times: np.ndarray | list[float],
        signals: Mapping[str, np.ndarray | list[float]],
        path: str | None = None,
    ) -> None:
        self._times = _frozen(times)
        if self._times.ndim != 1 or self._times.size < 2:
            raise TooFewSamples(f"a trace needs at least 2 samples, got {self._times.size}")
        if not np.all(np.isfinite(self._times)):
            raise NonFiniteValue("non-finite timestamp")
        steps = np.diff(self._times)
        if np.any(steps <= 0):
            i = int(np.argmax(steps <= 0)) + 1
            raise NonMonotoneTime(f"timestamps not strictly increasing at sample {i} (t={self._times[i]:g})")
        self._signals: dict[str, Signal] = {}
        for name, values in signals.items():
            sig = Signal(name, self._times, values)
            if not np.all(np.isfinite(sig.values)):
                raise NonFiniteValue(f"signal {name} has non-finite values")
            self._signals[name] = sig
        self.path = path

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._signals)

    @property
    def length(self) -> float:
        return float(self._times[-1])

    def __len__(self) -> int:
        return int(self._times.size)

    def __iter__(self) -> Iterator[Signal]:
        return iter(self._signals.values())

    def __contains__(self, name: object) -> bool:
        return name == CLOCK or name in self._signals

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return np.array_equal(self._times, other._times) and self._signals == other._signals

    __hash__ = None  # type: ignore[assignment]

    def signal(self, name: str) -> Signal:
        if name in self._signals:
            return self._signals[name]
        if name == CLOCK:
            return self.clock()
        raise UnknownSignal(f"unknown signal {name!r} (trace has: {', '.join(self._signals) or 'none'})")

    def clock(self) -> Signal:
        """The grid itself as a signal, for absolute-time predicates."""
        return Signal(CLOCK, self._times, self._times)

    def _derive(self, times: np.ndarray, signals: dict[str, np.ndarray]) -> Trace:
        return Trace(times, signals, path=self.path)

    def with_signal(self, sig: Signal) -> Trace:
        if len(sig) != len(self) or not np.array_equal(sig.times, self._times):
            raise GridMismatch(f"signal {sig.name} is not on the trace grid")
        signals = {name: s.values for name, s in self._signals.items()}
        signals[sig.name] = sig.values
        return self._derive(self._times, signals)

    def truncated(self, n: int) -> Trace:
        """The first n samples of every signal."""
        if n < 2:
            raise TooFewSamples(f"cannot truncate a trace to {n} samples")
        return self._derive(self._times[:n], {name: s.values[:n] for name, s in self._signals.items()})

    def bind(self, mapping: Mapping[str, str]) -> Trace:
        """Expose column ``new`` under the name ``old`` for every ``old -> new`` entry."""
        signals = {name: s.values for name, s in self._signals.items()}
        for old, new in mapping.items():
            signals[old] = self.signal(new).values
        return self._derive(self._times, signals)

    def reversed(self) -> Trace:
        """Mirror time so that t maps to t0 + |s| - t."""
        times = self._times[0] + self._times[-1] - self._times[::-1]
        return self._derive(times, {name: s.values[::-1] for name, s in self._signals.items()})

    def shifted(self, delta: float) -> Trace:
        return self._derive(self._times + delta, {name: s.values for name, s in self._signals.items()})


def value_at(sig: Signal, t: float, mode: InterpolationMode = InterpolationMode.GRID, tol: float = 1e-9) -> float:
    if t < sig.times[0] - tol or t > sig.length + tol:
        raise OutOfDomain(f"t={t:g} outside [{sig.times[0]:g}, {sig.length:g}] of {sig.name}")
    if mode is InterpolationMode.GRID:
        i = snap(sig.times, t, tol)
        if i is None:
            raise OutOfDomain(f"t={t:g} is not a sample point of {sig.name}")
        return float(sig.values[i])
    return float(np.interp(t, sig.times, sig.values))


def finite_difference(sig: Signal, order: int = 1) -> Signal:
    """Forward difference; the result drops the last ``order`` samples."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    if len(sig) < order + 1:
        raise TooFewSamples(f"{sig.name}: order-{order} difference needs {order + 1} samples, got {len(sig)}")
    times, values = sig.times, sig.values
    for _ in range(order):
        values = np.diff(values) / np.diff(times)
        times = times[:-1]
    return Signal(sig.name + "'" * order, times, values)


def load_trace(path: str | Path, delimiter: str = ",", time_column: str = "time") -> Trace:
    """Read a CSV trace with a time column and one column per signal."""
    path = Path(path)
    if not path.is_file():
        raise TraceNotFound(f"trace file not found: {path}")

    with open(path, newline="", encoding="utf-8") as f:
        rows = [row for row in csv.reader(f, delimiter=delimiter) if row]

    if not rows:
        raise MalformedCsv(f"{path}: empty file")
    header = [name.strip() for name in rows[0]]
    if time_column not in header:
        raise MalformedCsv(f"{path}: header has no {time_column!r} column")
    if len(header) < 2:
        raise MalformedCsv(f"{path}: header names no signal column")
    if len(set(header)) != len(header):
        raise MalformedCsv(f"{path}: duplicate column names in header")

    columns: list[list[float]] = [[] for _ in header]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedCsv(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        for col, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise MalformedCsv(f"{path}:{lineno}: cannot parse {cell.strip()!r} as a number") from None
            if not math.isfinite(value):
                raise NonFiniteValue(f"{path}:{lineno}: non-finite value in column {header[col]!r}")
            columns[col].append(value)

    if len(columns[0]) < 2:
        raise MalformedCsv(f"{path}: a trace needs at least 2 samples")

    t_idx = header.index(time_column)
    signals = {name: columns[i] for i, name in enumerate(header) if i != t_idx}
    return Trace(columns[t_idx], signals, path=str(path))


def write_trace(trace: Trace, path: str | Path, delimiter: str = ",", time_column: str = "time") -> None:
    """Write a trace as CSV; values use 17 significant digits so reloading is exact."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter=delimiter)
        writer.writerow([time_column, *trace.names])
        columns = [trace.times, *(s.values for s in trace)]
        for row in zip(*columns):
            writer.writerow([format(float(v), ".17g") for v in row])
