from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from sigprop.nodes import Property
from sigprop.parser import parse
from sigprop.trace import Trace


def one(text: str) -> Property:
    """Parse a single property; a bare body gets the name ``p``."""
    if not text.lstrip().startswith("property"):
        text = f"property p: {text};"
    (prop,) = parse(text)
    return prop


def ints(*columns: list[int], names: str = "s") -> Trace:
    """Trace on the grid 0, 1, 2, ... with one column per name."""
    n = len(columns[0])
    return Trace(np.arange(n, dtype=float), dict(zip(names.split(), columns)))


@st.composite
def int_traces(draw: st.DrawFn, max_samples: int = 40) -> Trace:
    """Integer-valued signals ``s`` (0..4) and ``c`` (0..1) on the grid 0, 1, 2, ..."""
    n = draw(st.integers(min_value=3, max_value=max_samples))
    s = draw(st.lists(st.integers(min_value=0, max_value=4), min_size=n, max_size=n))
    c = draw(st.lists(st.integers(min_value=0, max_value=1), min_size=n, max_size=n))
    return ints(s, c, names="s c")
