"""sigprop: offline trace checking of signal-based temporal properties."""

from __future__ import annotations

__version__ = "0.1.0"
