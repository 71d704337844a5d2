"""Report rendering: JSON for machines, one line per property for people."""

from __future__ import annotations

import dataclasses
import json
from enum import Enum
from typing import Any

import numpy as np

from sigprop.engine import Report
from sigprop.oscillation import OscillationWitness
from sigprop.spike import SpikeFeatures
from sigprop.verdict import Pair, Pairs, TimePoint, Verdict

SCHEMA_VERSION = 1


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data for witnesses and config values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        data = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        data["type"] = type(obj).__name__
        if isinstance(obj, Pair):
            data["distance"] = obj.distance
        return data
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def verdict_dict(verdict: Verdict) -> dict[str, Any]:
    return {
        "name": verdict.name,
        "status": verdict.status.value,
        "reason": verdict.reason,
        "witness": to_jsonable(verdict.witness),
    }


def report_dict(report: Report) -> dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "status": report.status.value,
        "trace": to_jsonable(report.trace),
        "config": to_jsonable(report.config),
        "properties": [verdict_dict(v) for v in report.verdicts],
    }


def render_json(report: Report) -> str:
    return json.dumps(report_dict(report), sort_keys=True, indent=2) + "\n"


def _num(x: float | None) -> str:
    return "-" if x is None else f"{x:g}"


def describe_witness(witness: Any) -> str:
    match witness:
        case None:
            return ""
        case TimePoint(index=i, t=t, value=None):
            return f"t={t:g} [#{i}]"
        case TimePoint(index=i, t=t, value=v):
            return f"t={t:g} [#{i}] value={v:g}"
        case Pair(cause=c, effect=e):
            return f"cause t={c.t:g} -> effect t={e.t:g} (distance {witness.distance:g})"
        case Pairs(pairs=()):
            return "no occurrences"
        case Pairs(pairs=pairs):
            worst = max(pairs, key=lambda p: p.distance)
            return f"{len(pairs)} matched, max distance {worst.distance:g} at t={worst.cause.t:g}"
        case SpikeFeatures():
            f = witness
            return (
                f"vp1={f.vp1:g} pp={f.pp:g} vp2={f.vp2:g} "
                f"a={f.a:g} sp1={f.sp1:g} sp2={f.sp2:g} w={f.w:g}"
            )
        case OscillationWitness(stats=stats, cycle=cycle, damping=damping):
            parts = []
            if stats is not None:
                parts.append(
                    f"extrema={len(stats.extrema)} cycles={stats.osc_n} "
                    f"avg_period={_num(stats.avg_period)} avg_pp={stats.avg_amp_pp:g}"
                )
            if cycle is not None:
                parts.append(
                    f"cycle [{cycle.start.t:g}, {cycle.end.t:g}] period={cycle.period:g} "
                    f"amplitude={_num(cycle.amplitude)}"
                )
            if damping is not None:
                parts.append(damping.value)
            return "; ".join(parts)
    return repr(witness)


def render_text(report: Report) -> str:
    info = report.trace
    lines = [f"trace {info.path or '<memory>'}: {info.samples} samples, |s|={info.length:g}"]
    width = max((len(v.name) for v in report.verdicts), default=0)
    for v in report.verdicts:
        detail = "  ".join(part for part in (describe_witness(v.witness), v.reason) if part)
        lines.append(f"{v.name.ljust(width)}  {v.status.value.upper():<12}  {detail}".rstrip())
    counts = ", ".join(f"{report.count(s)} {s.value}" for s in type(report.status))
    lines.append(f"{len(report.verdicts)} properties: {counts}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str = "text") -> str:
    return render_json(report) if fmt == "json" else render_text(report)
