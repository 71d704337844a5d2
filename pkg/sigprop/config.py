"""Load and validate sigprop configuration."""

from __future__ import annotations

import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from sigprop.errors import ConfigError

INTERP_MODES = ("grid", "linear")
END_POLICIES = ("inconclusive", "strict")
EXTREMA_METHODS = ("analytical", "punctual")
PSI_FUNCTIONS = ("min", "max", "mean")
SPIKE_ANCHORS = ("vp1", "peak", "vp2")
OUTPUT_FORMATS = ("text", "json")


@dataclass
class EvalConfig:
    eq_tol: float = 1e-9
    deriv_tol: float = 1e-6
    prominence: float = 0.0
    interp: str = "grid"  # "grid" or "linear"
    end_policy: str = "inconclusive"  # "inconclusive" or "strict"
    extrema_method: str = "analytical"
    psi: str = "min"
    spike_anchor: str = "peak"
    naive_limit: int = 10_000

    def validate(self) -> None:
        _check_choice("eval.interp", self.interp, INTERP_MODES)
        _check_choice("eval.end_policy", self.end_policy, END_POLICIES)
        _check_choice("eval.extrema_method", self.extrema_method, EXTREMA_METHODS)
        _check_choice("eval.psi", self.psi, PSI_FUNCTIONS)
        _check_choice("eval.spike_anchor", self.spike_anchor, SPIKE_ANCHORS)
        for name in ("eq_tol", "deriv_tol", "prominence"):
            if getattr(self, name) < 0:
                raise ConfigError(f"eval.{name} must be >= 0, got {getattr(self, name)}")

    @property
    def strict(self) -> bool:
        return self.end_policy == "strict"


@dataclass
class TraceConfig:
    delimiter: str = ","
    time_column: str = "time"


@dataclass
class OutputConfig:
    format: str = "text"  # "text" or "json"
    report: str = ""  # empty = stdout


@dataclass
class RuntimeConfig:
    threads: int = 0  # 0 = one worker per CPU


@dataclass
class SigpropConfig:
    eval: EvalConfig = field(default_factory=EvalConfig)
    trace: TraceConfig = field(default_factory=TraceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    def validate(self) -> None:
        self.eval.validate()
        _check_choice("output.format", self.output.format, OUTPUT_FORMATS)
        if self.runtime.threads < 0:
            raise ConfigError(f"runtime.threads must be >= 0, got {self.runtime.threads}")

    def snapshot(self) -> dict[str, Any]:
        return asdict(self.eval)


def _check_choice(name: str, value: str, choices: tuple[str, ...]) -> None:
    if value not in choices:
        raise ConfigError(f"{name} must be one of {', '.join(choices)}, got {value!r}")


def _apply_dict(dc: Any, data: dict) -> None:
    """Apply a dictionary onto an existing dataclass."""
    for key, value in data.items():
        if hasattr(dc, key):
            setattr(dc, key, value)
        else:
            print(f"[sigprop] WARNING: unknown config key {key!r} ignored", file=sys.stderr)


def _apply_env(config: SigpropConfig) -> None:
    raw = os.environ.get("SIGPROP_THREADS")
    if not raw:
        return
    try:
        threads = int(raw)
    except ValueError:
        threads = -1
    if threads < 1:
        print(f"[sigprop] WARNING: ignoring SIGPROP_THREADS={raw!r}", file=sys.stderr)
        return
    config.runtime.threads = threads


def load_config(path: str | Path | None = None, *, quiet: bool = False) -> SigpropConfig:
    """Load configuration from YAML. Searches in order:
    1. Explicit path
    2. ./sigprop.yaml
    3. ~/.config/sigprop/config.yaml
    """
    search_paths: list[Path] = []

    if path:
        explicit = Path(path)
        if not explicit.is_file():
            raise ConfigError(f"config file not found: {explicit}")
        search_paths.append(explicit)

    search_paths.extend([
        Path.cwd() / "sigprop.yaml",
        Path(os.environ.get("XDG_CONFIG_HOME", Path.home() / ".config")) / "sigprop" / "config.yaml",
    ])

    config = SigpropConfig()

    for p in search_paths:
        if p.is_file():
            with open(p, encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
            if not isinstance(raw, dict):
                raise ConfigError(f"{p}: top level must be a mapping")

            for section in ("eval", "trace", "output", "runtime"):
                if section in raw:
                    _apply_dict(getattr(config, section), raw[section] or {})

            if not quiet:
                print(f"[sigprop] Config loaded from: {p}", file=sys.stderr)
            break

    _apply_env(config)
    config.validate()
    return config
