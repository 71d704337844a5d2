from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import settings

from sigprop.config import EvalConfig

# SIGPROP_HYPOTHESIS=thorough runs a thousand generated traces per property test.
settings.register_profile("dev", max_examples=100, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("SIGPROP_HYPOTHESIS", "dev"))


@pytest.fixture
def cfg() -> EvalConfig:
    return EvalConfig()


@pytest.fixture
def strict_cfg() -> EvalConfig:
    return EvalConfig(end_policy="strict")


@pytest.fixture
def write_file(tmp_path: Path):
    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def isolated(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run from tmp_path with no user config and no environment overrides."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    monkeypatch.delenv("SIGPROP_THREADS", raising=False)
    return tmp_path
