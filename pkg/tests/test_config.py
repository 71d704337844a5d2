from __future__ import annotations

import pytest

from sigprop.config import EvalConfig, SigpropConfig, load_config
from sigprop.errors import ConfigError


class TestLoadConfig:
    def test_defaults(self, isolated):
        config = load_config()
        assert config.eval == EvalConfig()
        assert config.output.format == "text"
        assert config.trace.time_column == "time"
        assert config.runtime.threads == 0

    def test_explicit_path(self, isolated, write_file):
        path = write_file("a.yaml", "eval:\n  eq_tol: 0.001\n  end_policy: strict\ntrace:\n  delimiter: ';'\n")
        config = load_config(path, quiet=True)
        assert config.eval.eq_tol == 0.001
        assert config.eval.strict
        assert config.trace.delimiter == ";"

    def test_missing_explicit_path(self, isolated):
        with pytest.raises(ConfigError, match="not found"):
            load_config(isolated / "nope.yaml")

    def test_working_directory_before_user_config(self, isolated, write_file):
        write_file("sigprop.yaml", "output:\n  format: json\n")
        user = isolated / "xdg" / "sigprop"
        user.mkdir(parents=True)
        (user / "config.yaml").write_text("output:\n  format: text\nruntime:\n  threads: 3\n")
        config = load_config(quiet=True)
        assert config.output.format == "json"
        assert config.runtime.threads == 0

    def test_user_config(self, isolated):
        user = isolated / "xdg" / "sigprop"
        user.mkdir(parents=True)
        (user / "config.yaml").write_text("runtime:\n  threads: 3\n")
        assert load_config(quiet=True).runtime.threads == 3

    def test_empty_file(self, isolated, write_file):
        assert load_config(write_file("empty.yaml", ""), quiet=True).eval == EvalConfig()

    def test_top_level_must_be_mapping(self, isolated, write_file):
        with pytest.raises(ConfigError, match="mapping"):
            load_config(write_file("list.yaml", "- 1\n- 2\n"), quiet=True)

    def test_unknown_key_warns(self, isolated, write_file, capsys):
        config = load_config(write_file("a.yaml", "eval:\n  eq_tolerance: 1\n"), quiet=True)
        assert config.eval.eq_tol == 1e-9
        assert "unknown config key 'eq_tolerance'" in capsys.readouterr().err

    def test_announces_source(self, isolated, write_file, capsys):
        load_config(write_file("a.yaml", "eval: {}\n"))
        assert "[sigprop] Config loaded from:" in capsys.readouterr().err


class TestEnvironment:
    def test_threads_override(self, isolated, monkeypatch):
        monkeypatch.setenv("SIGPROP_THREADS", "4")
        assert load_config().runtime.threads == 4

    @pytest.mark.parametrize("raw", ["zero", "0", "-2"])
    def test_bad_threads_ignored(self, isolated, monkeypatch, capsys, raw):
        monkeypatch.setenv("SIGPROP_THREADS", raw)
        assert load_config().runtime.threads == 0
        assert "ignoring SIGPROP_THREADS" in capsys.readouterr().err


class TestValidate:
    @pytest.mark.parametrize(
        "yaml_text",
        [
            "eval:\n  interp: cubic\n",
            "eval:\n  end_policy: lenient\n",
            "eval:\n  extrema_method: precomputed\n",
            "eval:\n  psi: median\n",
            "eval:\n  spike_anchor: middle\n",
            "eval:\n  eq_tol: -1\n",
            "eval:\n  prominence: -0.5\n",
            "output:\n  format: xml\n",
            "runtime:\n  threads: -1\n",
        ],
    )
    def test_rejected(self, isolated, write_file, yaml_text):
        with pytest.raises(ConfigError):
            load_config(write_file("bad.yaml", yaml_text), quiet=True)

    def test_snapshot_is_eval_section(self):
        config = SigpropConfig()
        config.eval.psi = "max"
        assert config.snapshot()["psi"] == "max"
        assert "format" not in config.snapshot()
