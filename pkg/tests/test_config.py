"""Tests for freefam configuration."""

import json
import os
from pathlib import Path

import pytest
from pydantic import ValidationError
from pytest_mock import MockerFixture

from freefam import config as config_module
from freefam.config import FreefamConfig, load_config


@pytest.fixture(autouse=True)  # type: ignore[untyped-decorator]
def isolated_config(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, mocker: MockerFixture
) -> Path:
    """Point the config dir at an empty temp dir and clear FREEFAM_* variables."""
    config_dir = tmp_path / "config"
    config_dir.mkdir()
    monkeypatch.setattr(config_module, "CONFIG_DIR", config_dir)
    monkeypatch.chdir(tmp_path)
    kept = {k: v for k, v in os.environ.items() if not k.startswith("FREEFAM_")}
    mocker.patch.dict(os.environ, kept, clear=True)
    return config_dir


def test_defaults() -> None:
    """Defaults match the documented numerical settings."""
    config = FreefamConfig()
    assert config.order == 16
    assert config.quad_nodes == 2000
    assert config.tol == 1e-10
    assert config.nc_limit == 14


def test_load_config_without_files_uses_defaults() -> None:
    """No file and no environment means defaults."""
    assert load_config() == FreefamConfig()


def test_env_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    """FREEFAM_* variables override defaults."""
    monkeypatch.setenv("FREEFAM_ORDER", "24")
    monkeypatch.setenv("FREEFAM_QUAD_NODES", "4000")
    monkeypatch.setenv("FREEFAM_TOL", "1e-8")
    config = load_config()
    assert config.order == 24
    assert config.quad_nodes == 4000
    assert config.tol == 1e-8


def test_invalid_env_value_fails(monkeypatch: pytest.MonkeyPatch) -> None:
    """Out-of-range values are rejected by validation."""
    monkeypatch.setenv("FREEFAM_ORDER", "2")
    with pytest.raises(ValidationError):
        load_config()


def test_config_file_is_read(isolated_config: Path) -> None:
    """config.json in the config dir supplies values."""
    (isolated_config / "config.json").write_text(json.dumps({"order": 20, "max_moment": 12}))
    config = load_config()
    assert config.order == 20
    assert config.max_moment == 12


def test_env_beats_config_file(isolated_config: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Environment overrides take precedence over the config file."""
    (isolated_config / "config.json").write_text(json.dumps({"order": 20}))
    monkeypatch.setenv("FREEFAM_ORDER", "12")
    assert load_config().order == 12


def test_malformed_config_file_is_ignored(
    isolated_config: Path, caplog: pytest.LogCaptureFixture
) -> None:
    """A broken config.json logs a warning and falls back to defaults."""
    (isolated_config / "config.json").write_text("{not json")
    config = load_config()
    assert config.order == 16
    assert "malformed config file" in caplog.text


def test_dotenv_in_cwd_is_loaded(tmp_path: Path) -> None:
    """A .env in the working directory feeds the environment overrides."""
    (tmp_path / ".env").write_text("FREEFAM_QUAD_NODES=512\n")
    assert load_config().quad_nodes == 512


def test_config_dir_dotenv_wins(isolated_config: Path, tmp_path: Path) -> None:
    """The config-dir .env takes precedence over the working directory one."""
    (isolated_config / ".env").write_text("FREEFAM_ORDER=10\n")
    (tmp_path / ".env").write_text("FREEFAM_ORDER=30\n")
    assert load_config().order == 10


def test_invalid_startup_settings_fall_back_to_defaults(
    monkeypatch: pytest.MonkeyPatch, caplog: pytest.LogCaptureFixture
) -> None:
    """Unparseable settings at import keep defaults and hand the error to the CLI."""
    monkeypatch.setenv("FREEFAM_ORDER", "abc")
    config, error = config_module._initial_config()
    assert config == FreefamConfig()
    assert isinstance(error, ValidationError)
    assert "Invalid freefam settings" in caplog.text


def test_valid_startup_settings_have_no_error(monkeypatch: pytest.MonkeyPatch) -> None:
    """Good settings load normally."""
    monkeypatch.setenv("FREEFAM_ORDER", "12")
    config, error = config_module._initial_config()
    assert config.order == 12
    assert error is None
