"""Configuration loading and defaults."""

import json
import logging
import os
from pathlib import Path
from typing import Annotated, Any

from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path.home() / ".config" / "freefam"


class FreefamConfig(BaseModel):
    """Global numerical configuration."""

    order: Annotated[int, Field(ge=4)] = 16  # FREEFAM_ORDER
    quad_nodes: Annotated[int, Field(ge=64)] = 2000  # FREEFAM_QUAD_NODES
    quad_panel: Annotated[int, Field(ge=2)] = 20  # Gauss nodes per composite panel
    tol: Annotated[float, Field(gt=0)] = 1e-10  # FREEFAM_TOL
    hankel_tol: Annotated[float, Field(gt=0)] = 1e-9
    max_degree: Annotated[int, Field(ge=0)] = 8
    max_moment: Annotated[int, Field(ge=1)] = 16
    nc_limit: Annotated[int, Field(ge=1)] = 14
    z_samples: Annotated[int, Field(ge=2)] = 64
    z_window: Annotated[float, Field(gt=0)] = 0.1  # fraction of sqrt(V*(0))
    theta_window: Annotated[float, Field(gt=0, le=1)] = 0.5  # fraction of 1/support radius
    mp_window: Annotated[float, Field(gt=0, le=1)] = 0.9  # fraction of sqrt(V(m0))
    density_points: Annotated[int, Field(ge=2)] = 201


def _load_dotenv_files() -> None:
    """Load .env files into the environment.

    Variables already set are kept; ~/.config/freefam/.env wins over ./.env.
    """
    from dotenv import load_dotenv

    config_env = CONFIG_DIR / ".env"
    if config_env.exists():
        load_dotenv(config_env, override=False)

    cwd_env = Path.cwd() / ".env"
    if cwd_env.exists():
        load_dotenv(cwd_env, override=False)


def load_config() -> FreefamConfig:
    """Load config from file and environment."""

    _load_dotenv_files()

    config_path = CONFIG_DIR / "config.json"

    data: dict[str, Any] = {}
    if config_path.exists():
        try:
            data = json.loads(config_path.read_text())
        except json.JSONDecodeError as e:
            logger.warning("Ignoring malformed config file %s: %s", config_path, e)

    # Environment overrides
    if order := os.environ.get("FREEFAM_ORDER"):
        data["order"] = order

    if quad_nodes := os.environ.get("FREEFAM_QUAD_NODES"):
        data["quad_nodes"] = quad_nodes

    if tol := os.environ.get("FREEFAM_TOL"):
        data["tol"] = tol

    return FreefamConfig(**data)


def _initial_config() -> tuple[FreefamConfig, ValidationError | None]:
    """The startup config, or defaults plus the error when the settings do not validate."""
    try:
        return load_config(), None
    except ValidationError as e:
        logger.warning("Invalid freefam settings, falling back to defaults: %s", e)
        return FreefamConfig(), e


# Global config (loaded once); the CLI refuses to run while CONFIG_ERROR is set
CONFIG, CONFIG_ERROR = _initial_config()
