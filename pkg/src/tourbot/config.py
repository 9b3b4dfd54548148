"""Runtime configuration: defaults, optional JSON file, environment overrides.

Precedence, lowest to highest: built-in defaults, config file, TOURBOT_*
environment variables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .sim import SimConfig

DEFAULT_STORE_PATH = "./data/store.json"

# env var name -> (config field, parser)
_ENV_FIELDS = {
    "TOURBOT_HTTP_PORT": ("http_port", int),
    "TOURBOT_BRIDGE_PORT": ("bridge_port", int),
    "TOURBOT_HOST": ("host", str),
    "TOURBOT_STORE_PATH": ("store_path", str),
    "TOURBOT_STATIC_DIR": ("static_dir", str),
    "TOURBOT_CORS_ORIGINS": ("cors_origins", lambda v: tuple(p for p in v.split(",") if p)),
    "TOURBOT_TIME_SCALE": ("time_scale", float),
}

_SIM_KEYS = ("v_max", "omega_max", "tick", "arrive_dist", "arrive_angle", "speech_rate")


@dataclass(frozen=True)
class AppConfig:
    http_port: int = 8080
    bridge_port: int = 9090
    host: str = "127.0.0.1"
    store_path: str = DEFAULT_STORE_PATH
    static_dir: Optional[str] = None
    cors_origins: tuple[str, ...] = (
        "http://localhost:8080",
        "http://localhost:5173",
        "http://127.0.0.1:8080",
        "http://127.0.0.1:5173",
    )
    # Wall seconds per simulated tick are tick / time_scale; 1.0 = real time.
    time_scale: float = 1.0
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        for name in ("http_port", "bridge_port"):
            port = getattr(self, name)
            if not isinstance(port, int) or isinstance(port, bool) or not 0 < port < 65536:
                raise ValidationError(f"{name} must be a port number (1-65535)")
        if not isinstance(self.time_scale, (int, float)) or self.time_scale <= 0:
            raise ValidationError("time_scale must be a positive number")


def _apply_file(cfg: AppConfig, path: Path) -> AppConfig:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"config file {path} is not valid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must contain a JSON object")
    known = {f.name for f in fields(AppConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    changes = {}
    for key, value in data.items():
        if key == "sim":
            if not isinstance(value, dict) or set(value) - set(_SIM_KEYS):
                raise ValidationError(f"config sim block allows keys: {', '.join(_SIM_KEYS)}")
            changes["sim"] = replace(cfg.sim, **value)
        elif key == "cors_origins":
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ValidationError("cors_origins must be a list of strings")
            changes["cors_origins"] = tuple(value)
        else:
            changes[key] = value
    return replace(cfg, **changes)


def _apply_env(cfg: AppConfig, env) -> AppConfig:
    changes = {}
    for var, (name, parse) in _ENV_FIELDS.items():
        if var in env:
            try:
                changes[name] = parse(env[var])
            except ValueError as exc:
                raise ValidationError(f"bad value for {var}: {env[var]!r}") from exc
    sim_changes = {}
    for key in _SIM_KEYS:
        var = f"TOURBOT_SIM_{key.upper()}"
        if var in env:
            try:
                sim_changes[key] = float(env[var])
            except ValueError as exc:
                raise ValidationError(f"bad value for {var}: {env[var]!r}") from exc
    if sim_changes:
        changes["sim"] = replace(cfg.sim, **sim_changes)
    return replace(cfg, **changes) if changes else cfg


def load_config(path: Optional[str] = None, env=None) -> AppConfig:
    """Build the effective configuration; ``path`` optional, env overrides."""
    cfg = AppConfig()
    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ValidationError(f"config file not found: {file_path}")
        cfg = _apply_file(cfg, file_path)
    cfg = _apply_env(cfg, os.environ if env is None else env)
    return cfg
