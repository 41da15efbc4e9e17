# utils/config.py
import os
import json
from dataclasses import dataclass, field, fields, asdict
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from evodg.exceptions import ConfigError

load_dotenv()

# RunConfig field -> environment variable
ENV_KEYS = {
    "problem": "EVODG_PROBLEM",
    "p": "EVODG_P",
    "q": "EVODG_Q",
    "rho": "EVODG_RHO",
    "T": "EVODG_T",
    "jobs": "EVODG_JOBS",
    "seed": "EVODG_SEED",
    "log_level": "EVODG_LOG_LEVEL",
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class RunConfig:
    problem: str = "prob1"
    p: int = 2
    q: int = 1
    N: Optional[int] = None
    M: Optional[int] = None
    rho: float = 1.0
    T: float = 1.0
    sweep: Optional[List[int]] = None
    jobs: int = 1
    out: Optional[str] = None
    seed: int = 42
    a: float = 0.0
    rate_matrix: bool = False
    degrees: int = 5
    trials: int = 1000
    log_level: str = "WARNING"

    def validate(self, min_q: int = 1) -> "RunConfig":
        if self.p < 1:
            raise ConfigError(f"p must be >= 1, got p={self.p}.")
        if not min_q <= self.q <= 10:
            raise ConfigError(f"q must lie in [{min_q}, 10], got q={self.q}.")
        if not self.rho > 0.0:
            raise ConfigError(f"rho must be positive, got rho={self.rho}.")
        if not self.T > 0.0:
            raise ConfigError(f"T must be positive, got T={self.T}.")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got jobs={self.jobs}.")
        if self.N is not None and self.N < 1:
            raise ConfigError(f"N must be positive, got N={self.N}.")
        if self.M is not None and self.M < 1:
            raise ConfigError(f"M must be positive, got M={self.M}.")
        if self.sweep is not None and (not self.sweep or min(self.sweep) < 1):
            raise ConfigError(f"sweep must list positive cell counts, got sweep={self.sweep}.")
        if not 0.0 <= self.a <= 50.0:
            raise ConfigError(f"a must lie in [0, 50], got a={self.a}.")
        if self.degrees < 1:
            raise ConfigError(f"degrees must be >= 1, got degrees={self.degrees}.")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got trials={self.trials}.")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level!r}.")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_sweep(value) -> List[int]:
    if isinstance(value, str):
        value = [v for v in value.replace(";", ",").split(",") if v.strip()]
    return [int(v) for v in value]


def _parse_bool(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def _coerce(key: str, value):
    """Casts a raw value (env string, JSON scalar, flag) to the type of the RunConfig field."""
    if value is None:
        return None
    kind = _FIELD_TYPES[key]
    try:
        if key == "sweep":
            return _parse_sweep(value)
        if kind is bool:
            return _parse_bool(value)
        if kind in (int, Optional[int]):
            number = float(value)
            if number != int(number):
                raise ValueError
            return int(number)
        if kind is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for '{key}': {value!r}.")


def env_defaults() -> Dict[str, Any]:
    values = {}
    for key, env_name in ENV_KEYS.items():
        raw = os.getenv(env_name)
        if raw not in (None, ""):
            values[key] = _coerce(key, raw)
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    """Flat JSON object whose keys are flag names (dashes or underscores)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object.")

    values = {}
    for raw_key, value in data.items():
        key = raw_key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"Unknown key '{raw_key}' in config file {path}.")
        values[key] = _coerce(key, value)
    return values


def build_config(flags: Optional[Dict[str, Any]] = None, config_path: Optional[str] = None) -> RunConfig:
    """Defaults < EVODG_* environment < JSON config file < command-line flags."""
    merged: Dict[str, Any] = {}
    merged.update(env_defaults())
    if config_path:
        merged.update(load_config_file(config_path))
    for key, value in (flags or {}).items():
        if value is not None and key in _FIELD_TYPES:
            merged[key] = _coerce(key, value)
    return RunConfig(**merged)
