"""Service startup configuration: TOML file plus environment overrides.

Precedence, lowest to highest: dataclass defaults, config file,
SRKIT_* environment variables, command-line flags (applied by the
server entry point).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # 3.10 and older
    import tomli as tomllib


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str | None = None  # None keeps everything in memory
    session_ttl_hours: float = 24.0
    credential_cost: int = 14  # scrypt cost exponent
    static_dir: str | None = None  # built web assets, served at /
    bootstrap_admin: str | None = None
    bootstrap_credential: str | None = None


_FILE_KEYS = {
    "host": str,
    "port": int,
    "data_dir": str,
    "session_ttl_hours": float,
    "credential_cost": int,
    "static_dir": str,
    "bootstrap_admin": str,
    "bootstrap_credential": str,
}


def load_config(path: str | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    cfg = ServiceConfig()
    if path is not None:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        for key, cast in _FILE_KEYS.items():
            if key in doc:
                setattr(cfg, key, cast(doc[key]))
    for key, cast in _FILE_KEYS.items():
        raw = env.get("SRKIT_" + key.upper())
        if raw is not None:
            setattr(cfg, key, cast(raw))
    return cfg
