"""HTTP service over the store, installer, and review engine."""

from .app import create_app
from .auth import Session, SessionManager
from .config import ServiceConfig, load_config
from .errors import (
    E_BAD_CREDENTIALS,
    E_EXPIRED,
    E_NAME_MISMATCH,
    E_UNKNOWN_ENTITY,
    E_UNKNOWN_OP,
    ApiError,
    status_for,
)

__all__ = [
    "ApiError",
    "E_BAD_CREDENTIALS",
    "E_EXPIRED",
    "E_NAME_MISMATCH",
    "E_UNKNOWN_ENTITY",
    "E_UNKNOWN_OP",
    "Session",
    "SessionManager",
    "ServiceConfig",
    "create_app",
    "load_config",
    "status_for",
]
