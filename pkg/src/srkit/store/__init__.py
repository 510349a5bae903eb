"""Admin catalog and per-project record storage."""

from .core import (
    ADMIN_SENTINEL,
    BUILTIN_ELEMENTS,
    PAPER_ELEMENT,
    ProjectStore,
)
from .errors import (
    E_CONFLICT,
    E_CONSTRAINT,
    E_DUPLICATE,
    E_ELEMENT_INACTIVE,
    E_LAST_ADMIN,
    E_NAME_TAKEN,
    E_NOT_FOUND,
    E_VERSION_STALE,
    StoreError,
)

__all__ = [
    "ADMIN_SENTINEL",
    "BUILTIN_ELEMENTS",
    "E_CONFLICT",
    "E_CONSTRAINT",
    "E_DUPLICATE",
    "E_ELEMENT_INACTIVE",
    "E_LAST_ADMIN",
    "E_NAME_TAKEN",
    "E_NOT_FOUND",
    "E_VERSION_STALE",
    "PAPER_ELEMENT",
    "ProjectStore",
    "StoreError",
]
