"""Store error codes."""

from __future__ import annotations

E_NAME_TAKEN = "E_NAME_TAKEN"
E_NOT_FOUND = "E_NOT_FOUND"
E_ELEMENT_INACTIVE = "E_ELEMENT_INACTIVE"
E_VERSION_STALE = "E_VERSION_STALE"
E_CONFLICT = "E_CONFLICT"
E_DUPLICATE = "E_DUPLICATE"
E_CONSTRAINT = "E_CONSTRAINT"
E_LAST_ADMIN = "E_LAST_ADMIN"


class StoreError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)
