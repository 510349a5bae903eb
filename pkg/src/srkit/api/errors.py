"""Error envelope: every failure leaves the service as
{"error": {"code", "message", "details"}} with a mapped HTTP status."""

from __future__ import annotations

E_BAD_CREDENTIALS = "E_BAD_CREDENTIALS"
E_EXPIRED = "E_EXPIRED"
E_UNKNOWN_ENTITY = "E_UNKNOWN_ENTITY"
E_UNKNOWN_OP = "E_UNKNOWN_OP"
E_NAME_MISMATCH = "E_NAME_MISMATCH"

_STATUS = {
    E_BAD_CREDENTIALS: 401,
    E_EXPIRED: 401,
    "E_FORBIDDEN": 403,
    "E_LAST_ADMIN": 403,
    "E_NOT_ASSIGNED": 403,
    "E_NOT_FOUND": 404,
    E_UNKNOWN_ENTITY: 404,
    E_UNKNOWN_OP: 404,
    "E_NAME_TAKEN": 409,
    "E_DUPLICATE": 409,
    "E_DUPLICATE_CHOICE": 409,
    "E_VERSION_STALE": 409,
    "E_VERSION_CONFLICT": 409,
    "E_STALE_SCHEMA": 409,
    "E_ILLEGAL_DROP": 409,
    "E_CONFLICT": 409,
    "E_PHASE_CLOSED": 409,
    "E_MANUAL_MODE": 409,
    E_NAME_MISMATCH: 409,
}


def status_for(code: str) -> int:
    # Everything unmapped is a request that names real resources but
    # fails domain validation.
    return _STATUS.get(code, 422)


class ApiError(Exception):
    def __init__(self, code: str, message: str, details: list | None = None):
        self.code = code
        self.details = details or []
        super().__init__(message)

    @property
    def status(self) -> int:
        return status_for(self.code)

    def envelope(self) -> dict:
        return {
            "error": {
                "code": self.code,
                "message": str(self),
                "details": self.details,
            }
        }
