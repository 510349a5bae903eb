"""Bearer-token sessions. Tokens are 128-bit random hex; unknown and
expired tokens fail identically so probes learn nothing."""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass

from .errors import E_EXPIRED, ApiError


@dataclass
class Session:
    token: str
    user: str
    created_at: float
    expires_at: float


class SessionManager:
    def __init__(self, ttl_hours: float = 24.0, clock=time.time):
        self._ttl = ttl_hours * 3600.0
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def open(self, user: str) -> Session:
        now = self._clock()
        session = Session(
            token=secrets.token_hex(16),
            user=user,
            created_at=now,
            expires_at=now + self._ttl,
        )
        with self._lock:
            self._sessions[session.token] = session
        return session

    def resolve(self, token: str) -> str:
        with self._lock:
            session = self._sessions.get(token)
            if session is not None and session.expires_at <= self._clock():
                del self._sessions[token]
                session = None
        if session is None:
            raise ApiError(E_EXPIRED, "session is expired or revoked")
        return session.user

    def revoke(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)
