"""Match sessions: player records, match running, feedback, opponent
requests, persistence, and the HTTP/WebSocket service."""

from .playing_data import (
    MatchRecord,
    OpponentInfo,
    PlayingData,
    new_playing_data,
    update_playing_data,
)
from .session import (
    DISCONNECT_GRACE_SECONDS,
    MAX_FEEDBACK_CHARS,
    PHASES,
    GameManager,
    ManagerError,
    MatchDriver,
    SessionState,
    recompute_from_replay,
)
from .store import SCHEMA_VERSION, SessionStore, StoreError

__all__ = [
    "MatchRecord",
    "OpponentInfo",
    "PlayingData",
    "new_playing_data",
    "update_playing_data",
    "DISCONNECT_GRACE_SECONDS",
    "MAX_FEEDBACK_CHARS",
    "PHASES",
    "GameManager",
    "ManagerError",
    "MatchDriver",
    "SessionState",
    "recompute_from_replay",
    "SCHEMA_VERSION",
    "SessionStore",
    "StoreError",
]
