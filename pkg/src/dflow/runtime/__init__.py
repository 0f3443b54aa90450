"""In-process execution of dialogue models."""

from __future__ import annotations

from .matching import Captured, MatchResult, find_entities, match_trigger
from .services import (
    CoercionError,
    HttpEnv,
    MissingKeyError,
    NetworkError,
    Request,
    Response,
    ServiceError,
    StatusError,
    Stub,
    StubTable,
    compose_url,
    extract_path,
)
from .session import (
    DEFAULT_FALLBACK,
    SERVICE_APOLOGY,
    BotReply,
    DialogueSession,
    ErrorNote,
    EventFired,
    Say,
    ServiceInvoked,
    UserProfile,
    invoke,
)

__all__ = [
    "BotReply",
    "Captured",
    "CoercionError",
    "DEFAULT_FALLBACK",
    "DialogueSession",
    "ErrorNote",
    "EventFired",
    "HttpEnv",
    "MatchResult",
    "MissingKeyError",
    "NetworkError",
    "Request",
    "Response",
    "SERVICE_APOLOGY",
    "Say",
    "ServiceError",
    "ServiceInvoked",
    "StatusError",
    "Stub",
    "StubTable",
    "UserProfile",
    "compose_url",
    "extract_path",
    "find_entities",
    "invoke",
    "match_trigger",
]
