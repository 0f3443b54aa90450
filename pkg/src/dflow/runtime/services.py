"""Calling declared eservices, either live over HTTP or against a stub table."""

from __future__ import annotations

import fnmatch
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol
from urllib.parse import quote, urlencode

import httpx

from .. import model as m

DEFAULT_TIMEOUT = 10.0


class ServiceError(Exception):
    """Base class; every service failure carries the composed URL."""

    kind = "service"

    def __init__(self, message: str, url: str) -> None:
        self.url = url
        super().__init__(f"{message} ({url})")


class NetworkError(ServiceError):
    kind = "network"


class StatusError(ServiceError):
    kind = "status"

    def __init__(self, status: int, url: str) -> None:
        self.status = status
        super().__init__(f"service answered with status {status}", url)


class MissingKeyError(ServiceError):
    kind = "missing_key"

    def __init__(self, key: str, path: str, url: str) -> None:
        self.key = key
        super().__init__(f"response has no key '{key}' (path '{path}')", url)


class CoercionError(ServiceError):
    kind = "coercion"


@dataclass(frozen=True)
class Request:
    verb: str
    url: str
    headers: dict[str, str] = field(default_factory=dict)
    body: dict[str, Any] | None = None


@dataclass(frozen=True)
class Response:
    status: int
    body: Any


class ServiceEnv(Protocol):
    def send(self, request: Request) -> Response: ...


def compose_url(service: m.EServiceHTTP, path_params: dict[str, Any] | None = None,
                query: dict[str, Any] | None = None) -> str:
    """host[:port] + path, with path parameters substituted into ``{name}``
    placeholders (or appended as extra segments) and the query string added."""
    base = service.host.rstrip("/")
    if service.port is not None:
        base += f":{service.port}"
    path = service.path
    if path and not path.startswith("/"):
        path = "/" + path
    for key, value in (path_params or {}).items():
        placeholder = "{" + key + "}"
        segment = quote(str(value), safe="")
        if placeholder in path:
            path = path.replace(placeholder, segment)
        else:
            path = path.rstrip("/") + "/" + segment
    url = base + path
    if query:
        url += "?" + urlencode({k: _scalar(v) for k, v in query.items()})
    return url


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def extract_path(document: Any, path: str | None, url: str) -> Any:
    if not path:
        return document
    value = document
    for key in path.split("."):
        if isinstance(value, dict) and key in value:
            value = value[key]
        else:
            raise MissingKeyError(key, path, url)
    return value


def coerce(value: Any, slot_type: str) -> Any:
    """Convert *value* to a slot type; raises ValueError when impossible."""
    if slot_type == "str":
        if isinstance(value, str):
            return value
        if isinstance(value, (dict, list)):
            return json.dumps(value, sort_keys=True)
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)
    if slot_type == "bool":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("true", "yes", "y", "1"):
            return True
        if text in ("false", "no", "n", "0"):
            return False
        raise ValueError(f"cannot read {value!r} as a yes/no value")
    if isinstance(value, bool) or isinstance(value, (dict, list)) or value is None:
        raise ValueError(f"cannot read {value!r} as {slot_type}")
    if slot_type == "int":
        if isinstance(value, int):
            return value
        if isinstance(value, float):
            if value.is_integer():
                return int(value)
            raise ValueError(f"cannot read {value!r} as a whole number")
        try:
            return int(str(value).strip())
        except ValueError:
            raise ValueError(f"cannot read {value!r} as a whole number") from None
    try:
        return float(str(value).strip()) if not isinstance(value, (int, float)) else float(value)
    except ValueError:
        raise ValueError(f"cannot read {value!r} as a number") from None


@dataclass(frozen=True)
class Stub:
    verb: str
    url_pattern: str
    status: int = 200
    body: Any = None

    def matches(self, request: Request) -> bool:
        if self.verb.upper() != request.verb:
            return False
        url = request.url
        if self.url_pattern.endswith("*"):
            return url.startswith(self.url_pattern[:-1])
        return url == self.url_pattern or url.split("?", 1)[0] == self.url_pattern


class StubTable:
    """Answers requests from a fixed list of stubs (first match wins)."""

    def __init__(self, stubs: list[Stub]) -> None:
        self.stubs = list(stubs)

    @classmethod
    def from_json(cls, data: list[dict]) -> StubTable:
        return cls([
            Stub(d["verb"], d["url_pattern"], int(d.get("status", 200)), d.get("body"))
            for d in data
        ])

    @classmethod
    def load(cls, path: str | Path) -> StubTable:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def send(self, request: Request) -> Response:
        for stub in self.stubs:
            if stub.matches(request):
                return Response(stub.status, stub.body)
        raise NetworkError("no stub matches the request", request.url)


class HttpEnv:
    """Live HTTP access with a per-call timeout."""

    def __init__(self, timeout: float = DEFAULT_TIMEOUT) -> None:
        self.timeout = timeout

    def send(self, request: Request) -> Response:
        try:
            resp = httpx.request(
                request.verb, request.url, headers=request.headers, json=request.body, timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc) or type(exc).__name__, request.url) from exc
        try:
            body = resp.json()
        except ValueError:
            body = resp.text
        return Response(resp.status_code, body)
