"""The REST service and its model store."""

from __future__ import annotations

from .app import create_app
from .store import ModelStore, StoredModel

__all__ = ["ModelStore", "StoredModel", "create_app"]
