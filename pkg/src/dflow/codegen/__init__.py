"""Generation of runnable Rasa projects from validated models."""

from __future__ import annotations

from .project import PROJECT_FILES, GeneratedProject, OverwriteRefused, write_project
from .rasa import InvalidModelError, generate

__all__ = ["PROJECT_FILES", "GeneratedProject", "InvalidModelError", "OverwriteRefused", "generate", "write_project"]
