"""dflow: a textual DSL for task-based dialogue agents.

The package parses ``.dflow`` models, validates them, merges models written by
different users, generates Rasa projects and executes dialogues directly.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, Severity, SourceSpan
from .merger import MergeConflict, MergeError, merge
from .model import Model, model_equals
from .parser import DFlowSyntaxError, parse, parse_with_diagnostics
from .printer import print_model
from .lexer import line_count
from .validator import ValidationReport, validate

__all__ = [
    "DFlowSyntaxError",
    "Diagnostic",
    "MergeConflict",
    "MergeError",
    "Model",
    "Severity",
    "SourceSpan",
    "ValidationReport",
    "line_count",
    "merge",
    "model_equals",
    "parse",
    "parse_with_diagnostics",
    "print_model",
    "validate",
]

__version__ = "0.1.0"
