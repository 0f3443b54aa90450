"""Merging several users' models into one model holding every dialogue flow."""

from __future__ import annotations

from dataclasses import dataclass

from . import model as m
from .diagnostics import NO_SPAN, Diagnostic, SourceSpan, error
from .validator import validate


@dataclass(frozen=True)
class MergeConflict:
    name: str
    kind: str
    first_span: SourceSpan | None
    second_span: SourceSpan | None
    reason: str = "declared twice with different definitions"

    def message(self) -> str:
        return f"{self.kind} '{self.name}' {self.reason}"

    def to_diagnostic(self) -> Diagnostic:
        return error("M001", self.message(), self.second_span or self.first_span or NO_SPAN)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "reason": self.reason,
            "first_span": self.first_span.to_dict() if self.first_span else None,
            "second_span": self.second_span.to_dict() if self.second_span else None,
        }


class MergeError(Exception):
    def __init__(self, conflicts: list[MergeConflict]) -> None:
        self.conflicts = conflicts
        super().__init__("; ".join(c.message() for c in conflicts))


_KINDS = {
    "entities": "entity",
    "synonyms": "synonym",
    "triggers": "trigger",
    "eservices": "eservice",
    "gslots": "gslot",
    "dialogues": "dialogue",
}


def merge(models: list[m.Model]) -> m.Model:
    """Concatenate concept lists in input order, collapsing exact duplicates.

    Raises :class:`MergeError` with every conflict when two elements share a
    name but differ, or when the combined model would not validate (for
    instance two dialogues started by the same trigger).
    """
    conflicts: list[MergeConflict] = []
    merged: dict[str, list] = {}
    for concept, kind in _KINDS.items():
        kept: dict[str, object] = {}
        for model in models:
            for item in getattr(model, concept):
                previous = kept.get(item.name)
                if previous is None:
                    kept[item.name] = item
                elif previous != item:
                    conflicts.append(MergeConflict(item.name, kind, previous.span, item.span))
        merged[concept] = list(kept.values())
    if conflicts:
        raise MergeError(conflicts)

    result = m.Model(**{k: tuple(v) for k, v in merged.items()})
    report = validate(result)
    if not report.valid:
        raise MergeError([_from_diagnostic(result, d) for d in report.errors])
    return result


def _from_diagnostic(model: m.Model, diagnostic: Diagnostic) -> MergeConflict:
    if diagnostic.code == "V003":
        name = diagnostic.message.split("'")[1]
        first = model.dialogue_for(name)
        return MergeConflict(
            name, "trigger", first.span if first else None, diagnostic.span,
            "starts dialogues from more than one model",
        )
    return MergeConflict(
        diagnostic.code, "validation", None, diagnostic.span, f"merged model is invalid: {diagnostic.message}",
    )
