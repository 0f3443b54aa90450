"""Relational and logical checks over a parsed model.

Each rule has a stable code (see :data:`dflow.diagnostics.VALIDATOR_CODES`).
All findings are returned; nothing is raised.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from . import model as m
from .diagnostics import Diagnostic, error, sort_diagnostics, warning
from .text import normalize


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not any(d.is_error for d in self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]

    def to_dict(self) -> dict:
        return {"valid": self.valid, "diagnostics": [d.to_dict() for d in self.diagnostics]}


_UNDEFINED = {
    m.ConceptKind.TRIGGER: ("V002", "trigger"),
    m.ConceptKind.ESERVICE: ("V004", "eservice"),
    m.ConceptKind.FORM_SLOT: ("V005", "form slot"),
    m.ConceptKind.GSLOT: ("V006", "global slot"),
    m.ConceptKind.INTENT: ("V008", "intent"),
    m.ConceptKind.ENTITY: ("V014", "trainable entity"),
    m.ConceptKind.SYNONYM: ("V014", "synonym"),
}


def validate(model: m.Model) -> ValidationReport:
    diagnostics: list[Diagnostic] = []
    diagnostics += _duplicate_names(model)
    diagnostics += _undefined_references(model)
    diagnostics += _trigger_usage(model)
    diagnostics += _forward_reads(model)
    diagnostics += _type_mismatches(model)
    diagnostics += _examples(model)
    return ValidationReport(sort_diagnostics(diagnostics))


def _dupes(items, what: str) -> list[Diagnostic]:
    seen: set[str] = set()
    found = []
    for item in items:
        if item.name in seen:
            found.append(error("V001", f"duplicate {what} name '{item.name}'", item.span))
        seen.add(item.name)
    return found


def _duplicate_names(model: m.Model) -> list[Diagnostic]:
    found = []
    found += _dupes(model.entities, "entity")
    found += _dupes(model.synonyms, "synonym")
    found += _dupes(model.triggers, "trigger")
    found += _dupes(model.eservices, "eservice")
    found += _dupes(model.gslots, "global slot")
    found += _dupes(model.dialogues, "dialogue")
    for dialogue in model.dialogues:
        found += _dupes(dialogue.responses, f"response in dialogue '{dialogue.name}'")
        for form in dialogue.forms():
            found += _dupes(form.slots, f"slot in form '{form.name}'")
    return found


def _undefined_references(model: m.Model) -> list[Diagnostic]:
    found = []
    for ref in m.collect_references(model):
        if m.resolves(model, ref):
            continue
        code, what = _UNDEFINED[ref.kind]
        if ref.kind is m.ConceptKind.INTENT and model.trigger(ref.name) is not None:
            message = f"'{ref.name}' is an event, not an intent (used in {ref.site})"
        else:
            message = f"undeclared {what} '{ref.name}' (used in {ref.site})"
        found.append(error(code, message, ref.span))
    return found


def _trigger_usage(model: m.Model) -> list[Diagnostic]:
    found = []
    users: dict[str, list[str]] = defaultdict(list)
    for dialogue in model.dialogues:
        for i, name in enumerate(dialogue.on):
            if users[name] and dialogue.name not in users[name]:
                found.append(error(
                    "V003",
                    f"trigger '{name}' already starts dialogue '{users[name][0]}'; "
                    f"it cannot also start '{dialogue.name}'",
                    dialogue.on_span(i),
                ))
            users[name].append(dialogue.name)
    for trigger in model.triggers:
        if not users.get(trigger.name):
            found.append(warning("V011", f"trigger '{trigger.name}' is not used by any dialogue", trigger.span))
    return found


def _locate(dialogue: m.Dialogue, ref: m.FormSlotRef) -> tuple[int, int] | None:
    for r, response in enumerate(dialogue.responses):
        if isinstance(response, m.Form) and response.name == ref.form:
            for s, slot in enumerate(response.slots):
                if slot.name == ref.slot:
                    return r, s
    return None


def _forward_reads(model: m.Model) -> list[Diagnostic]:
    found = []
    for dialogue in model.dialogues:
        for site in m.iter_value_sites(dialogue):
            ref = site.expr
            if not isinstance(ref, m.FormSlotRef):
                continue
            position = _locate(dialogue, ref)
            if position is None:
                if model.find_form_slot(ref.form, ref.slot) is not None:
                    found.append(warning(
                        "V007",
                        f"'{ref.qualified}' belongs to another dialogue and may be unfilled when read in {site.site}",
                        ref.span,
                    ))
                continue
            response_index, slot_index = position
            if response_index > site.response_index:
                found.append(error(
                    "V007", f"'{ref.qualified}' is read in {site.site} before its form runs", ref.span,
                ))
            elif (
                response_index == site.response_index
                and site.slot_index is not None
                and slot_index >= site.slot_index
            ):
                found.append(error(
                    "V007", f"'{ref.qualified}' is read in {site.site} before it is filled", ref.span,
                ))
    return found


def _mismatch(lit: m.Literal, slot_type: str, what: str) -> Diagnostic | None:
    if m.literal_fits(lit.value, slot_type):
        return None
    return error("V009", f"{lit.slot_type} literal {lit.value!r} does not match {what} of type {slot_type}", lit.span)


def _type_mismatches(model: m.Model) -> list[Diagnostic]:
    found = []
    for g in model.gslots:
        if g.default is not None:
            found.append(_mismatch(g.default, g.slot_type, f"global slot '{g.name}'"))
    for dialogue in model.dialogues:
        for response in dialogue.responses:
            if isinstance(response, m.Form):
                for slot in response.slots:
                    source = slot.source
                    if isinstance(source, m.HRISource) and isinstance(source.extraction, m.FromIntent):
                        for mapping in source.extraction.mappings:
                            found.append(_mismatch(mapping.value, slot.slot_type, f"slot '{response.name}.{slot.name}'"))
                continue
            for action in response.actions:
                if isinstance(action, m.SetGSlot) and isinstance(action.value, m.Literal):
                    g = model.gslot(action.gslot)
                    if g is not None:
                        found.append(_mismatch(action.value, g.slot_type, f"global slot '{g.name}'"))
                elif isinstance(action, m.SetFSlot) and isinstance(action.value, m.Literal):
                    slot = model.find_form_slot(action.form, action.slot, prefer=dialogue)
                    if slot is not None:
                        found.append(_mismatch(action.value, slot.slot_type, f"slot '{action.form}.{action.slot}'"))
    return [d for d in found if d is not None]


def example_key(example: m.PhraseExample) -> tuple:
    """Identity of an example for duplicate detection (case/space-insensitive)."""
    key = []
    for chunk in example.chunks:
        if isinstance(chunk, m.TextChunk):
            key.append(("text", normalize(chunk.text)))
        elif isinstance(chunk, m.PretrainedEntityChunk):
            key.append(("PE", chunk.ref.category))
        elif isinstance(chunk, m.TrainableEntityChunk):
            key.append(("TE", chunk.entity))
        else:
            key.append(("S", chunk.synonym))
    return tuple(key)


def _examples(model: m.Model) -> list[Diagnostic]:
    found = []
    owners: dict[tuple, str] = {}
    for intent in model.intents:
        if not intent.examples:
            found.append(error("V010", f"intent '{intent.name}' has no phrase examples", intent.span))
        counts: Counter = Counter()
        for example in intent.examples:
            key = example_key(example)
            counts[key] += 1
            if counts[key] == 2:
                found.append(warning("V012", f"intent '{intent.name}' repeats an example", example.span))
            owner = owners.get(key)
            if owner is not None and owner != intent.name and counts[key] == 1:
                found.append(error(
                    "V013", f"example is shared by intents '{owner}' and '{intent.name}'", example.span,
                ))
            owners.setdefault(key, intent.name)
    return found


def check_source(source: str, label: str = "<input>") -> tuple[m.Model | None, ValidationReport]:
    """Parse then validate; syntax errors are reported in the same structure.

    The CLI and the REST service both answer with this report, so the two
    always agree for the same text.
    """
    from .parser import parse_with_diagnostics

    model, diagnostics = parse_with_diagnostics(source, label)
    if model is None:
        return None, ValidationReport(diagnostics)
    report = validate(model)
    return model, ValidationReport(sort_diagnostics(diagnostics + report.diagnostics))
