"""The dFlow meta-model as an immutable object graph.

Every element carries an optional source span which is excluded from
equality, so two models compare equal when their structure matches no matter
where (or whether) they were parsed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from .diagnostics import SourceSpan

PRETRAINED_CATEGORIES = (
    "PERSON", "GPE", "DATE", "TIME", "ORG", "LOC",
    "PRODUCT", "MONEY", "CARDINAL", "ORDINAL", "PERCENT", "EMAIL",
)
SLOT_TYPES = ("str", "int", "float", "bool")
HTTP_VERBS = ("GET", "POST", "PUT", "DELETE")
USER_PROPERTIES = ("NAME", "SURNAME", "AGE", "EMAIL", "PHONE", "CITY", "ADDRESS")
SYSTEM_PROPERTIES = ("TIME", "LOCATION", "RANDOM_INT", "RANDOM_FLOAT")
PARAM_GROUPS = ("query", "path", "header", "body")


def _span() -> SourceSpan | None:
    return field(default=None, compare=False, repr=False)


class ConceptKind(str, Enum):
    ENTITY = "entity"
    SYNONYM = "synonym"
    TRIGGER = "trigger"
    INTENT = "intent"
    ESERVICE = "eservice"
    GSLOT = "gslot"
    DIALOGUE = "dialogue"
    FORM_SLOT = "form_slot"


# --- values -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Literal:
    """A typed constant. Equality is type-aware, so ``True != 1 != 1.0``."""

    value: str | int | float | bool
    span: SourceSpan | None = _span()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Literal)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((type(self.value).__name__, self.value))

    @property
    def slot_type(self) -> str:
        return literal_type(self.value)


def literal_type(value: object) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    return "str"


def literal_fits(value: object, slot_type: str) -> bool:
    actual = literal_type(value)
    # An int literal is acceptable where a float is expected.
    return actual == slot_type or (slot_type == "float" and actual == "int")


@dataclass(frozen=True)
class FormSlotRef:
    form: str
    slot: str
    span: SourceSpan | None = _span()

    @property
    def qualified(self) -> str:
        return f"{self.form}.{self.slot}"


@dataclass(frozen=True)
class GSlotRef:
    name: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class UserProperty:
    name: str
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.name not in USER_PROPERTIES:
            raise ValueError(f"unknown user property {self.name!r}")


@dataclass(frozen=True)
class SystemProperty:
    name: str
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.name not in SYSTEM_PROPERTIES:
            raise ValueError(f"unknown system property {self.name!r}")


ValueExpr = Union[Literal, FormSlotRef, GSlotRef, UserProperty, SystemProperty]


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ExprPart:
    expr: ValueExpr


@dataclass(frozen=True)
class TemplateString:
    parts: tuple[TextPart | ExprPart, ...]

    def exprs(self) -> Iterator[ValueExpr]:
        for part in self.parts:
            if isinstance(part, ExprPart):
                yield part.expr


# --- NLU concepts ------------------------------------------------------------


@dataclass(frozen=True)
class TrainableEntity:
    name: str
    examples: tuple[str, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class PretrainedEntityRef:
    category: str
    sample_values: tuple[str, ...] = ()
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.category not in PRETRAINED_CATEGORIES:
            raise ValueError(f"unknown pre-trained entity category {self.category!r}")


@dataclass(frozen=True)
class Synonym:
    name: str
    words: tuple[str, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class TextChunk:
    text: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class PretrainedEntityChunk:
    ref: PretrainedEntityRef
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class TrainableEntityChunk:
    entity: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SynonymChunk:
    synonym: str
    span: SourceSpan | None = _span()


Chunk = Union[TextChunk, PretrainedEntityChunk, TrainableEntityChunk, SynonymChunk]


@dataclass(frozen=True)
class PhraseExample:
    chunks: tuple[Chunk, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Intent:
    name: str
    examples: tuple[PhraseExample, ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Event:
    name: str
    uri: str
    span: SourceSpan | None = _span()


Trigger = Union[Intent, Event]


# --- services and slots ----------------------------------------------------------


@dataclass(frozen=True)
class EServiceHTTP:
    name: str
    verb: str
    host: str
    path: str = ""
    port: int | None = None
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.verb not in HTTP_VERBS:
            raise ValueError(f"unknown HTTP verb {self.verb!r}")
        if self.port is not None and not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} out of range")


@dataclass(frozen=True)
class GSlot:
    name: str
    slot_type: str
    default: Literal | None = None
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.slot_type not in SLOT_TYPES:
            raise ValueError(f"unknown slot type {self.slot_type!r}")


Params = tuple[tuple[str, ValueExpr], ...]


@dataclass(frozen=True)
class ServiceCall:
    service: str
    query: Params = ()
    path: Params = ()
    header: Params = ()
    body: Params = ()
    response_path: str | None = None
    span: SourceSpan | None = _span()

    def param_groups(self) -> Iterator[tuple[str, Params]]:
        for group in PARAM_GROUPS:
            yield group, getattr(self, group)

    def values(self) -> Iterator[ValueExpr]:
        for _, params in self.param_groups():
            for _, value in params:
                yield value

    def without_response_path(self) -> ServiceCall:
        return ServiceCall(self.service, self.query, self.path, self.header, self.body, None)


@dataclass(frozen=True)
class FromText:
    pass


@dataclass(frozen=True)
class FromEntity:
    entity: PretrainedEntityRef | TrainableEntityChunk


@dataclass(frozen=True)
class IntentValue:
    intent: str
    value: Literal
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class FromIntent:
    mappings: tuple[IntentValue, ...]


Extraction = Union[FromText, FromEntity, FromIntent]


@dataclass(frozen=True)
class HRISource:
    ask: TemplateString
    extraction: Extraction = FromText()


@dataclass(frozen=True)
class EServiceSource:
    call: ServiceCall


@dataclass(frozen=True)
class FormSlot:
    name: str
    slot_type: str
    source: HRISource | EServiceSource
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.slot_type not in SLOT_TYPES:
            raise ValueError(f"unknown slot type {self.slot_type!r}")


@dataclass(frozen=True)
class Form:
    name: str
    slots: tuple[FormSlot, ...]
    span: SourceSpan | None = _span()

    def slot(self, name: str) -> FormSlot | None:
        return next((s for s in self.slots if s.name == name), None)


# --- actions and dialogues --------------------------------------------------------


@dataclass(frozen=True)
class SpeakAction:
    text: TemplateString
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class FireEventAction:
    uri: ValueExpr
    message: ValueExpr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RESTCallAction:
    call: ServiceCall
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SetGSlot:
    gslot: str
    value: ValueExpr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SetFSlot:
    form: str
    slot: str
    value: ValueExpr
    span: SourceSpan | None = _span()


Action = Union[SpeakAction, FireEventAction, RESTCallAction, SetGSlot, SetFSlot]


@dataclass(frozen=True)
class ActionGroup:
    name: str
    actions: tuple[Action, ...]
    span: SourceSpan | None = _span()


Response = Union[Form, ActionGroup]


@dataclass(frozen=True)
class Dialogue:
    name: str
    on: tuple[str, ...]
    responses: tuple[Response, ...]
    span: SourceSpan | None = _span()
    on_spans: tuple[SourceSpan, ...] = field(default=(), compare=False, repr=False)

    def on_span(self, index: int) -> SourceSpan | None:
        return self.on_spans[index] if index < len(self.on_spans) else self.span

    def forms(self) -> Iterator[Form]:
        for response in self.responses:
            if isinstance(response, Form):
                yield response


@dataclass(frozen=True)
class Model:
    entities: tuple[TrainableEntity, ...] = ()
    synonyms: tuple[Synonym, ...] = ()
    triggers: tuple[Trigger, ...] = ()
    eservices: tuple[EServiceHTTP, ...] = ()
    gslots: tuple[GSlot, ...] = ()
    dialogues: tuple[Dialogue, ...] = ()

    CONCEPTS = ("entities", "synonyms", "triggers", "eservices", "gslots", "dialogues")

    def is_empty(self) -> bool:
        return not any(getattr(self, c) for c in self.CONCEPTS)

    @property
    def intents(self) -> tuple[Intent, ...]:
        return tuple(t for t in self.triggers if isinstance(t, Intent))

    @property
    def events(self) -> tuple[Event, ...]:
        return tuple(t for t in self.triggers if isinstance(t, Event))

    def trigger(self, name: str) -> Trigger | None:
        return next((t for t in self.triggers if t.name == name), None)

    def eservice(self, name: str) -> EServiceHTTP | None:
        return next((s for s in self.eservices if s.name == name), None)

    def gslot(self, name: str) -> GSlot | None:
        return next((g for g in self.gslots if g.name == name), None)

    def entity(self, name: str) -> TrainableEntity | None:
        return next((e for e in self.entities if e.name == name), None)

    def synonym(self, name: str) -> Synonym | None:
        return next((s for s in self.synonyms if s.name == name), None)

    def dialogue_for(self, trigger: str) -> Dialogue | None:
        return next((d for d in self.dialogues if trigger in d.on), None)

    def find_form_slot(self, form: str, slot: str, prefer: Dialogue | None = None) -> FormSlot | None:
        """Resolve ``form.slot``, looking in *prefer* first, then every dialogue."""
        dialogues = ([prefer] if prefer is not None else []) + list(self.dialogues)
        for dialogue in dialogues:
            for f in dialogue.forms():
                if f.name == form:
                    found = f.slot(slot)
                    if found is not None:
                        return found
        return None


def model_equals(a: Model, b: Model) -> bool:
    """Structural equality; spans are ignored and list order matters."""
    return a == b


# --- traversal ------------------------------------------------------------------


@dataclass(frozen=True)
class ValueSite:
    """Where a value expression is read inside a dialogue.

    ``slot_index`` is set when the read happens while filling a form slot
    (its ask text or service parameters); it is the index of that slot.
    """

    site: str
    expr: ValueExpr
    dialogue: Dialogue
    response_index: int
    form: str | None = None
    slot_index: int | None = None


def _expr_sites(site: str, exprs, dialogue: Dialogue, index: int, form=None, slot_index=None):
    for expr in exprs:
        yield ValueSite(site, expr, dialogue, index, form, slot_index)


def iter_value_sites(dialogue: Dialogue) -> Iterator[ValueSite]:
    """Yield every value expression read by *dialogue* in execution order."""
    for index, response in enumerate(dialogue.responses):
        if isinstance(response, Form):
            for slot_index, slot in enumerate(response.slots):
                site = f"{dialogue.name}.{response.name}.{slot.name}"
                if isinstance(slot.source, HRISource):
                    exprs = slot.source.ask.exprs()
                else:
                    exprs = slot.source.call.values()
                yield from _expr_sites(site, exprs, dialogue, index, response.name, slot_index)
        else:
            for action_index, action in enumerate(response.actions):
                site = f"{dialogue.name}.{response.name}[{action_index}]"
                if isinstance(action, SpeakAction):
                    exprs = list(action.text.exprs())
                elif isinstance(action, FireEventAction):
                    exprs = [action.uri, action.message]
                elif isinstance(action, RESTCallAction):
                    exprs = list(action.call.values())
                else:
                    exprs = [action.value]
                yield from _expr_sites(site, exprs, dialogue, index)


def iter_service_calls(dialogue: Dialogue) -> Iterator[tuple[str, ServiceCall]]:
    for response in dialogue.responses:
        if isinstance(response, Form):
            for slot in response.slots:
                if isinstance(slot.source, EServiceSource):
                    yield f"{dialogue.name}.{response.name}.{slot.name}", slot.source.call
        else:
            for i, action in enumerate(response.actions):
                if isinstance(action, RESTCallAction):
                    yield f"{dialogue.name}.{response.name}[{i}]", action.call


@dataclass(frozen=True)
class Reference:
    site: str
    name: str
    kind: ConceptKind
    span: SourceSpan | None = field(default=None, compare=False)


def collect_references(model: Model) -> list[Reference]:
    """Every name occurrence in the model, resolved or not, in source order."""
    refs: list[Reference] = []
    for intent in model.intents:
        for i, example in enumerate(intent.examples):
            site = f"{intent.name}.examples[{i}]"
            for chunk in example.chunks:
                if isinstance(chunk, TrainableEntityChunk):
                    refs.append(Reference(site, chunk.entity, ConceptKind.ENTITY, chunk.span))
                elif isinstance(chunk, SynonymChunk):
                    refs.append(Reference(site, chunk.synonym, ConceptKind.SYNONYM, chunk.span))
    for dialogue in model.dialogues:
        for i, name in enumerate(dialogue.on):
            refs.append(Reference(f"{dialogue.name}.on", name, ConceptKind.TRIGGER, dialogue.on_span(i)))
        refs.extend(_dialogue_references(dialogue))
    return refs


def _value_reference(site: str, expr: ValueExpr) -> Reference | None:
    if isinstance(expr, FormSlotRef):
        return Reference(site, expr.qualified, ConceptKind.FORM_SLOT, expr.span)
    if isinstance(expr, GSlotRef):
        return Reference(site, expr.name, ConceptKind.GSLOT, expr.span)
    return None


def _call_references(site: str, call: ServiceCall) -> list[Reference]:
    refs = [Reference(site, call.service, ConceptKind.ESERVICE, call.span)]
    for value in call.values():
        ref = _value_reference(site, value)
        if ref is not None:
            refs.append(ref)
    return refs


def _template_references(site: str, template: TemplateString) -> list[Reference]:
    return [r for r in (_value_reference(site, e) for e in template.exprs()) if r is not None]


def _dialogue_references(dialogue: Dialogue) -> list[Reference]:
    refs: list[Reference] = []
    for response in dialogue.responses:
        if isinstance(response, Form):
            for slot in response.slots:
                site = f"{dialogue.name}.{response.name}.{slot.name}"
                source = slot.source
                if isinstance(source, EServiceSource):
                    refs.extend(_call_references(site, source.call))
                    continue
                refs.extend(_template_references(site, source.ask))
                extraction = source.extraction
                if isinstance(extraction, FromEntity) and isinstance(extraction.entity, TrainableEntityChunk):
                    refs.append(Reference(site, extraction.entity.entity, ConceptKind.ENTITY, extraction.entity.span))
                elif isinstance(extraction, FromIntent):
                    for mapping in extraction.mappings:
                        refs.append(Reference(site, mapping.intent, ConceptKind.INTENT, mapping.span))
            continue
        for i, action in enumerate(response.actions):
            site = f"{dialogue.name}.{response.name}[{i}]"
            if isinstance(action, SpeakAction):
                refs.extend(_template_references(site, action.text))
            elif isinstance(action, FireEventAction):
                refs.extend(r for r in (_value_reference(site, action.uri), _value_reference(site, action.message)) if r)
            elif isinstance(action, RESTCallAction):
                refs.extend(_call_references(site, action.call))
            elif isinstance(action, SetGSlot):
                refs.append(Reference(site, action.gslot, ConceptKind.GSLOT, action.span))
                ref = _value_reference(site, action.value)
                if ref:
                    refs.append(ref)
            elif isinstance(action, SetFSlot):
                refs.append(Reference(site, f"{action.form}.{action.slot}", ConceptKind.FORM_SLOT, action.span))
                ref = _value_reference(site, action.value)
                if ref:
                    refs.append(ref)
    return refs


def resolves(model: Model, ref: Reference) -> bool:
    """Whether *ref* names a declared element of the right kind."""
    if ref.kind is ConceptKind.TRIGGER:
        return model.trigger(ref.name) is not None
    if ref.kind is ConceptKind.INTENT:
        return isinstance(model.trigger(ref.name), Intent)
    if ref.kind is ConceptKind.ESERVICE:
        return model.eservice(ref.name) is not None
    if ref.kind is ConceptKind.GSLOT:
        return model.gslot(ref.name) is not None
    if ref.kind is ConceptKind.ENTITY:
        return model.entity(ref.name) is not None
    if ref.kind is ConceptKind.SYNONYM:
        return model.synonym(ref.name) is not None
    if ref.kind is ConceptKind.FORM_SLOT:
        form, _, slot = ref.name.partition(".")
        return model.find_form_slot(form, slot) is not None
    return True
