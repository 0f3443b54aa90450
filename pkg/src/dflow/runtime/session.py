"""Executing a model turn by turn, as the deployed assistant would."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable, Union

from .. import model as m
from ..text import join_pieces
from .matching import Captured, Gazetteer, find_entities, match_trigger, normalize_case_kept
from .services import (
    CoercionError,
    Request,
    ServiceEnv,
    ServiceError,
    StatusError,
    coerce,
    compose_url,
    extract_path,
)

DEFAULT_FALLBACK = "Sorry, I didn't understand that."
SERVICE_APOLOGY = "Sorry, I could not reach the service right now."

Clock = Callable[[], datetime]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class UserProfile:
    name: str | None = None
    surname: str | None = None
    age: int | None = None
    email: str | None = None
    phone: str | None = None
    city: str | None = None
    address: str | None = None

    def __post_init__(self) -> None:
        if self.age is not None and self.age < 0:
            raise ValueError("age must not be negative")

    @classmethod
    def from_dict(cls, data: dict) -> UserProfile:
        known = {k: data[k] for k in ("name", "surname", "age", "email", "phone", "city", "address") if k in data}
        if known.get("age") is not None:
            known["age"] = int(known["age"])
        return cls(**known)

    def get(self, prop: str) -> Any:
        return getattr(self, prop.lower())


# -- reply items ------------------------------------------------------------------


@dataclass(frozen=True)
class Say:
    text: str


@dataclass(frozen=True)
class EventFired:
    uri: str
    message: str


@dataclass(frozen=True)
class ServiceInvoked:
    service: str
    url: str


@dataclass(frozen=True)
class ErrorNote:
    """Something went wrong or was unclear; carries the error kind and URL if any."""

    kind: str
    message: str
    url: str | None = None


ReplyItem = Union[Say, EventFired, ServiceInvoked, ErrorNote]


@dataclass
class BotReply:
    items: list[ReplyItem] = field(default_factory=list)

    @property
    def texts(self) -> list[str]:
        return [item.text for item in self.items if isinstance(item, Say)]

    @property
    def text(self) -> str:
        return "\n".join(self.texts)


# -- phases -----------------------------------------------------------------------


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class InForm:
    dialogue: str
    response_index: int
    slot_index: int
    reasks: int = 0


Phase = Union[Idle, InForm]


class _Abort(Exception):
    """A service failure ends the running dialogue."""


class DialogueSession:
    """One conversation with the assistant described by a (valid) model.

    Form slots are keyed by (dialogue, form, slot) because form names are
    only unique within a dialogue. Slots outlive the dialogue that filled
    them, so later dialogues can read them; a dialogue clears its own form
    slots when it starts again.
    """

    def __init__(
        self,
        model: m.Model,
        env: ServiceEnv,
        *,
        seed: int = 0,
        clock: Clock = utc_now,
        profile: UserProfile | None = None,
        fallback: str = DEFAULT_FALLBACK,
    ) -> None:
        self.model = model
        self.env = env
        self.seed = seed
        self.clock = clock
        self.profile = profile or UserProfile()
        self.fallback = fallback
        self.gazetteer = Gazetteer.from_model(model)
        self.reset()

    def reset(self) -> None:
        self.phase: Phase = Idle()
        self.filled: dict[tuple[str, str, str], Any] = {}
        self.gslots: dict[str, Any] = {
            g.name: (_typed(g.default.value, g.slot_type) if g.default is not None else None)
            for g in self.model.gslots
        }
        self.transcript: list[tuple[str, str]] = []
        self.rng = random.Random(self.seed)

    # -- public entry points -------------------------------------------------------

    def handle_message(self, utterance: str) -> BotReply:
        self.transcript.append(("user", utterance))
        reply = BotReply()
        if isinstance(self.phase, InForm):
            self._answer(utterance, reply)
        else:
            result = match_trigger(self.model, utterance)
            if result.matched:
                self._start(self.model.dialogue_for(result.intent), result.entities, reply)
            else:
                if result.note:
                    reply.items.append(ErrorNote("ambiguous", result.note))
                self._say(reply, self.fallback)
        return reply

    def inject_event(self, event: str) -> BotReply:
        """Start the dialogue listening for *event*, as a broker message would."""
        reply = BotReply()
        trigger = self.model.trigger(event)
        if not isinstance(trigger, m.Event):
            raise KeyError(f"no event named {event!r}")
        self.transcript.append(("event", event))
        dialogue = self.model.dialogue_for(event)
        if dialogue is not None:
            self._start(dialogue, (), reply)
        return reply

    def slot_value(self, form: str, slot: str, dialogue: str | None = None) -> Any:
        key = self._slot_key(form, slot, dialogue)
        return self.filled.get(key) if key else None

    # -- dialogue execution --------------------------------------------------------

    def _start(self, dialogue: m.Dialogue | None, captured, reply: BotReply) -> None:
        self.phase = Idle()
        if dialogue is None:
            # A trigger no dialogue listens to: understood, but nothing to do.
            return
        for form in dialogue.forms():
            for slot in form.slots:
                self.filled.pop((dialogue.name, form.name, slot.name), None)
        self._prefill(dialogue, list(captured))
        self._run(dialogue, 0, 0, reply)

    def _prefill(self, dialogue: m.Dialogue, captured: list[Captured]) -> None:
        """Entities captured in the triggering utterance fill matching entity slots."""
        for form in dialogue.forms():
            for slot in form.slots:
                src = slot.source
                if not (isinstance(src, m.HRISource) and isinstance(src.extraction, m.FromEntity)):
                    continue
                kind = _entity_kind(src.extraction)
                hit = next((c for c in captured if c.kind == kind), None)
                if hit is None:
                    continue
                try:
                    self.filled[(dialogue.name, form.name, slot.name)] = coerce(hit.value, slot.slot_type)
                except ValueError:
                    continue
                captured.remove(hit)

    def _run(self, dialogue: m.Dialogue, response_index: int, slot_index: int, reply: BotReply) -> None:
        try:
            for ri in range(response_index, len(dialogue.responses)):
                response = dialogue.responses[ri]
                if isinstance(response, m.ActionGroup):
                    for action in response.actions:
                        self._execute(dialogue, action, reply)
                    continue
                start = slot_index if ri == response_index else 0
                for si in range(start, len(response.slots)):
                    slot = response.slots[si]
                    key = (dialogue.name, response.name, slot.name)
                    if isinstance(slot.source, m.EServiceSource):
                        self.filled[key] = self.call_service(
                            slot.source.call, dialogue, slot.slot_type, reply
                        )
                    elif key not in self.filled:
                        self.phase = InForm(dialogue.name, ri, si)
                        self._say(reply, self.render(slot.source.ask, dialogue))
                        return
        except _Abort:
            pass
        self.phase = Idle()

    def _answer(self, utterance: str, reply: BotReply) -> None:
        phase = self.phase
        dialogue = next(d for d in self.model.dialogues if d.name == phase.dialogue)
        form = dialogue.responses[phase.response_index]
        slot = form.slots[phase.slot_index]
        source = slot.source
        extraction = source.extraction
        text = normalize_case_kept(utterance)

        raw: Any = None
        if isinstance(extraction, m.FromText):
            raw = text
        elif isinstance(extraction, m.FromEntity):
            kind = _entity_kind(extraction)
            found = [c for c in self._entities(utterance) if c.kind == kind]
            if found:
                raw = found[0].value
            elif phase.reasks == 0:
                self.phase = InForm(phase.dialogue, phase.response_index, phase.slot_index, 1)
                self._say(reply, self.render(source.ask, dialogue))
                return
            else:
                raw = text
        else:
            result = match_trigger(self.model, utterance, [mv.intent for mv in extraction.mappings])
            if not result.matched:
                self._say(reply, self.render(source.ask, dialogue))
                return
            raw = next(mv.value.value for mv in extraction.mappings if mv.intent == result.intent)

        try:
            value = coerce(raw, slot.slot_type)
        except ValueError as exc:
            self._say(reply, f"{_explain(slot.slot_type)} ({exc}).")
            self._say(reply, self.render(source.ask, dialogue))
            return
        self.filled[(dialogue.name, form.name, slot.name)] = value
        self._run(dialogue, phase.response_index, phase.slot_index + 1, reply)

    def _entities(self, utterance: str) -> list[Captured]:
        matched = match_trigger(self.model, utterance)
        return list(matched.entities) + find_entities(self.model, utterance, self.gazetteer)

    def _execute(self, dialogue: m.Dialogue, action: m.Action, reply: BotReply) -> None:
        if isinstance(action, m.SpeakAction):
            self._say(reply, self.render(action.text, dialogue))
        elif isinstance(action, m.FireEventAction):
            uri = _text(self.resolve(action.uri, dialogue))
            message = _text(self.resolve(action.message, dialogue))
            reply.items.append(EventFired(uri, message))
        elif isinstance(action, m.RESTCallAction):
            self.call_service(action.call, dialogue, None, reply)
        elif isinstance(action, m.SetGSlot):
            declared = self.model.gslot(action.gslot)
            self.gslots[action.gslot] = _typed(self.resolve(action.value, dialogue), declared.slot_type)
        else:
            key = self._slot_key(action.form, action.slot, dialogue.name)
            slot = self.model.find_form_slot(action.form, action.slot, prefer=dialogue)
            self.filled[key] = _typed(self.resolve(action.value, dialogue), slot.slot_type)

    # -- values ----------------------------------------------------------------------

    def _slot_key(self, form: str, slot: str, dialogue: str | None) -> tuple[str, str, str] | None:
        """Locate a form slot, preferring the given dialogue's own forms."""
        order = sorted(self.model.dialogues, key=lambda d: d.name != dialogue)
        for d in order:
            for f in d.forms():
                if f.name == form and f.slot(slot) is not None:
                    return (d.name, form, slot)
        return None

    def resolve(self, expr: m.ValueExpr, dialogue: m.Dialogue | None = None) -> Any:
        if isinstance(expr, m.Literal):
            return expr.value
        if isinstance(expr, m.FormSlotRef):
            return self.slot_value(expr.form, expr.slot, dialogue.name if dialogue else None)
        if isinstance(expr, m.GSlotRef):
            return self.gslots.get(expr.name)
        if isinstance(expr, m.UserProperty):
            return self.profile.get(expr.name)
        return self.system_property(expr.name)

    def render(self, template: m.TemplateString, dialogue: m.Dialogue | None = None) -> str:
        pieces = [
            part.text if isinstance(part, m.TextPart) else _text(self.resolve(part.expr, dialogue))
            for part in template.parts
        ]
        return join_pieces(pieces)

    def system_property(self, prop: str) -> Any:
        if prop == "TIME":
            return self.clock().astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        if prop == "LOCATION":
            return self.profile.city or "unknown"
        if prop == "RANDOM_INT":
            return self.rng.randint(0, 100)
        if prop == "RANDOM_FLOAT":
            return self.rng.random()
        raise ValueError(f"unknown system property {prop!r}")

    # -- services ----------------------------------------------------------------------

    def call_service(self, call: m.ServiceCall, dialogue: m.Dialogue | None, slot_type: str | None,
                     reply: BotReply) -> Any:
        """Perform *call*; on any failure apologise, note the error and abort the dialogue."""
        try:
            return invoke(self.model, call, self.env, lambda e: self.resolve(e, dialogue), slot_type, reply)
        except ServiceError as exc:
            reply.items.append(ErrorNote(exc.kind, str(exc), exc.url))
            self._say(reply, SERVICE_APOLOGY)
            raise _Abort from exc

    def _say(self, reply: BotReply, text: str) -> None:
        reply.items.append(Say(text))
        self.transcript.append(("bot", text))


def invoke(model: m.Model, call: m.ServiceCall, env: ServiceEnv, resolve: Callable[[m.ValueExpr], Any],
           slot_type: str | None = None, reply: BotReply | None = None) -> Any:
    """Compose, send and decode one service call.

    Raises a :class:`ServiceError` subclass that carries the composed URL:
    network failure, non-2xx status, missing response key or a value that
    cannot be coerced to *slot_type*.
    """
    service = model.eservice(call.service)
    if service is None:
        raise ValueError(f"undeclared eservice {call.service!r}")

    def values(params: m.Params) -> dict[str, Any]:
        return {k: _param(resolve(v)) for k, v in params}

    url = compose_url(service, values(call.path), values(call.query))
    if reply is not None:
        reply.items.append(ServiceInvoked(service.name, url))
    request = Request(service.verb, url, {k: str(v) for k, v in values(call.header).items()},
                      values(call.body) or None)
    response = env.send(request)
    if not 200 <= response.status < 300:
        raise StatusError(response.status, url)
    value = extract_path(response.body, call.response_path, url)
    if slot_type is None:
        return value
    try:
        return coerce(value, slot_type)
    except ValueError as exc:
        raise CoercionError(str(exc), url) from None


def _param(value: Any) -> Any:
    return "" if value is None else value


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _typed(value: Any, slot_type: str) -> Any:
    """Coerce for storage; a value that does not fit leaves the slot empty."""
    if value is None:
        return None
    try:
        return coerce(value, slot_type)
    except ValueError:
        return None


def _entity_kind(extraction: m.FromEntity) -> str:
    ent = extraction.entity
    return ent.category if isinstance(ent, m.PretrainedEntityRef) else ent.entity


def _explain(slot_type: str) -> str:
    return {
        "int": "I need a whole number",
        "float": "I need a number",
        "bool": "Please answer yes or no",
    }.get(slot_type, "I could not use that answer")
