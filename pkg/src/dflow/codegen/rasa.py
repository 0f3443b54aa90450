"""Model-to-text transformation into a Rasa 3.x project.

Targets the rules/forms schema of Rasa 3.1 (``version: "3.1"`` data files,
slot mappings declared on slots) and the ``rasa_sdk`` action server API.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .. import model as m
from ..validator import validate
from .project import GeneratedProject

RASA_VERSION = "3.1"
SERVICE_APOLOGY = "Sorry, I could not reach the service right now."

_SLOT_TYPES = {"str": "text", "int": "float", "float": "float", "bool": "bool"}
_COERCE = {"str": "str", "int": "int", "float": "float", "bool": "bool"}


class InvalidModelError(ValueError):
    """Code generation was asked to translate a model that does not validate."""

    def __init__(self, report) -> None:
        self.report = report
        super().__init__(f"model is invalid ({len(report.errors)} error(s)); nothing was generated")


def q(text: str) -> str:
    """A YAML double-quoted scalar (JSON strings are valid YAML)."""
    return json.dumps(text, ensure_ascii=False)


def camel(name: str) -> str:
    return "".join(part[:1].upper() + part[1:] for part in re.split(r"[^0-9A-Za-z]+", name) if part)


@dataclass
class _FetchAction:
    """One HTTP request filling one or more service-sourced slots of a form."""

    name: str
    call: m.ServiceCall
    slots: list[tuple[str, m.FormSlot]] = field(default_factory=list)  # (domain slot name, slot)


@dataclass
class _Names:
    slots: dict[tuple[str, str, str], str] = field(default_factory=dict)  # (dialogue, form, slot)
    forms: dict[tuple[str, str], str] = field(default_factory=dict)

    def slot(self, dialogue: str, form: str, slot: str) -> str:
        return self.slots[(dialogue, form, slot)]


def _assign_names(model: m.Model) -> _Names:
    names = _Names()
    slot_counts: dict[str, int] = {g.name: 1 for g in model.gslots}
    form_counts: dict[str, int] = {}
    for d in model.dialogues:
        for form in d.forms():
            form_counts[form.name] = form_counts.get(form.name, 0) + 1
            for slot in form.slots:
                slot_counts[slot.name] = slot_counts.get(slot.name, 0) + 1
    for d in model.dialogues:
        for form in d.forms():
            unique_form = form_counts[form.name] == 1
            names.forms[(d.name, form.name)] = form.name if unique_form else f"{d.name}_{form.name}"
            for slot in form.slots:
                unique = slot_counts[slot.name] == 1
                names.slots[(d.name, form.name, slot.name)] = (
                    slot.name if unique else f"{names.forms[(d.name, form.name)]}_{slot.name}"
                )
    return names


class _RasaGenerator:
    def __init__(self, model: m.Model) -> None:
        self.model = model
        self.names = _assign_names(model)
        self.uses_user = False
        self.uses_system = False
        self.uses_join = False
        self.uses_services = False
        self.fetches: dict[tuple[str, str], list[_FetchAction]] = {}
        self.ask_actions: dict[tuple[str, str, str], str] = {}
        self.filled_by: dict[str, list[str]] = {}
        for d in model.dialogues:
            for form in d.forms():
                self.fetches[(d.name, form.name)] = self._group_fetches(d, form)
                for fetch in self.fetches[(d.name, form.name)]:
                    self.filled_by[fetch.name] = [name for name, _ in fetch.slots]
                for slot in form.slots:
                    if isinstance(slot.source, m.HRISource) and any(
                        isinstance(e, (m.UserProperty, m.SystemProperty)) for e in slot.source.ask.exprs()
                    ):
                        self.ask_actions[(d.name, form.name, slot.name)] = (
                            f"action_ask_{self.names.forms[(d.name, form.name)]}_{slot.name}"
                        )

    def _group_fetches(self, d: m.Dialogue, form: m.Form) -> list[_FetchAction]:
        fetches: list[_FetchAction] = []
        by_call: dict[m.ServiceCall, _FetchAction] = {}
        for slot in form.slots:
            if not isinstance(slot.source, m.EServiceSource):
                continue
            key = slot.source.call.without_response_path()
            fetch = by_call.get(key)
            domain_name = self.names.slot(d.name, form.name, slot.name)
            if fetch is None:
                base = f"action_{d.name}_{form.name}_{key.service}"
                taken = sum(1 for f in fetches if f.call.service == key.service)
                fetch = _FetchAction(base if not taken else f"{base}_{taken + 1}", key)
                by_call[key] = fetch
                fetches.append(fetch)
            fetch.slots.append((domain_name, slot))
        return fetches

    # -- naming ----------------------------------------------------------------

    def group_action(self, d: m.Dialogue, group: m.ActionGroup) -> str:
        return f"action_{d.name}_{group.name}"

    def split_fetches(self, d: m.Dialogue, form: m.Form) -> tuple[list[_FetchAction], list[_FetchAction]]:
        """Fetches run before the form activates, and those run after it is submitted.

        A request whose first slot precedes every HRI slot can run up front;
        anything declared after a question waits for the user's answers.
        """
        fetches = self.fetches[(d.name, form.name)]
        hri = [i for i, s in enumerate(form.slots) if isinstance(s.source, m.HRISource)]
        if not hri:
            return fetches, []
        before = [f for f in fetches if form.slots.index(f.slots[0][1]) < hri[0]]
        return before, [f for f in fetches if f not in before]

    def required_slots(self, d: m.Dialogue, form: m.Form) -> list[str]:
        """Slots the domain form waits for: everything filled before it completes."""
        _, after = self.split_fetches(d, form)
        late = {name for f in after for name, _ in f.slots}
        names = [self.names.slot(d.name, form.name, s.name) for s in form.slots]
        return [n for n in names if n not in late]

    def custom_actions(self) -> list[str]:
        actions = []
        for d in self.model.dialogues:
            for response in d.responses:
                if isinstance(response, m.Form):
                    actions += [f.name for f in self.fetches[(d.name, response.name)]]
                    actions += [
                        self.ask_actions[k] for k in self.ask_actions if k[:2] == (d.name, response.name)
                    ]
                else:
                    actions.append(self.group_action(d, response))
        return actions

    def entity_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for intent in self.model.intents:
            for ex in intent.examples:
                for chunk in ex.chunks:
                    if isinstance(chunk, m.PretrainedEntityChunk):
                        seen[chunk.ref.category] = None
        for d in self.model.dialogues:
            for form in d.forms():
                for slot in form.slots:
                    src = slot.source
                    if isinstance(src, m.HRISource) and isinstance(src.extraction, m.FromEntity):
                        ent = src.extraction.entity
                        seen[ent.category if isinstance(ent, m.PretrainedEntityRef) else ent.entity] = None
        for e in self.model.entities:
            seen[e.name] = None
        for s in self.model.synonyms:
            seen[s.name] = None
        return list(seen)

    def pretrained_categories(self) -> list[str]:
        known = {e.name for e in self.model.entities} | {s.name for s in self.model.synonyms}
        return [n for n in self.entity_names() if n in m.PRETRAINED_CATEGORIES and n not in known]

    # -- files ---------------------------------------------------------------

    def config(self) -> str:
        categories = self.pretrained_categories()
        spacy = [c for c in categories if c != "EMAIL"]
        lines = ["recipe: default.v1", "language: en", "pipeline:"]
        if spacy:
            lines += ["  - name: SpacyNLP", "    model: en_core_web_md", "  - name: SpacyTokenizer"]
        else:
            lines.append("  - name: WhitespaceTokenizer")
        if "EMAIL" in categories:
            lines.append("  - name: RegexEntityExtractor")
        lines += [
            "  - name: LexicalSyntacticFeaturizer",
            "  - name: CountVectorsFeaturizer",
            "  - name: DIETClassifier",
            "    epochs: 100",
        ]
        if spacy:
            lines += ["  - name: SpacyEntityExtractor", f"    dimensions: [{', '.join(spacy)}]"]
        lines += [
            "  - name: EntitySynonymMapper",
            "policies:",
            "  - name: MemoizationPolicy",
            "  - name: RulePolicy",
            "  - name: TEDPolicy",
            "    max_history: 5",
            "    epochs: 100",
        ]
        return "\n".join(lines) + "\n"

    def endpoints(self) -> str:
        return 'action_endpoint:\n  url: "http://localhost:5055/webhook"\n'

    def credentials(self) -> str:
        return "rest:\n"

    def domain(self) -> str:
        model = self.model
        lines = [f'version: "{RASA_VERSION}"', "intents:"]
        lines += [f"  - {t.name}" for t in model.triggers] or ["  []"]
        if not model.triggers:
            lines[-2:] = ["intents: []"]
        entities = self.entity_names()
        if entities:
            lines.append("entities:")
            lines += [f"  - {e}" for e in entities]
        slot_lines = self._domain_slots()
        if slot_lines:
            lines.append("slots:")
            lines += slot_lines
        form_lines = []
        for d in model.dialogues:
            for form in d.forms():
                form_lines.append(f"  {self.names.forms[(d.name, form.name)]}:")
                form_lines.append("    required_slots:")
                form_lines += [f"      - {s}" for s in self.required_slots(d, form)]
        if form_lines:
            lines.append("forms:")
            lines += form_lines
        response_lines = []
        for d in model.dialogues:
            for form in d.forms():
                for slot in form.slots:
                    key = (d.name, form.name, slot.name)
                    if isinstance(slot.source, m.HRISource) and key not in self.ask_actions:
                        response_lines.append(f"  utter_ask_{self.names.forms[key[:2]]}_{slot.name}:")
                        response_lines.append(f"    - text: {q(self.response_text(d, slot.source.ask))}")
        if any(self.fetches.values()):
            response_lines += ["  utter_service_error:", f"    - text: {q(SERVICE_APOLOGY)}"]
        if response_lines:
            lines.append("responses:")
            lines += response_lines
        actions = self.custom_actions()
        if actions:
            lines.append("actions:")
            lines += [f"  - {a}" for a in actions]
        lines += [
            "session_config:",
            "  session_expiration_time: 60",
            "  carry_over_slots_to_new_session: true",
        ]
        return "\n".join(lines) + "\n"

    def _domain_slots(self) -> list[str]:
        lines = []
        for g in self.model.gslots:
            lines += [f"  {g.name}:", f"    type: {_SLOT_TYPES[g.slot_type]}", "    influence_conversation: false"]
            if g.default is not None:
                lines.append(f"    initial_value: {json.dumps(g.default.value)}")
            lines += ["    mappings:", "      - type: custom"]
        for d in self.model.dialogues:
            for form in d.forms():
                form_name = self.names.forms[(d.name, form.name)]
                for slot in form.slots:
                    name = self.names.slot(d.name, form.name, slot.name)
                    lines += [
                        f"  {name}:",
                        f"    type: {_SLOT_TYPES[slot.slot_type]}",
                        "    influence_conversation: false",
                        "    mappings:",
                    ]
                    lines += self._mappings(form_name, name, slot)
        return lines

    def _mappings(self, form_name: str, slot_name: str, slot: m.FormSlot) -> list[str]:
        source = slot.source
        if isinstance(source, m.EServiceSource):
            # Filled by the fetch action that runs in the dialogue's rule.
            return ["      - type: custom"]
        condition = [
            "        conditions:",
            f"          - active_loop: {form_name}",
            f"            requested_slot: {slot_name}",
        ]
        extraction = source.extraction
        if isinstance(extraction, m.FromText):
            return ["      - type: from_text"] + condition
        if isinstance(extraction, m.FromEntity):
            ent = extraction.entity
            name = ent.category if isinstance(ent, m.PretrainedEntityRef) else ent.entity
            return ["      - type: from_entity", f"        entity: {name}"] + condition
        lines = []
        for mapping in extraction.mappings:
            lines += [
                "      - type: from_intent",
                f"        intent: {mapping.intent}",
                f"        value: {json.dumps(mapping.value.value)}",
            ] + condition
        return lines

    def response_text(self, d: m.Dialogue, template: m.TemplateString) -> str:
        from ..text import join_pieces

        pieces = []
        for part in template.parts:
            if isinstance(part, m.TextPart):
                pieces.append(part.text)
            elif isinstance(part.expr, m.Literal):
                pieces.append(str(part.expr.value))
            elif isinstance(part.expr, m.FormSlotRef):
                pieces.append("{" + self.form_slot_name(d, part.expr.form, part.expr.slot) + "}")
            elif isinstance(part.expr, m.GSlotRef):
                pieces.append("{" + part.expr.name + "}")
        return join_pieces(pieces)

    def form_slot_name(self, d: m.Dialogue, form: str, slot: str) -> str:
        if (d.name, form, slot) in self.names.slots:
            return self.names.slots[(d.name, form, slot)]
        for (dn, fn, sn), name in self.names.slots.items():
            if fn == form and sn == slot:
                return name
        return slot

    # -- NLU -------------------------------------------------------------------

    def _example_variants(self, example: m.PhraseExample) -> list[str]:
        variants = 1
        for chunk in example.chunks:
            if isinstance(chunk, m.PretrainedEntityChunk):
                variants = max(variants, len(chunk.ref.sample_values))
        out = []
        for i in range(variants):
            pieces = []
            for chunk in example.chunks:
                if isinstance(chunk, m.TextChunk):
                    pieces.append(chunk.text.strip())
                elif isinstance(chunk, m.PretrainedEntityChunk):
                    samples = chunk.ref.sample_values
                    if samples:
                        pieces.append(f"[{samples[i % len(samples)]}]({chunk.ref.category})")
                elif isinstance(chunk, m.TrainableEntityChunk):
                    entity = self.model.entity(chunk.entity)
                    value = entity.examples[i % len(entity.examples)] if entity and entity.examples else chunk.entity
                    pieces.append(f"[{value}]({chunk.entity})")
                else:
                    syn = self.model.synonym(chunk.synonym)
                    word = syn.words[i % len(syn.words)] if syn and syn.words else chunk.synonym
                    pieces.append(f'[{word}]{{"entity": "{chunk.synonym}", "value": "{chunk.synonym}"}}')
            text = " ".join(p for p in pieces if p)
            if text and text not in out:
                out.append(text)
        return out

    def nlu(self) -> str:
        lines = [f'version: "{RASA_VERSION}"', "nlu:"]
        body = []
        for intent in self.model.intents:
            body += [f"  - intent: {intent.name}", "    examples: |"]
            for ex in intent.examples:
                body += [f"      - {v}" for v in self._example_variants(ex)]
        for entity in self.model.entities:
            body += [f"  - lookup: {entity.name}", "    examples: |"]
            body += [f"      - {e}" for e in entity.examples]
        for syn in self.model.synonyms:
            body += [f"  - synonym: {syn.name}", "    examples: |"]
            body += [f"      - {w}" for w in syn.words]
        if "EMAIL" in self.pretrained_categories():
            body += ["  - regex: EMAIL", "    examples: |", r"      - [^@\s]+@[^@\s]+\.[A-Za-z]{2,}"]
        if not body:
            lines[-1] = "nlu: []"
        return "\n".join(lines + body) + "\n"

    # -- dialogue flow -----------------------------------------------------------

    def _flow(self, d: m.Dialogue) -> list[list[str]]:
        """Split the dialogue into segments separated by form activations.

        Each segment is a list of step lines; a segment that activates a form
        ends with that form's ``active_loop`` step, and the next one starts
        with a ``#form`` marker naming it.
        """
        segments: list[list[str]] = [[]]
        for response in d.responses:
            if isinstance(response, m.ActionGroup):
                segments[-1].append(f"- action: {self.group_action(d, response)}")
                continue
            before, after = self.split_fetches(d, response)
            form_name = self.names.forms[(d.name, response.name)]
            segments[-1] += [f"- action: {f.name}" for f in before]
            segments[-1] += [f"- action: {form_name}", f"- active_loop: {form_name}"]
            segments.append([f"#form {form_name}"] + [f"- action: {f.name}" for f in after])
        return segments

    def rules(self) -> str:
        lines = [f'version: "{RASA_VERSION}"', "rules:"]
        body = []
        for d in self.model.dialogues:
            segments = self._flow(d)
            for trigger in d.on:
                suffix = f" ({trigger})" if len(d.on) > 1 else ""
                body += [f"  - rule: {d.name}{suffix}", "    steps:", f"      - intent: {trigger}"]
                body += [f"      {step}" for step in segments[0]]
            for segment in segments[1:]:
                form_name = segment[0].split(" ", 1)[1]
                body += [
                    f"  - rule: {d.name} submit {form_name}",
                    "    condition:",
                    f"      - active_loop: {form_name}",
                    "    steps:",
                    f"      - action: {form_name}",
                    "      - active_loop: null",
                    "      - slot_was_set:",
                    "          - requested_slot: null",
                ]
                body += [f"      {step}" for step in segment[1:]]
        if not body:
            lines[-1] = "rules: []"
        return "\n".join(lines + body) + "\n"

    def stories(self) -> str:
        lines = [f'version: "{RASA_VERSION}"', "stories:"]
        body = []
        for d in self.model.dialogues:
            steps = []
            for i, segment in enumerate(self._flow(d)):
                if i:
                    steps.append("- active_loop: null")
                    segment = segment[1:]
                for step in segment:
                    steps.append(step)
                    filled = self.filled_by.get(step.removeprefix("- action: "))
                    if filled:
                        steps.append("- slot_was_set:")
                        steps += [f"    - {name}" for name in filled]
            for trigger in d.on:
                body += [f"  - story: {d.name} via {trigger}", "    steps:", f"      - intent: {trigger}"]
                body += [f"      {s}" for s in steps]
        if not body:
            lines[-1] = "stories: []"
        return "\n".join(lines + body) + "\n"

    # -- action server ---------------------------------------------------------

    def py_value(self, d: m.Dialogue, expr: m.ValueExpr) -> str:
        if isinstance(expr, m.Literal):
            return repr(expr.value)
        if isinstance(expr, m.FormSlotRef):
            return f'tracker.get_slot("{self.form_slot_name(d, expr.form, expr.slot)}")'
        if isinstance(expr, m.GSlotRef):
            return f'tracker.get_slot("{expr.name}")'
        if isinstance(expr, m.UserProperty):
            self.uses_user = True
            return f"UserProperties(tracker).{expr.name.lower()}"
        self.uses_system = True
        if expr.name == "LOCATION":
            return "SystemProperties.location(tracker)"
        return f"SystemProperties.{expr.name.lower()}()"

    def py_template(self, d: m.Dialogue, template: m.TemplateString) -> str:
        if len(template.parts) == 1 and isinstance(template.parts[0], m.TextPart):
            return repr(template.parts[0].text)
        self.uses_join = True
        args = [
            repr(p.text) if isinstance(p, m.TextPart) else self.py_value(d, p.expr) for p in template.parts
        ]
        return f"join_text({', '.join(args)})"

    def py_params(self, d: m.Dialogue, params: m.Params) -> str:
        return "{" + ", ".join(f"{k!r}: {self.py_value(d, v)}" for k, v in params) + "}"

    def py_call(self, d: m.Dialogue, call: m.ServiceCall, indent: str) -> list[str]:
        self.uses_services = True
        svc = self.model.eservice(call.service)
        base = svc.host.rstrip("/") + (f":{svc.port}" if svc.port else "")
        path = svc.path if not svc.path or svc.path.startswith("/") else "/" + svc.path
        lines = [f"{indent}data = call_service(", f'{indent}    "{svc.verb}",', f"{indent}    {base + path!r},"]
        for group, params in call.param_groups():
            if params:
                lines.append(f"{indent}    {group}={self.py_params(d, params)},")
        lines.append(f"{indent})")
        return lines

    def _class_header(self, action_name: str, doc: str) -> list[str]:
        return [
            "",
            "",
            f"class {camel(action_name)}(Action):",
            f'    """{doc}"""',
            "",
            "    def name(self) -> Text:",
            f'        return "{action_name}"',
            "",
            "    def run(self, dispatcher: CollectingDispatcher, tracker: Tracker,",
            "            domain: Dict[Text, Any]) -> List[Dict[Text, Any]]:",
        ]

    def _fetch_class(self, d: m.Dialogue, fetch: _FetchAction) -> list[str]:
        filled = ", ".join(name for name, _ in fetch.slots)
        lines = self._class_header(fetch.name, f"Call {fetch.call.service} and fill {filled}.")
        lines.append("        try:")
        lines += self.py_call(d, fetch.call, " " * 12)
        lines.append("            return [")
        for slot_name, slot in fetch.slots:
            path = slot.source.call.response_path or ""
            lines.append(
                f'                SlotSet("{slot_name}", {_COERCE[slot.slot_type]}(extract(data, "{path}"))),'
            )
        service = fetch.call.service
        lines += [
            "            ]",
            "        except requests.RequestException as exc:",
            f'            logger.error("{service} request failed: %s", exc)',
            "        except (KeyError, IndexError, TypeError, ValueError) as exc:",
            f'            logger.error("{service} answered without the expected data: %s", exc)',
            '        dispatcher.utter_message(response="utter_service_error")',
            "        # Abandon the dialogue: later steps would read empty slots.",
            '        return [ActiveLoop(None), FollowupAction("action_listen")]',
        ]
        return lines

    def _ask_class(self, d: m.Dialogue, action_name: str, slot: m.FormSlot) -> list[str]:
        lines = self._class_header(action_name, f"Ask for {slot.name} using live user and system data.")
        lines.append(f"        dispatcher.utter_message(text={self.py_template(d, slot.source.ask)})")
        lines.append("        return []")
        return lines

    def _group_class(self, d: m.Dialogue, group: m.ActionGroup) -> list[str]:
        lines = self._class_header(self.group_action(d, group), f"Responses of {group.name} in {d.name}.")
        events = False
        body = []
        for action in group.actions:
            if isinstance(action, m.SpeakAction):
                body.append(f"        dispatcher.utter_message(text={self.py_template(d, action.text)})")
            elif isinstance(action, m.FireEventAction):
                uri, message = self.py_value(d, action.uri), self.py_value(d, action.message)
                body.append(f"        publish_event({uri}, {message})")
            elif isinstance(action, m.RESTCallAction):
                body += self.py_call(d, action.call, " " * 8)
                if action.call.response_path:
                    body.append(f'        logger.info("response: %s", extract(data, "{action.call.response_path}"))')
            elif isinstance(action, m.SetGSlot):
                events = True
                body.append(f'        events.append(SlotSet("{action.gslot}", {self.py_value(d, action.value)}))')
            else:
                events = True
                name = self.form_slot_name(d, action.form, action.slot)
                body.append(f'        events.append(SlotSet("{name}", {self.py_value(d, action.value)}))')
        if events:
            lines.append("        events: List[Dict[Text, Any]] = []")
        lines += body
        lines.append("        return events" if events else "        return []")
        return lines

    def actions(self) -> str:
        classes: list[str] = []
        for d in self.model.dialogues:
            for response in d.responses:
                if isinstance(response, m.ActionGroup):
                    classes += self._group_class(d, response)
                    continue
                for fetch in self.fetches[(d.name, response.name)]:
                    classes += self._fetch_class(d, fetch)
                for slot in response.slots:
                    key = (d.name, response.name, slot.name)
                    if key in self.ask_actions:
                        classes += self._ask_class(d, self.ask_actions[key], slot)
        fires = any(
            isinstance(a, m.FireEventAction)
            for d in self.model.dialogues for r in d.responses if isinstance(r, m.ActionGroup) for a in r.actions
        )

        header = []
        if self.uses_system:
            header += ["import random", "from datetime import datetime, timezone"]
        if self.uses_services or fires:
            header.append("import logging")
        header.append("from typing import Any, Dict, List, Text")
        header.append("")
        if self.uses_services:
            header.append("import requests")
        header.append("from rasa_sdk import Action, Tracker")
        if self.uses_services:
            header.append("from rasa_sdk.events import ActiveLoop, FollowupAction, SlotSet")
        elif self._sets_slots():
            header.append("from rasa_sdk.events import SlotSet")
        header.append("from rasa_sdk.executor import CollectingDispatcher")
        if self.uses_services or fires:
            header += ["", "logger = logging.getLogger(__name__)"]
        helpers: list[str] = []
        if self.uses_services:
            helpers += _SERVICE_HELPERS
        if fires:
            helpers += _EVENT_HELPER
        if self.uses_join:
            helpers += _JOIN_HELPER
        if self.uses_user:
            helpers += _USER_HELPER
        if self.uses_system:
            helpers += _SYSTEM_HELPER
        return "\n".join(header + helpers + classes) + "\n"

    def _sets_slots(self) -> bool:
        return any(
            isinstance(a, (m.SetGSlot, m.SetFSlot))
            for d in self.model.dialogues for r in d.responses if isinstance(r, m.ActionGroup) for a in r.actions
        )

    def generate(self) -> GeneratedProject:
        # actions.py is rendered first because it records which helpers are used.
        actions = self.actions()
        return GeneratedProject({
            "config.yml": self.config(),
            "domain.yml": self.domain(),
            "endpoints.yml": self.endpoints(),
            "credentials.yml": self.credentials(),
            "data/nlu.yml": self.nlu(),
            "data/rules.yml": self.rules(),
            "data/stories.yml": self.stories(),
            "actions/actions.py": actions,
        })


_SERVICE_HELPERS = '''

def call_service(verb: Text, url: Text, query: Dict = None, path: Dict = None,
                 header: Dict = None, body: Dict = None) -> Any:
    for key, value in (path or {}).items():
        placeholder = "{" + key + "}"
        if placeholder in url:
            url = url.replace(placeholder, requests.utils.quote(str(value), safe=""))
        else:
            url = url.rstrip("/") + "/" + requests.utils.quote(str(value), safe="")
    response = requests.request(verb, url, params=query, headers=header, json=body, timeout=10)
    response.raise_for_status()
    return response.json()


def extract(document: Any, response_path: Text) -> Any:
    value = document
    for key in response_path.split(".") if response_path else []:
        if isinstance(value, list):
            value = value[int(key)]
        else:
            value = value[key]
    return value'''.split("\n")

_EVENT_HELPER = '''

def publish_event(uri: Text, message: Any) -> None:
    # Stub publisher: broker wiring is deployment specific.
    logger.info("event %s: %s", uri, message)'''.split("\n")

_JOIN_HELPER = '''

def join_text(*pieces: Any) -> Text:
    out = ""
    for piece in (str(p) for p in pieces if p is not None):
        if out and piece and not out[-1].isspace() and not piece[0].isspace() \\
                and piece[0] not in ".,!?;:)]}'\\"" and out[-1] not in "([{'\\"/":
            out += " "
        out += piece
    return out'''.split("\n")

_USER_HELPER = '''

class UserProperties:
    """User details sent by the client as message metadata."""

    FIELDS = ("name", "surname", "age", "email", "phone", "city", "address")

    def __init__(self, tracker: Tracker) -> None:
        metadata = tracker.latest_message.get("metadata") or {}
        profile = metadata.get("user", {})
        self.name = profile.get("name")
        self.surname = profile.get("surname")
        self.age = profile.get("age")
        self.email = profile.get("email")
        self.phone = profile.get("phone")
        self.city = profile.get("city")
        self.address = profile.get("address")'''.split("\n")

_SYSTEM_HELPER = '''

class SystemProperties:
    @staticmethod
    def time() -> Text:
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    @staticmethod
    def location(tracker: Tracker) -> Text:
        metadata = tracker.latest_message.get("metadata") or {}
        return metadata.get("user", {}).get("city") or "unknown"

    @staticmethod
    def random_int() -> int:
        return random.randint(0, 100)

    @staticmethod
    def random_float() -> float:
        return random.random()'''.split("\n")


def generate(model: m.Model) -> GeneratedProject:
    """Translate a valid model into the 8-file Rasa project.

    Raises :class:`InvalidModelError` (and emits nothing) when the model does
    not validate.
    """
    report = validate(model)
    if not report.valid:
        raise InvalidModelError(report)
    return _RasaGenerator(model).generate()
