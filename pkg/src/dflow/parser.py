"""Recursive-descent parser turning dFlow text into a :class:`~dflow.model.Model`.

Whitespace and newlines carry no meaning, so definitions may wrap across
lines freely. Errors are collected rather than raised one at a time: when an
element fails to parse, the parser skips to the ``end`` closing that element
and carries on, so one run reports every independent mistake.
"""

from __future__ import annotations

from . import model as m
from .diagnostics import Diagnostic, SourceSpan, error, sort_diagnostics
from .lexer import EOF, IDENT, NUMBER, STRING, Token, tokenize

TOP_LEVEL = ("triggers", "entities", "synonyms", "eservices", "gslots", "dialogues")
ELEMENTS = ("Intent", "Event", "Entity", "Synonym", "EServiceHTTP", "Dialogue")
RESPONSES = ("Form", "ActionGroup")
_LEVELS = {**{w: 0 for w in TOP_LEVEL}, **{w: 1 for w in ELEMENTS}, **{w: 2 for w in RESPONSES}}

RESERVED = frozenset(
    TOP_LEVEL + ELEMENTS + RESPONSES
    + ("end", "Speak", "FireEvent", "SetGSlot", "SetFSlot", "HRI", "true", "false",
       "PE", "TE", "S", "USER", "SYSTEM", "GSLOT")
)


class DFlowSyntaxError(Exception):
    """Raised by :func:`parse` when the source contains syntax errors."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        self.diagnostics = diagnostics
        first = diagnostics[0].format() if diagnostics else "syntax error"
        more = f" (+{len(diagnostics) - 1} more)" if len(diagnostics) > 1 else ""
        super().__init__(first + more)


class _Bail(Exception):
    pass


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.start_line, a.start_col, b.end_line, b.end_col, a.file_label)


class _Parser:
    def __init__(self, source: str, label: str) -> None:
        self.tokens, self.diagnostics = tokenize(source, label)
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != EOF:
            self.pos += 1
        return tok

    @property
    def previous(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def fail(self, code: str, message: str, tok: Token | None = None) -> None:
        self.diagnostics.append(error(code, message, (tok or self.peek()).span))
        raise _Bail

    def report(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(error(code, message, span))

    def expect_punct(self, char: str, context: str) -> Token:
        tok = self.peek()
        if not tok.is_punct(char):
            self.fail("P006", f"expected '{char}' {context}, found {tok.describe()}")
        return self.advance()

    def accept_punct(self, char: str) -> bool:
        if self.peek().is_punct(char):
            self.advance()
            return True
        return False

    def expect_word(self, word: str, context: str) -> Token:
        tok = self.peek()
        if not tok.is_word(word):
            self.fail("P006", f"expected '{word}' {context}, found {tok.describe()}")
        return self.advance()

    def expect_name(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != IDENT or tok.value in RESERVED:
            self.fail("P006", f"expected {what}, found {tok.describe()}")
        return self.advance()

    def expect_string(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != STRING:
            self.fail("P006", f"expected {what} string, found {tok.describe()}")
        return self.advance()

    def at_block_boundary(self) -> bool:
        tok = self.peek()
        return tok.kind == EOF or tok.is_word(*TOP_LEVEL)

    def expect_end(self, opener: Token) -> Token:
        tok = self.peek()
        if tok.is_word("end"):
            return self.advance()
        if self.at_block_boundary() or (tok.kind == IDENT and _LEVELS.get(tok.value, 9) <= _LEVELS.get(opener.value, 0)):
            self.fail("P005", f"missing 'end' for '{opener.value}'", opener)
        self.fail("P006", f"expected 'end' to close '{opener.value}', found {tok.describe()}")
        raise AssertionError  # unreachable

    def recover(self, start: int, level: int) -> None:
        """Skip past the element opened at token *start* (nesting *level*)."""
        self.pos = start + 1
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == EOF:
                return
            if tok.kind == IDENT and tok.value in _LEVELS:
                if _LEVELS[tok.value] <= level:
                    return
                depth += 1
            elif tok.is_word("end"):
                self.advance()
                if depth == 0:
                    return
                depth -= 1
                continue
            self.advance()

    # -- document ----------------------------------------------------------

    def parse_document(self) -> m.Model:
        lists: dict[str, list] = {name: [] for name in TOP_LEVEL}
        while self.peek().kind != EOF:
            tok = self.peek()
            if tok.is_word(*TOP_LEVEL):
                self.parse_block(tok, lists[tok.value])
                continue
            start = self.pos
            what = tok.describe()
            self.report("P002", f"unknown top-level block {what}; expected one of {', '.join(TOP_LEVEL)}", tok.span)
            self.recover(start, 0)
        return m.Model(
            entities=tuple(lists["entities"]),
            synonyms=tuple(lists["synonyms"]),
            triggers=tuple(lists["triggers"]),
            eservices=tuple(lists["eservices"]),
            gslots=tuple(lists["gslots"]),
            dialogues=tuple(lists["dialogues"]),
        )

    def parse_block(self, opener: Token, out: list) -> None:
        self.advance()
        kind = opener.value
        element_parsers = {
            "triggers": {"Intent": self.parse_intent, "Event": self.parse_event},
            "entities": {"Entity": self.parse_entity},
            "synonyms": {"Synonym": self.parse_synonym},
            "eservices": {"EServiceHTTP": self.parse_eservice},
            "dialogues": {"Dialogue": self.parse_dialogue},
        }
        while True:
            tok = self.peek()
            if tok.is_word("end"):
                self.advance()
                return
            if self.at_block_boundary():
                self.report("P005", f"missing 'end' for '{kind}' block", opener.span)
                return
            start = self.pos
            try:
                if kind == "gslots":
                    out.append(self.parse_gslot())
                    continue
                parser = element_parsers[kind].get(tok.value) if tok.kind == IDENT else None
                if parser is None:
                    expected = " or ".join(f"'{k}'" for k in element_parsers[kind])
                    self.fail("P003", f"unknown keyword {tok.describe()} in '{kind}' block; expected {expected}")
                out.append(parser())
            except _Bail:
                if kind == "gslots":
                    self.recover_gslot(start)
                else:
                    self.recover(start, 1)

    # -- triggers ------------------------------------------------------------

    def parse_intent(self) -> m.Intent:
        opener = self.advance()
        name = self.expect_name("intent name")
        examples: list[m.PhraseExample] = []
        if self.peek().is_word("end"):
            self.report("P007", f"intent '{name.value}' has no phrase examples", _join(opener.span, name.span))
        else:
            while True:
                examples.append(self.parse_example())
                if not self.accept_punct(",") or self.peek().is_word("end"):
                    break
        end = self.expect_end(opener)
        return m.Intent(name.value, tuple(examples), _join(opener.span, end.span))

    def parse_example(self) -> m.PhraseExample:
        chunks: list[m.Chunk] = []
        first = self.peek()
        while True:
            tok = self.peek()
            if tok.kind == STRING:
                self.advance()
                if not tok.value.strip():
                    self.report("P009", "phrase example text must not be empty", tok.span)
                chunks.append(m.TextChunk(tok.value, tok.span))
            elif tok.is_word("PE", "TE", "S") and self.peek(1).is_punct(":"):
                chunks.append(self.parse_entity_chunk())
            elif tok.is_word("PE", "TE", "S"):
                self.fail("P004", f"malformed entity reference: expected ':' after '{tok.value}'", self.peek(1))
            else:
                break
        if not chunks:
            self.fail("P006", f"expected a phrase example, found {first.describe()}", first)
        return m.PhraseExample(tuple(chunks), _join(first.span, self.previous.span))

    def parse_entity_ref(self) -> m.PretrainedEntityRef | m.TrainableEntityChunk | m.SynonymChunk:
        prefix = self.advance()
        self.advance()  # ':'
        tok = self.peek()
        if tok.kind != IDENT:
            self.fail("P004", f"malformed entity reference: expected a name after '{prefix.value}:'")
        self.advance()
        if prefix.value == "TE":
            return m.TrainableEntityChunk(tok.value, _join(prefix.span, tok.span))
        if prefix.value == "S":
            return m.SynonymChunk(tok.value, _join(prefix.span, tok.span))
        if tok.value not in m.PRETRAINED_CATEGORIES:
            self.fail("P004", f"malformed entity reference: unknown pre-trained entity category '{tok.value}'", tok)
        samples: list[str] = []
        if self.accept_punct("["):
            while not self.peek().is_punct("]"):
                samples.append(self.expect_string("entity sample").value)
                if not self.accept_punct(","):
                    break
            self.expect_punct("]", "to close the entity sample list")
        return m.PretrainedEntityRef(tok.value, tuple(samples), _join(prefix.span, self.previous.span))

    def parse_entity_chunk(self) -> m.Chunk:
        ref = self.parse_entity_ref()
        if isinstance(ref, m.PretrainedEntityRef):
            return m.PretrainedEntityChunk(ref, ref.span)
        return ref

    def parse_event(self) -> m.Event:
        opener = self.advance()
        name = self.expect_name("event name")
        self.expect_word("uri", "in event definition")
        self.expect_punct(":", "after 'uri'")
        uri = self.expect_string("event uri")
        end = self.expect_end(opener)
        return m.Event(name.value, uri.value, _join(opener.span, end.span))

    # -- entities, synonyms, services, gslots --------------------------------

    def parse_string_list(self, opener: Token, name: Token, what: str) -> list[str]:
        values: list[str] = []
        if self.peek().is_word("end"):
            self.report("P007", f"'{name.value}' needs at least one {what}", _join(opener.span, name.span))
        while self.peek().kind == STRING:
            tok = self.advance()
            if not tok.value.strip():
                self.report("P009", f"{what} must not be empty", tok.span)
            values.append(tok.value)
            if not self.accept_punct(","):
                break
        return values

    def parse_entity(self) -> m.TrainableEntity:
        opener = self.advance()
        name = self.expect_name("entity name")
        examples = self.parse_string_list(opener, name, "example")
        end = self.expect_end(opener)
        return m.TrainableEntity(name.value, tuple(examples), _join(opener.span, end.span))

    def parse_synonym(self) -> m.Synonym:
        opener = self.advance()
        name = self.expect_name("synonym name")
        words = self.parse_string_list(opener, name, "word")
        if len(set(words)) != len(words):
            self.report("P009", f"synonym '{name.value}' lists a word more than once", name.span)
        end = self.expect_end(opener)
        return m.Synonym(name.value, tuple(words), _join(opener.span, end.span))

    def parse_eservice(self) -> m.EServiceHTTP:
        opener = self.advance()
        name = self.expect_name("eservice name")
        fields: dict[str, object] = {}
        while not self.peek().is_word("end") and not self.at_block_boundary():
            key = self.peek()
            if not key.is_word("verb", "host", "path", "port"):
                self.fail("P003", f"unknown keyword {key.describe()} in eservice; expected verb, host, path or port")
            self.advance()
            self.expect_punct(":", f"after '{key.value}'")
            if key.value == "verb":
                tok = self.expect_name("HTTP verb")
                if tok.value not in m.HTTP_VERBS:
                    self.fail("P009", f"unknown HTTP verb '{tok.value}'; expected one of {', '.join(m.HTTP_VERBS)}", tok)
                fields["verb"] = tok.value
            elif key.value == "port":
                tok = self.peek()
                if tok.kind != NUMBER or not tok.value.isdigit() or not 1 <= int(tok.value) <= 65535:
                    self.fail("P009", "port must be an integer between 1 and 65535")
                fields["port"] = int(self.advance().value)
            else:
                fields[key.value] = self.expect_string(key.value).value
        for required in ("verb", "host"):
            if required not in fields:
                self.fail("P009", f"eservice '{name.value}' is missing '{required}'", name)
        if not str(fields["host"]).strip():
            self.fail("P009", f"eservice '{name.value}' has an empty host", name)
        end = self.expect_end(opener)
        return m.EServiceHTTP(
            name.value, fields["verb"], fields["host"], fields.get("path", ""), fields.get("port"),
            _join(opener.span, end.span),
        )

    def parse_slot_type(self) -> str:
        tok = self.expect_name("slot type")
        if tok.value not in m.SLOT_TYPES:
            self.fail("P009", f"unknown slot type '{tok.value}'; expected one of {', '.join(m.SLOT_TYPES)}", tok)
        return tok.value

    def parse_gslot(self) -> m.GSlot:
        name = self.expect_name("global slot name")
        self.expect_punct(":", "after global slot name")
        slot_type = self.parse_slot_type()
        default = None
        if self.accept_punct("="):
            default = self.parse_literal()
        return m.GSlot(name.value, slot_type, default, _join(name.span, self.previous.span))

    def recover_gslot(self, start: int) -> None:
        self.pos = start + 1
        while not self.peek().is_word("end") and not self.at_block_boundary():
            if self.peek().kind == IDENT and self.peek(1).is_punct(":") and self.peek(2).is_word(*m.SLOT_TYPES):
                return
            self.advance()

    # -- values --------------------------------------------------------------

    def parse_literal(self) -> m.Literal:
        tok = self.peek()
        if tok.kind == STRING:
            self.advance()
            return m.Literal(tok.value, tok.span)
        if tok.is_word("true", "false"):
            self.advance()
            return m.Literal(tok.value == "true", tok.span)
        negative = tok.is_punct("-")
        if negative:
            self.advance()
        num = self.peek()
        if num.kind != NUMBER:
            self.fail("P006", f"expected a literal value, found {tok.describe()}", tok)
        self.advance()
        text = ("-" if negative else "") + num.value
        value = float(text) if any(c in num.value for c in ".eE") else int(text)
        return m.Literal(value, _join(tok.span, num.span))

    def parse_value(self) -> m.ValueExpr:
        tok = self.peek()
        if tok.kind in (STRING, NUMBER) or tok.is_punct("-") or tok.is_word("true", "false"):
            return self.parse_literal()
        if tok.is_word("USER", "SYSTEM", "GSLOT"):
            self.advance()
            self.expect_punct(":", f"after '{tok.value}'")
            name = self.peek()
            if name.kind != IDENT:
                self.fail("P006", f"expected a name after '{tok.value}:', found {name.describe()}")
            self.advance()
            span = _join(tok.span, name.span)
            if tok.value == "GSLOT":
                return m.GSlotRef(name.value, span)
            allowed = m.USER_PROPERTIES if tok.value == "USER" else m.SYSTEM_PROPERTIES
            if name.value not in allowed:
                self.fail("P009", f"unknown {tok.value.lower()} property '{name.value}'; expected one of {', '.join(allowed)}", name)
            cls = m.UserProperty if tok.value == "USER" else m.SystemProperty
            return cls(name.value, span)
        if tok.kind == IDENT and tok.value not in RESERVED:
            self.advance()
            if self.accept_punct("."):
                slot = self.expect_name("form slot name")
                return m.FormSlotRef(tok.value, slot.value, _join(tok.span, slot.span))
            # A bare word is a symbolic string constant, e.g. TOKEN.
            return m.Literal(tok.value, tok.span)
        self.fail("P006", f"expected a value, found {tok.describe()}")
        raise AssertionError  # unreachable

    def parse_template(self, terminators: str) -> m.TemplateString:
        parts: list[m.TextPart | m.ExprPart] = []
        first = self.peek()
        while not any(self.peek().is_punct(t) for t in terminators) and self.peek().kind != EOF:
            value = self.parse_value()
            if isinstance(value, m.Literal) and isinstance(value.value, str):
                parts.append(m.TextPart(value.value))
            else:
                parts.append(m.ExprPart(value))
        if not parts:
            self.fail("P007", "text template must not be empty", first)
        return m.TemplateString(tuple(parts))

    # -- dialogues -------------------------------------------------------------

    def parse_dialogue(self) -> m.Dialogue:
        opener = self.advance()
        name = self.expect_name("dialogue name")
        self.expect_word("on", "in dialogue definition")
        self.expect_punct(":", "after 'on'")
        triggers: list[Token] = []
        while self.peek().kind == IDENT and self.peek().value not in RESERVED and not self.peek().is_word("responses"):
            triggers.append(self.advance())
            if not self.accept_punct(","):
                break
        if not triggers:
            self.fail("P007", f"dialogue '{name.value}' needs at least one trigger after 'on:'")
        self.expect_word("responses", "in dialogue definition")
        self.expect_punct(":", "after 'responses'")
        responses: list[m.Response] = []
        skipped = False
        while not self.peek().is_word("end") and not self.at_block_boundary():
            tok = self.peek()
            if tok.is_word("Dialogue"):
                break
            start = self.pos
            try:
                if tok.is_word("Form"):
                    responses.append(self.parse_form())
                elif tok.is_word("ActionGroup"):
                    responses.append(self.parse_action_group())
                else:
                    self.fail("P003", f"unknown keyword {tok.describe()} in responses; expected 'Form' or 'ActionGroup'")
            except _Bail:
                self.recover(start, 2)
                skipped = True
                continue
            self.accept_punct(",")
        # A response that failed to parse was already reported; an empty list
        # here would only be a consequence of it.
        if not responses and not skipped:
            self.report("P007", f"dialogue '{name.value}' has no responses", _join(opener.span, name.span))
        end = self.expect_end(opener)
        return m.Dialogue(
            name.value,
            tuple(t.value for t in triggers),
            tuple(responses),
            _join(opener.span, end.span),
            tuple(t.span for t in triggers),
        )

    def parse_form(self) -> m.Form:
        opener = self.advance()
        name = self.expect_name("form name")
        slots: list[m.FormSlot] = []
        while self.peek().kind == IDENT and self.peek().value not in RESERVED:
            slots.append(self.parse_form_slot())
        if not slots:
            self.report("P007", f"form '{name.value}' has no slots", _join(opener.span, name.span))
        end = self.expect_end(opener)
        return m.Form(name.value, tuple(slots), _join(opener.span, end.span))

    def parse_form_slot(self) -> m.FormSlot:
        name = self.advance()
        self.expect_punct(":", "after form slot name")
        slot_type = self.parse_slot_type()
        self.expect_punct("=", "after form slot type")
        if self.peek().is_word("HRI"):
            source: m.HRISource | m.EServiceSource = self.parse_hri()
        else:
            call = self.parse_service_call(require_path=True)
            source = m.EServiceSource(call)
        return m.FormSlot(name.value, slot_type, source, _join(name.span, self.previous.span))

    def parse_hri(self) -> m.HRISource:
        self.advance()
        self.expect_punct("(", "after 'HRI'")
        ask = self.parse_template(",)")
        extraction: m.Extraction = m.FromText()
        if self.accept_punct(",") and not self.peek().is_punct(")"):
            extraction = self.parse_extraction()
            self.accept_punct(",")
        self.expect_punct(")", "to close 'HRI('")
        return m.HRISource(ask, extraction)

    def parse_extraction(self) -> m.Extraction:
        self.expect_punct("[", "to open the extraction list")
        tok = self.peek()
        if tok.is_word("PE", "TE") and self.peek(1).is_punct(":"):
            ref = self.parse_entity_ref()
            self.accept_punct(",")
            self.expect_punct("]", "to close the extraction list")
            return m.FromEntity(ref)
        if tok.is_word("PE", "TE", "S"):
            self.fail("P004", f"malformed entity reference in extraction list after '{tok.value}'", self.peek(1))
        mappings: list[m.IntentValue] = []
        while not self.peek().is_punct("]"):
            intent = self.expect_name("intent name")
            self.expect_punct("=", "after intent name in value mapping")
            value = self.parse_literal()
            mappings.append(m.IntentValue(intent.value, value, _join(intent.span, value.span or intent.span)))
            if not self.accept_punct(","):
                break
        if not mappings:
            self.fail("P007", "extraction list must not be empty")
        self.expect_punct("]", "to close the extraction list")
        return m.FromIntent(tuple(mappings))

    def parse_service_call(self, require_path: bool) -> m.ServiceCall:
        service = self.expect_name("eservice name")
        self.expect_punct("(", f"after '{service.value}'")
        groups: dict[str, list[tuple[str, m.ValueExpr]]] = {g: [] for g in m.PARAM_GROUPS}
        while not self.peek().is_punct(")"):
            group = self.peek()
            if not group.is_word(*m.PARAM_GROUPS):
                self.fail("P003", f"unknown parameter group {group.describe()}; expected one of {', '.join(m.PARAM_GROUPS)}")
            self.advance()
            self.expect_punct("=", f"after '{group.value}'")
            self.expect_punct("[", f"to open '{group.value}' parameters")
            while not self.peek().is_punct("]"):
                key = self.peek()
                if key.kind != IDENT:
                    self.fail("P006", f"expected parameter name, found {key.describe()}")
                self.advance()
                self.expect_punct("=", f"after parameter '{key.value}'")
                groups[group.value].append((key.value, self.parse_value()))
                if not self.accept_punct(","):
                    break
            self.expect_punct("]", f"to close '{group.value}' parameters")
            if not self.accept_punct(","):
                break
        self.expect_punct(")", "to close the service call")
        response_path = None
        if self.peek().is_punct("["):
            self.advance()
            segments = [self.expect_name("response path segment").value]
            while self.accept_punct("."):
                segments.append(self.expect_name("response path segment").value)
            self.expect_punct("]", "to close the response path")
            response_path = ".".join(segments)
        elif require_path:
            self.fail("P006", f"expected '[response.path]' after the call to '{service.value}'")
        return m.ServiceCall(
            service.value,
            tuple(groups["query"]), tuple(groups["path"]), tuple(groups["header"]), tuple(groups["body"]),
            response_path,
            _join(service.span, self.previous.span),
        )

    def parse_action_group(self) -> m.ActionGroup:
        opener = self.advance()
        name = self.expect_name("action group name")
        actions: list[m.Action] = []
        while not self.peek().is_word("end") and not self.at_block_boundary():
            tok = self.peek()
            if tok.kind == IDENT and tok.value in _LEVELS:
                break
            actions.append(self.parse_action())
        if not actions:
            self.report("P007", f"action group '{name.value}' has no actions", _join(opener.span, name.span))
        end = self.expect_end(opener)
        return m.ActionGroup(name.value, tuple(actions), _join(opener.span, end.span))

    def parse_action(self) -> m.Action:
        tok = self.peek()
        if tok.is_word("Speak"):
            self.advance()
            self.expect_punct("(", "after 'Speak'")
            text = self.parse_template(")")
            self.expect_punct(")", "to close 'Speak('")
            return m.SpeakAction(text, _join(tok.span, self.previous.span))
        if tok.is_word("FireEvent"):
            self.advance()
            self.expect_punct("(", "after 'FireEvent'")
            uri = self.parse_value()
            self.expect_punct(",", "between event uri and message")
            message = self.parse_value()
            self.accept_punct(",")
            self.expect_punct(")", "to close 'FireEvent('")
            return m.FireEventAction(uri, message, _join(tok.span, self.previous.span))
        if tok.is_word("SetGSlot"):
            self.advance()
            self.expect_punct("(", "after 'SetGSlot'")
            name = self.expect_name("global slot name")
            self.expect_punct(",", "after global slot name")
            value = self.parse_value()
            self.accept_punct(",")
            self.expect_punct(")", "to close 'SetGSlot('")
            return m.SetGSlot(name.value, value, _join(tok.span, self.previous.span))
        if tok.is_word("SetFSlot"):
            self.advance()
            self.expect_punct("(", "after 'SetFSlot'")
            form = self.expect_name("form name")
            self.expect_punct(".", "between form and slot name")
            slot = self.expect_name("form slot name")
            self.expect_punct(",", "after form slot")
            value = self.parse_value()
            self.accept_punct(",")
            self.expect_punct(")", "to close 'SetFSlot('")
            return m.SetFSlot(form.value, slot.value, value, _join(tok.span, self.previous.span))
        if (
            tok.kind == IDENT and tok.value not in RESERVED and self.peek(1).is_punct("(")
            and (self.peek(2).is_punct(")") or self.peek(2).is_word(*m.PARAM_GROUPS))
        ):
            call = self.parse_service_call(require_path=False)
            return m.RESTCallAction(call, call.span)
        self.fail("P003", f"unknown keyword {tok.describe()}; expected an action (Speak, FireEvent, SetGSlot, SetFSlot or a service call)")
        raise AssertionError  # unreachable


def parse_with_diagnostics(source: str, label: str = "<input>") -> tuple[m.Model | None, list[Diagnostic]]:
    """Parse *source*, returning ``(model, [])`` or ``(None, diagnostics)``."""
    parser = _Parser(source, label)
    try:
        model = parser.parse_document()
    except _Bail:  # pragma: no cover - every _Bail is caught inside a block
        model = None
    except RecursionError:
        parser.diagnostics.append(error("P006", "input nested too deeply", parser.peek().span))
        model = None
    diagnostics = sort_diagnostics(parser.diagnostics)
    if any(d.is_error for d in diagnostics):
        return None, diagnostics
    return model, diagnostics


def parse(source: str, label: str = "<input>") -> m.Model:
    """Parse dFlow text; raises :class:`DFlowSyntaxError` listing every error found."""
    model, diagnostics = parse_with_diagnostics(source, label)
    if model is None:
        raise DFlowSyntaxError(diagnostics)
    return model
