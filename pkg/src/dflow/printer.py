"""Canonical pretty-printer for dFlow models."""

from __future__ import annotations

from . import model as m

INDENT = "    "


def quote(text: str, char: str = "'") -> str:
    escaped = text.replace("\\", "\\\\").replace(char, "\\" + char)
    return f"{char}{escaped}{char}"


def format_literal(lit: m.Literal) -> str:
    value = lit.value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return quote(value)


def format_value(expr: m.ValueExpr) -> str:
    if isinstance(expr, m.Literal):
        return format_literal(expr)
    if isinstance(expr, m.FormSlotRef):
        return expr.qualified
    if isinstance(expr, m.GSlotRef):
        return f"GSLOT:{expr.name}"
    if isinstance(expr, m.UserProperty):
        return f"USER:{expr.name}"
    return f"SYSTEM:{expr.name}"


def format_template(template: m.TemplateString) -> str:
    return " ".join(
        quote(p.text) if isinstance(p, m.TextPart) else format_value(p.expr) for p in template.parts
    )


def format_pretrained(ref: m.PretrainedEntityRef) -> str:
    if not ref.sample_values:
        return f"PE:{ref.category}"
    return f"PE:{ref.category}[{', '.join(quote(v) for v in ref.sample_values)}]"


def format_chunk(chunk: m.Chunk) -> str:
    if isinstance(chunk, m.TextChunk):
        return quote(chunk.text, '"')
    if isinstance(chunk, m.PretrainedEntityChunk):
        return format_pretrained(chunk.ref)
    if isinstance(chunk, m.TrainableEntityChunk):
        return f"TE:{chunk.entity}"
    return f"S:{chunk.synonym}"


def format_example(example: m.PhraseExample) -> str:
    return " ".join(format_chunk(c) for c in example.chunks)


def format_call(call: m.ServiceCall) -> str:
    groups = []
    for group, params in call.param_groups():
        if params:
            inner = ", ".join(f"{k}={format_value(v)}" for k, v in params)
            groups.append(f"{group}=[{inner}]")
    text = f"{call.service}({', '.join(groups)})"
    if call.response_path is not None:
        text += f"[{call.response_path}]"
    return text


def format_extraction(extraction: m.Extraction) -> str | None:
    if isinstance(extraction, m.FromText):
        return None
    if isinstance(extraction, m.FromEntity):
        ref = extraction.entity
        inner = format_pretrained(ref) if isinstance(ref, m.PretrainedEntityRef) else f"TE:{ref.entity}"
        return f"[{inner}]"
    return "[" + ", ".join(f"{mv.intent}={format_literal(mv.value)}" for mv in extraction.mappings) + "]"


def format_slot(slot: m.FormSlot) -> str:
    if isinstance(slot.source, m.EServiceSource):
        source = format_call(slot.source.call)
    else:
        args = [format_template(slot.source.ask)]
        extraction = format_extraction(slot.source.extraction)
        if extraction:
            args.append(extraction)
        source = f"HRI({', '.join(args)})"
    return f"{slot.name}: {slot.slot_type} = {source}"


def format_action(action: m.Action) -> str:
    if isinstance(action, m.SpeakAction):
        return f"Speak({format_template(action.text)})"
    if isinstance(action, m.FireEventAction):
        return f"FireEvent({format_value(action.uri)}, {format_value(action.message)})"
    if isinstance(action, m.RESTCallAction):
        return format_call(action.call)
    if isinstance(action, m.SetGSlot):
        return f"SetGSlot({action.gslot}, {format_value(action.value)})"
    return f"SetFSlot({action.form}.{action.slot}, {format_value(action.value)})"


def _comma_lines(items: list[str], depth: int) -> list[str]:
    pad = INDENT * depth
    return [pad + item + ("," if i < len(items) - 1 else "") for i, item in enumerate(items)]


def _triggers(model: m.Model) -> list[str]:
    lines = ["triggers"]
    for trigger in model.triggers:
        if isinstance(trigger, m.Intent):
            lines.append(f"{INDENT}Intent {trigger.name}")
            lines += _comma_lines([format_example(e) for e in trigger.examples], 2)
        else:
            lines.append(f"{INDENT}Event {trigger.name}")
            lines.append(f"{INDENT * 2}uri: {quote(trigger.uri)}")
        lines.append(f"{INDENT}end")
    return lines + ["end"]


def _named_lists(keyword: str, block: str, items) -> list[str]:
    lines = [block]
    for item, values in items:
        lines.append(f"{INDENT}{keyword} {item}")
        lines += _comma_lines([quote(v, '"') for v in values], 2)
        lines.append(f"{INDENT}end")
    return lines + ["end"]


def _eservices(model: m.Model) -> list[str]:
    lines = ["eservices"]
    for svc in model.eservices:
        pad = INDENT * 2
        lines += [
            f"{INDENT}EServiceHTTP {svc.name}",
            f"{pad}verb: {svc.verb}",
            f"{pad}host: {quote(svc.host)}",
            f"{pad}path: {quote(svc.path)}",
        ]
        if svc.port is not None:
            lines.append(f"{pad}port: {svc.port}")
        lines.append(f"{INDENT}end")
    return lines + ["end"]


def _gslots(model: m.Model) -> list[str]:
    lines = ["gslots"]
    for g in model.gslots:
        default = f" = {format_literal(g.default)}" if g.default is not None else ""
        lines.append(f"{INDENT}{g.name}: {g.slot_type}{default}")
    return lines + ["end"]


def _dialogues(model: m.Model) -> list[str]:
    lines = ["dialogues"]
    for d in model.dialogues:
        lines += [
            f"{INDENT}Dialogue {d.name}",
            f"{INDENT * 2}on: {', '.join(d.on)}",
            f"{INDENT * 2}responses:",
        ]
        for i, response in enumerate(d.responses):
            sep = "," if i < len(d.responses) - 1 else ""
            if isinstance(response, m.Form):
                lines.append(f"{INDENT * 3}Form {response.name}")
                lines += [INDENT * 4 + format_slot(s) for s in response.slots]
            else:
                lines.append(f"{INDENT * 3}ActionGroup {response.name}")
                lines += [INDENT * 4 + format_action(a) for a in response.actions]
            lines.append(f"{INDENT * 3}end{sep}")
        lines.append(f"{INDENT}end")
    return lines + ["end"]


def print_model(model: m.Model) -> str:
    """Render *model* as canonical dFlow text (empty string for the empty model)."""
    sections = []
    if model.triggers:
        sections.append(_triggers(model))
    if model.entities:
        sections.append(_named_lists("Entity", "entities", [(e.name, e.examples) for e in model.entities]))
    if model.synonyms:
        sections.append(_named_lists("Synonym", "synonyms", [(s.name, s.words) for s in model.synonyms]))
    if model.eservices:
        sections.append(_eservices(model))
    if model.gslots:
        sections.append(_gslots(model))
    if model.dialogues:
        sections.append(_dialogues(model))
    if not sections:
        return ""
    return "\n\n".join("\n".join(s) for s in sections) + "\n"
