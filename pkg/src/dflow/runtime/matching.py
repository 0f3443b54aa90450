"""Deterministic phrase matching: the runtime's stand-in for a trained NLU model.

An utterance matches a phrase example when the example's literal words appear
in order and every entity chunk soaks up a non-empty run of tokens between
them. Entity runs are greedy, so ``"weather for" PE:GPE`` captures every token
after ``for``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .. import model as m

_EDGE_PUNCT = ".,!?;:\"()[]{}"


@dataclass(frozen=True)
class Captured:
    """An entity value found in an utterance.

    ``kind`` is a pretrained category (``GPE``), a trainable entity name or a
    synonym name; ``text`` keeps the user's casing.
    """

    kind: str
    text: str
    start: int = 0  # token (or character) position, for ordering only

    @property
    def value(self) -> str:
        return self.text


@dataclass(frozen=True)
class MatchResult:
    intent: str | None
    entities: tuple[Captured, ...] = ()
    score: int = 0
    note: str | None = None

    @property
    def matched(self) -> bool:
        return self.intent is not None


NO_MATCH = MatchResult(None)


def split_tokens(text: str) -> tuple[list[str], list[str]]:
    """Return (normalized tokens, original tokens) for *text*.

    Both lists align; tokens made only of punctuation are dropped.
    """
    norm, orig = [], []
    for raw in text.split():
        stripped = raw.strip(_EDGE_PUNCT)
        if stripped:
            norm.append(stripped.lower())
            orig.append(stripped)
    return norm, orig


@dataclass(frozen=True)
class _Lit:
    token: str


@dataclass(frozen=True)
class _Slot:
    kind: str


@dataclass(frozen=True)
class _Alt:
    kind: str
    options: tuple[tuple[str, ...], ...]


def _pattern(model: m.Model, example: m.PhraseExample) -> tuple:
    items: list = []
    for chunk in example.chunks:
        if isinstance(chunk, m.TextChunk):
            items += [_Lit(t) for t in split_tokens(chunk.text)[0]]
        elif isinstance(chunk, m.PretrainedEntityChunk):
            items.append(_Slot(chunk.ref.category))
        elif isinstance(chunk, m.TrainableEntityChunk):
            items.append(_Slot(chunk.entity))
        else:
            synonym = model.synonym(chunk.synonym)
            words = synonym.words if synonym else ()
            options = {tuple(split_tokens(w)[0]) for w in words} | {(chunk.synonym.lower(),)}
            items.append(_Alt(chunk.synonym, tuple(sorted((o for o in options if o), key=lambda o: (-len(o), o)))))
    return tuple(items)


def match_example(pattern: tuple, norm: list[str], orig: list[str]) -> tuple[int, list[Captured]] | None:
    """Match one compiled example; returns (literal length, captures) or None."""
    n = len(norm)

    @lru_cache(maxsize=None)
    def go(pi: int, ti: int):
        if pi == len(pattern):
            return (0, ()) if ti == n else None
        item = pattern[pi]
        if isinstance(item, _Lit):
            if ti < n and norm[ti] == item.token:
                rest = go(pi + 1, ti + 1)
                if rest is not None:
                    return (rest[0] + len(item.token), rest[1])
            return None
        if isinstance(item, _Alt):
            for option in item.options:
                end = ti + len(option)
                if tuple(norm[ti:end]) == option:
                    rest = go(pi + 1, end)
                    if rest is not None:
                        size = sum(len(t) for t in option)
                        return (rest[0] + size, (Captured(item.kind, item.kind, ti),) + rest[1])
            return None
        for end in range(n, ti, -1):  # greedy: the longest span that still lets the rest match
            rest = go(pi + 1, end)
            if rest is not None:
                return (rest[0], (Captured(item.kind, " ".join(orig[ti:end]), ti),) + rest[1])
        return None

    found = go(0, 0)
    return None if found is None else (found[0], list(found[1]))


def match_trigger(model: m.Model, utterance: str, intents: list[str] | None = None) -> MatchResult:
    """Find the intent whose examples match *utterance* best.

    The winner has the greatest total literal text length. A tie between
    different intents is reported as no match, with a note naming them.
    *intents* restricts the candidates (used for FromIntent extraction).
    """
    norm, orig = split_tokens(normalize_case_kept(utterance))
    if not norm:
        return NO_MATCH
    best: dict[str, tuple[int, list[Captured]]] = {}
    for intent in model.intents:
        if intents is not None and intent.name not in intents:
            continue
        for example in intent.examples:
            found = match_example(_pattern(model, example), norm, orig)
            if found is not None and (intent.name not in best or found[0] > best[intent.name][0]):
                best[intent.name] = found
    if not best:
        return NO_MATCH
    top = max(score for score, _ in best.values())
    winners = [name for name, (score, _) in best.items() if score == top]
    if len(winners) > 1:
        return MatchResult(None, note=f"ambiguous utterance: matches {', '.join(winners)} equally well")
    score, captured = best[winners[0]]
    return MatchResult(winners[0], tuple(captured), score)


def normalize_case_kept(text: str) -> str:
    """Trim, collapse whitespace and drop terminal punctuation, keeping case."""
    text = re.sub(r"\s+", " ", text.strip())
    return text.rstrip(".!?,;:").rstrip()


# -- entity recognition for answers given inside a form -------------------------

_MONTHS = "january|february|march|april|may|june|july|august|september|october|november|december"
_DAYS = "monday|tuesday|wednesday|thursday|friday|saturday|sunday"
_NUMBER_WORDS = "zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|twenty|hundred"

PATTERNS: dict[str, str] = {
    "DATE": (
        rf"today|tomorrow|yesterday|tonight|(?:next|this|last) (?:{_DAYS}|week|month|year)|{_DAYS}"
        rf"|\d{{4}}-\d{{2}}-\d{{2}}|\d{{1,2}}/\d{{1,2}}(?:/\d{{2,4}})?"
        rf"|\d{{1,2}}(?:st|nd|rd|th)? (?:of )?(?:{_MONTHS})|(?:{_MONTHS}) \d{{1,2}}(?:st|nd|rd|th)?"
    ),
    "TIME": r"\d{1,2}:\d{2}(?: ?[ap]\.?m\.?)?|\d{1,2} ?[ap]\.?m\.?|noon|midnight",
    "EMAIL": r"[^@\s]+@[^@\s]+\.[a-z]{2,}",
    "MONEY": r"[$€£] ?\d+(?:\.\d+)?|\d+(?:\.\d+)? ?(?:dollars|euros|pounds|usd|eur)",
    "PERCENT": r"\d+(?:\.\d+)? ?(?:%|percent)",
    "ORDINAL": r"\d+(?:st|nd|rd|th)|first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth",
    "CARDINAL": rf"-?\d+(?:\.\d+)?|{_NUMBER_WORDS}",
}


@dataclass
class Gazetteer:
    """Known surface forms per entity kind, harvested from the model."""

    values: dict[str, set[str]] = field(default_factory=dict)

    @classmethod
    def from_model(cls, model: m.Model) -> Gazetteer:
        g = cls()
        for intent in model.intents:
            for example in intent.examples:
                for chunk in example.chunks:
                    if isinstance(chunk, m.PretrainedEntityChunk):
                        g.add(chunk.ref.category, chunk.ref.sample_values)
        for dialogue in model.dialogues:
            for form in dialogue.forms():
                for slot in form.slots:
                    src = slot.source
                    if isinstance(src, m.HRISource) and isinstance(src.extraction, m.FromEntity):
                        ent = src.extraction.entity
                        if isinstance(ent, m.PretrainedEntityRef):
                            g.add(ent.category, ent.sample_values)
        for entity in model.entities:
            g.add(entity.name, entity.examples)
        for synonym in model.synonyms:
            g.add(synonym.name, synonym.words)
        return g

    def add(self, kind: str, values) -> None:
        self.values.setdefault(kind, set()).update(v for v in values if v.strip())


def find_entities(model: m.Model, text: str, gazetteer: Gazetteer | None = None) -> list[Captured]:
    """Every recognisable entity in *text*, in order of appearance.

    Overlaps resolve to the longer span. Synonym hits report the synonym
    name as their value, like the generated NLU's synonym mapping does.
    """
    gazetteer = gazetteer or Gazetteer.from_model(model)
    spans: list[tuple[int, int, str, str]] = []
    for kind, values in gazetteer.values.items():
        for value in values:
            for hit in re.finditer(rf"(?<!\w){re.escape(value)}(?!\w)", text, re.IGNORECASE):
                shown = kind if model.synonym(kind) is not None else hit.group(0)
                spans.append((hit.start(), hit.end(), kind, shown))
    for kind, pattern in PATTERNS.items():
        for hit in re.finditer(rf"(?<!\w)(?:{pattern})(?!\w)", text, re.IGNORECASE):
            spans.append((hit.start(), hit.end(), kind, hit.group(0)))
    spans.sort(key=lambda s: (s[0], -(s[1] - s[0]), s[2]))
    kept: list[tuple[int, int, str, str]] = []
    for span in spans:
        if any(span[0] < k[1] and k[0] < span[1] and (k[1] - k[0]) > (span[1] - span[0]) for k in kept):
            continue
        kept = [k for k in kept if not (span[0] < k[1] and k[0] < span[1] and (k[1] - k[0]) < (span[1] - span[0]))]
        kept.append(span)
    kept.sort(key=lambda s: (s[0], s[2]))
    return [Captured(kind, shown, start) for start, _, kind, shown in kept]
