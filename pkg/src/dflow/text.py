"""Text normalization shared by the validator and the runtime matcher."""

from __future__ import annotations

import re

_SPACES = re.compile(r"\s+")
_TERMINAL = ".!?,;:"


def normalize(text: str) -> str:
    """Lowercase, trim, collapse whitespace and drop terminal punctuation."""
    text = _SPACES.sub(" ", text.strip().lower())
    return text.rstrip(_TERMINAL).rstrip()


def tokens(text: str) -> list[str]:
    text = normalize(text)
    return text.split(" ") if text else []


_NO_SPACE_BEFORE = tuple(".,!?;:)]}'\"")
_NO_SPACE_AFTER = tuple("([{'\"/")


def join_pieces(pieces: list[str]) -> str:
    """Concatenate template pieces, adding one space where two words would
    otherwise run together (``'The weather for' + 'Athens'``)."""
    out = ""
    for piece in pieces:
        if not piece:
            continue
        if (
            out
            and not out[-1].isspace()
            and not piece[0].isspace()
            and not piece.startswith(_NO_SPACE_BEFORE)
            and not out.endswith(_NO_SPACE_AFTER)
        ):
            out += " "
        out += piece
    return out
