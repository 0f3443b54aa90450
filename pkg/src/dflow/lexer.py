"""Tokenizer for dFlow source text."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, SourceSpan, error

IDENT = "IDENT"
STRING = "STRING"
NUMBER = "NUMBER"
PUNCT = "PUNCT"
EOF = "EOF"

PUNCTUATION = ":,=()[].-"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    span: SourceSpan
    quote: str = ""  # opening quote character of a STRING token

    def is_word(self, *words: str) -> bool:
        return self.kind == IDENT and self.value in words

    def is_punct(self, char: str) -> bool:
        return self.kind == PUNCT and self.value == char

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of input"
        if self.kind == STRING:
            return "string literal"
        return f"'{self.value}'"


def normalize_newlines(source: str) -> str:
    return source.replace("\r\n", "\n").replace("\r", "\n")


def tokenize(source: str, label: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    """Split *source* into tokens. Lexical problems become diagnostics and the
    offending characters are skipped so that parsing can continue."""
    text = normalize_newlines(source)
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span(l0: int, c0: int, l1: int, c1: int) -> SourceSpan:
        return SourceSpan(l0, c0, l1, c1, label)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch in " \t\f\v":
            i += 1
            col += 1
            continue
        if ch == "/" and text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch in "'\"":
            start_col = col
            j = i + 1
            chars: list[str] = []
            closed = False
            while j < n and text[j] != "\n":
                c = text[j]
                if c == "\\" and j + 1 < n and text[j + 1] in ("\\", ch):
                    chars.append(text[j + 1])
                    j += 2
                    continue
                if c == ch:
                    closed = True
                    j += 1
                    break
                chars.append(c)
                j += 1
            col += j - i
            i = j
            sp = span(line, start_col, line, col)
            if not closed:
                diagnostics.append(error("P001", "unterminated string literal", sp))
            tokens.append(Token(STRING, "".join(chars), sp, ch))
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(Token(NUMBER, text[i:j], span(line, col, line, col + j - i)))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token(IDENT, text[i:j], span(line, col, line, col + j - i)))
            col += j - i
            i = j
            continue
        if ch in PUNCTUATION:
            tokens.append(Token(PUNCT, ch, span(line, col, line, col + 1)))
            i += 1
            col += 1
            continue
        diagnostics.append(error("P008", f"invalid character {ch!r}", span(line, col, line, col + 1)))
        i += 1
        col += 1

    tokens.append(Token(EOF, "", span(line, col, line, col)))
    return tokens, diagnostics


def strip_comment(line: str) -> str:
    """Remove a trailing ``//`` comment, leaving string literals intact."""
    quote = ""
    i = 0
    while i < len(line):
        c = line[i]
        if quote:
            if c == "\\":
                i += 2
                continue
            if c == quote:
                quote = ""
        elif c in "'\"":
            quote = c
        elif line.startswith("//", i):
            return line[:i]
        i += 1
    return line


def line_count(source: str) -> int:
    """Number of non-blank lines once comments are stripped."""
    return sum(1 for ln in normalize_newlines(source).split("\n") if strip_comment(ln).strip())
