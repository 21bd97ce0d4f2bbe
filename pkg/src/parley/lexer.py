"""Line-oriented tokenizer shared by the document parser and guard parser."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

# Longest-match first.
_OPS = ("!=", "<=", ">=", "->", "=", "<", ">")
_PUNCT = "{}():,"

_ESCAPES = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | string | op | punct
    value: str | int
    line: int
    col: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-"


def strip_comment(line: str) -> str:
    """Drop a # comment, respecting string literals."""
    quote = None
    i = 0
    while i < len(line):
        ch = line[i]
        if quote:
            if ch == "\\":
                i += 1
            elif ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            return line[:i]
        i += 1
    return line


def tokenize_line(text: str, line_no: int) -> list[Token]:
    """Tokenize one physical line (comment already stripped)."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        col = i + 1
        if ch in " \t":
            i += 1
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            tokens.append(Token("ident", text[i:j], line_no, col))
            i = j
            continue
        if ch.isdigit() or (
            ch == "-" and i + 1 < n and text[i + 1].isdigit()
        ):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", int(text[i:j]), line_no, col))
            i = j
            continue
        if ch in "'\"":
            j = i + 1
            out = []
            while j < n and text[j] != ch:
                if text[j] == "\\":
                    j += 1
                    if j >= n or text[j] not in _ESCAPES:
                        raise ParseError("bad escape in string", line_no, j)
                    out.append(_ESCAPES[text[j]])
                else:
                    out.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line_no, col)
            tokens.append(Token("string", "".join(out), line_no, col))
            i = j + 1
            continue
        matched = False
        for op in _OPS:
            if text.startswith(op, i):
                kind = "punct" if op == "->" else "op"
                tokens.append(Token(kind, op, line_no, col))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, line_no, col))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line_no, col)
    return tokens


def quote_string(value: str) -> str:
    """Render a string literal the tokenizer will read back verbatim."""
    out = value.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'
