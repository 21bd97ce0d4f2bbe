"""Guard expressions: the boolean sub-language attached to messages.

Grammar (operators in increasing binding strength)::

    expr    := and_expr ("or" and_expr)*
    and_expr:= unary ("and" unary)*
    unary   := "not" unary | primary
    primary := "true" | "false" | "(" expr ")" | IDENT cmp literal
    cmp     := "=" | "!=" | "<" | "<=" | ">" | ">="
    literal := INT | "true" | "false" | STRING

Evaluation is fail-closed: a guard that references any variable not bound
in the environment evaluates to false as a whole, and a comparison between
incompatible types is false. Ordering comparisons are defined for ints only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import GuardError
from .lexer import Token, quote_string, tokenize_line

Literal = Union[int, bool, str]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Compare:
    var: str
    op: str
    value: Literal


@dataclass(frozen=True)
class Not:
    operand: "GuardExpr"


@dataclass(frozen=True)
class And:
    operands: tuple["GuardExpr", ...]


@dataclass(frozen=True)
class Or:
    operands: tuple["GuardExpr", ...]


GuardExpr = Union[BoolLit, Compare, Not, And, Or]

_CMP_OPS = {"=", "!=", "<", "<=", ">", ">="}
_ORDERING = {"<", "<=", ">", ">="}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def _error(self, message: str) -> GuardError:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            err = GuardError(f"{message} (at {t.line}:{t.col})")
            err.line, err.col = t.line, t.col
        else:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.col if last else 1
            err = GuardError(f"{message} (at end of guard)")
            err.line, err.col = line, col
        return err

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self._error("unexpected end of guard")
        self.pos += 1
        return tok

    def at_ident(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "ident" and tok.value == word

    def parse_expr(self) -> GuardExpr:
        parts = [self.parse_and()]
        while self.at_ident("or"):
            self.take()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> GuardExpr:
        parts = [self.parse_unary()]
        while self.at_ident("and"):
            self.take()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> GuardExpr:
        if self.at_ident("not"):
            self.take()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> GuardExpr:
        tok = self.peek()
        if tok is None:
            raise self._error("unexpected end of guard")
        if tok.kind == "punct" and tok.value == "(":
            self.take()
            inner = self.parse_expr()
            closing = self.peek()
            if closing is None or closing.value != ")":
                raise self._error("expected ')'")
            self.take()
            return inner
        if tok.kind == "ident" and tok.value in ("true", "false"):
            self.take()
            return BoolLit(tok.value == "true")
        if tok.kind == "ident":
            self.take()
            op = self.peek()
            if op is None or op.kind != "op" or op.value not in _CMP_OPS:
                raise self._error(
                    f"expected comparison operator after {tok.value!r}"
                )
            self.take()
            return Compare(tok.value, op.value, self._literal())
        raise self._error(f"unexpected token {tok.value!r} in guard")

    def _literal(self) -> Literal:
        tok = self.peek()
        if tok is None:
            raise self._error("expected literal")
        if tok.kind == "int":
            self.take()
            return int(tok.value)
        if tok.kind == "string":
            self.take()
            return str(tok.value)
        if tok.kind == "ident" and tok.value in ("true", "false"):
            self.take()
            return tok.value == "true"
        raise self._error(f"expected literal, got {tok.value!r}")


def parse_guard_tokens(tokens: list[Token]) -> GuardExpr:
    """Parse a complete token slice as a guard. Leftover tokens are errors."""
    if not tokens:
        raise GuardError("empty guard expression")
    parser = _Parser(tokens)
    expr = parser.parse_expr()
    if parser.pos != len(tokens):
        raise parser._error("trailing tokens after guard expression")
    return expr


def parse_guard(text: str, line: int = 1) -> GuardExpr:
    return parse_guard_tokens(tokenize_line(text, line))


def guard_vars(expr: GuardExpr) -> frozenset:
    """All variable names the expression references."""
    if isinstance(expr, Compare):
        return frozenset((expr.var,))
    if isinstance(expr, Not):
        return guard_vars(expr.operand)
    if isinstance(expr, (And, Or)):
        out: frozenset = frozenset()
        for part in expr.operands:
            out |= guard_vars(part)
        return out
    return frozenset()


def _same_family(a: Literal, b: Literal) -> bool:
    # bool is a subclass of int; keep the families disjoint on purpose.
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool)
    if isinstance(a, int) or isinstance(b, int):
        return isinstance(a, int) and isinstance(b, int)
    return isinstance(a, str) and isinstance(b, str)


def _eval(expr: GuardExpr, env: Mapping[str, Literal]) -> bool:
    if isinstance(expr, BoolLit):
        return expr.value
    if isinstance(expr, Compare):
        bound = env[expr.var]
        lit = expr.value
        if not _same_family(bound, lit):
            return False
        if expr.op == "=":
            return bound == lit
        if expr.op == "!=":
            return bound != lit
        if isinstance(bound, bool) or not isinstance(bound, int):
            return False  # ordering is int-only
        if expr.op == "<":
            return bound < lit
        if expr.op == "<=":
            return bound <= lit
        if expr.op == ">":
            return bound > lit
        return bound >= lit
    if isinstance(expr, Not):
        return not _eval(expr.operand, env)
    if isinstance(expr, And):
        return all(_eval(part, env) for part in expr.operands)
    return any(_eval(part, env) for part in expr.operands)


def eval_guard(expr: GuardExpr | None, env: Mapping[str, Literal]) -> bool:
    """Evaluate under an environment; missing variables fail the guard."""
    if expr is None:
        return True
    if any(name not in env for name in guard_vars(expr)):
        return False
    return _eval(expr, env)


def _render_literal(value: Literal) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return quote_string(value)


def _level(expr: GuardExpr) -> int:
    if isinstance(expr, Or):
        return 1
    if isinstance(expr, And):
        return 2
    if isinstance(expr, Not):
        return 3
    return 4


def render_guard(expr: GuardExpr) -> str:
    """Canonical text form; parse_guard(render_guard(e)) == e."""

    def child(part: GuardExpr, parent_level: int) -> str:
        text = render_guard(part)
        return f"({text})" if _level(part) < parent_level else text

    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, Compare):
        return f"{expr.var} {expr.op} {_render_literal(expr.value)}"
    if isinstance(expr, Not):
        return f"not {child(expr.operand, 3)}"
    if isinstance(expr, And):
        return " and ".join(child(p, 2) for p in expr.operands)
    return " or ".join(child(p, 1) for p in expr.operands)
