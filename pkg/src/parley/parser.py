"""Parser for the protocol document format.

The format is line-oriented::

    protocol <id>

    roles {
      <name>: process
      <name>: service(<keyword>, ...)
    }

    vars {
      <name>: int|bool|str [= <literal>]
    }

    messages {
      pm <name>: <sender> -> <receiver> <act> [sync|async]
                 [guard <expr>] [deadline <ticks>]
      cm <name> XOR|OR|AND {
        pm <name>: ...
      }
    }

    flow {
      (<role>, <role>)
    }

`roles` and `messages` are required; `vars` and `flow` are optional. When
`flow` is omitted it is inferred as the (sender, receiver) projection of the
message steps. `#` starts a comment. Inside a pm line, `deadline` is a
reserved word: it always terminates the guard region.

`parse_protocol` raises ParseError for syntax problems (with 1-based
line:col) and, unless validation is disabled, ProtocolValidationError when
the document parses but breaks a well-formedness rule.
"""

from __future__ import annotations

from .errors import GuardError, ParseError, ProtocolValidationError
from .guards import parse_guard_tokens
from .lexer import Token, strip_comment, tokenize_line
from .model import (
    ACTS,
    ComplexMessage,
    InteractionProtocol,
    MessageOption,
    MessageStep,
    Mode,
    Operator,
    PrimitiveMessage,
    Role,
    RoleKind,
    VarDecl,
    VarType,
    message_pairs,
    validate_well_formedness,
)

_SECTIONS = ("roles", "vars", "messages", "flow")


class _Line:
    def __init__(self, number: int, tokens: list[Token]):
        self.number = number
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(
                f"unexpected end of line"
                + (f", expected {expected}" if expected else ""),
                self.number,
                (self.tokens[-1].col + 1) if self.tokens else 1,
            )
        self.pos += 1
        return tok

    def expect_punct(self, value: str) -> Token:
        tok = self.take(f"'{value}'")
        if tok.kind != "punct" or tok.value != value:
            raise ParseError(
                f"expected '{value}', got {tok.value!r}", tok.line, tok.col
            )
        return tok

    def expect_ident(self, what: str) -> Token:
        tok = self.take(what)
        if tok.kind != "ident":
            raise ParseError(
                f"expected {what}, got {tok.value!r}", tok.line, tok.col
            )
        return tok

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(
                f"unexpected trailing {tok.value!r}", tok.line, tok.col
            )

    def is_exactly(self, value: str) -> bool:
        return (
            len(self.tokens) == 1
            and self.tokens[0].value == value
        )


def _lines(source: str) -> list[_Line]:
    out = []
    for i, raw in enumerate(source.splitlines(), start=1):
        text = strip_comment(raw)
        tokens = tokenize_line(text, i)
        if tokens:
            out.append(_Line(i, tokens))
    return out


class _DocParser:
    def __init__(self, source: str):
        self.lines = _lines(source)
        self.index = 0

    def _eof_error(self, expected: str) -> ParseError:
        last = self.lines[-1].number if self.lines else 1
        return ParseError(f"unexpected end of input, expected {expected}",
                          last, 1)

    def next_line(self, expected: str) -> _Line:
        if self.index >= len(self.lines):
            raise self._eof_error(expected)
        line = self.lines[self.index]
        self.index += 1
        return line

    def parse(self) -> InteractionProtocol:
        header = self.next_line("'protocol <id>'")
        kw = header.expect_ident("'protocol'")
        if kw.value != "protocol":
            raise ParseError(
                f"document must start with 'protocol', got {kw.value!r}",
                kw.line,
                kw.col,
            )
        proto_id = header.expect_ident("protocol id").value
        header.expect_end()

        sections: dict[str, object] = {}
        while self.index < len(self.lines):
            line = self.next_line("a section")
            name_tok = line.expect_ident("section name")
            name = str(name_tok.value)
            if name not in _SECTIONS:
                raise ParseError(
                    f"unknown section {name!r}", name_tok.line, name_tok.col
                )
            if name in sections:
                raise ParseError(
                    f"duplicate section {name!r}", name_tok.line, name_tok.col
                )
            line.expect_punct("{")
            line.expect_end()
            parser = getattr(self, f"_parse_{name}")
            sections[name] = parser()

        for required in ("roles", "messages"):
            if required not in sections:
                raise self._eof_error(f"a {required!r} section")

        roles: tuple[Role, ...] = sections["roles"]  # type: ignore
        messages: tuple[MessageStep, ...] = sections["messages"]  # type: ignore
        flow = sections.get("flow")
        if flow is None:
            flow = message_pairs(messages)
        return InteractionProtocol(
            id=str(proto_id),
            roles=roles,
            vars=sections.get("vars", ()),  # type: ignore
            messages=messages,
            flow=flow,  # type: ignore
        )

    def _entries(self, section: str):
        while True:
            line = self.next_line(f"an entry or '}}' closing {section!r}")
            if line.is_exactly("}"):
                return
            yield line

    def _parse_roles(self) -> tuple[Role, ...]:
        roles: list[Role] = []
        seen: set[str] = set()
        for line in self._entries("roles"):
            name_tok = line.expect_ident("role name")
            name = str(name_tok.value)
            if name in seen:
                raise ParseError(
                    f"duplicate role {name!r}", name_tok.line, name_tok.col
                )
            seen.add(name)
            line.expect_punct(":")
            kind_tok = line.expect_ident("'process' or 'service'")
            try:
                kind = RoleKind(str(kind_tok.value))
            except ValueError:
                raise ParseError(
                    f"unknown role kind {kind_tok.value!r}",
                    kind_tok.line,
                    kind_tok.col,
                ) from None
            keywords: tuple[str, ...] = ()
            if line.peek() is not None and line.peek().value == "(":
                line.expect_punct("(")
                kws = []
                while True:
                    tok = line.take("keyword")
                    if tok.kind not in ("ident", "string"):
                        raise ParseError(
                            f"expected keyword, got {tok.value!r}",
                            tok.line,
                            tok.col,
                        )
                    kws.append(str(tok.value))
                    nxt = line.take("',' or ')'")
                    if nxt.value == ")":
                        break
                    if nxt.value != ",":
                        raise ParseError(
                            f"expected ',' or ')', got {nxt.value!r}",
                            nxt.line,
                            nxt.col,
                        )
                keywords = tuple(kws)
                if kind is not RoleKind.WEB_SERVICE:
                    raise ParseError(
                        "keywords are only valid on service roles",
                        name_tok.line,
                        name_tok.col,
                    )
            if kind is RoleKind.WEB_SERVICE and not keywords:
                keywords = (name,)
            line.expect_end()
            roles.append(Role(name, kind, keywords))
        return tuple(roles)

    def _literal(self, line: _Line):
        tok = line.take("literal")
        if tok.kind == "int":
            return int(tok.value)
        if tok.kind == "string":
            return str(tok.value)
        if tok.kind == "ident" and tok.value in ("true", "false"):
            return tok.value == "true"
        raise ParseError(
            f"expected literal, got {tok.value!r}", tok.line, tok.col
        )

    def _parse_vars(self) -> tuple[VarDecl, ...]:
        decls: list[VarDecl] = []
        seen: set[str] = set()
        for line in self._entries("vars"):
            name_tok = line.expect_ident("variable name")
            name = str(name_tok.value)
            if name in seen:
                raise ParseError(
                    f"duplicate variable {name!r}",
                    name_tok.line,
                    name_tok.col,
                )
            seen.add(name)
            line.expect_punct(":")
            type_tok = line.expect_ident("'int', 'bool' or 'str'")
            try:
                var_type = VarType(str(type_tok.value))
            except ValueError:
                raise ParseError(
                    f"unknown variable type {type_tok.value!r}",
                    type_tok.line,
                    type_tok.col,
                ) from None
            default = None
            if line.peek() is not None:
                eq = line.take("'='")
                if eq.value != "=":
                    raise ParseError(
                        f"expected '=', got {eq.value!r}", eq.line, eq.col
                    )
                default = self._literal(line)
            line.expect_end()
            decls.append(VarDecl(name, var_type, default))
        return tuple(decls)

    def _parse_pm(self, line: _Line, seen: set[str]) -> PrimitiveMessage:
        """Parse a pm entry; the leading 'pm' token is already consumed."""
        name_tok = line.expect_ident("message name")
        name = str(name_tok.value)
        if name in seen:
            raise ParseError(
                f"duplicate message name {name!r}",
                name_tok.line,
                name_tok.col,
            )
        seen.add(name)
        line.expect_punct(":")
        sender = str(line.expect_ident("sender role").value)
        line.expect_punct("->")
        receiver = str(line.expect_ident("receiver role").value)
        act_tok = line.expect_ident("communicative act")
        act = ACTS.get(str(act_tok.value))
        if act is None:
            raise ParseError(
                f"unknown communicative act {act_tok.value!r}",
                act_tok.line,
                act_tok.col,
            )
        mode = Mode.ASYNC
        tok = line.peek()
        if tok is not None and tok.kind == "ident" and tok.value in (
            "sync",
            "async",
        ):
            mode = Mode(str(tok.value))
            line.take()
            tok = line.peek()
        guard = None
        if tok is not None and tok.kind == "ident" and tok.value == "guard":
            guard_tok = line.take()
            expr_tokens = []
            while line.peek() is not None and not (
                line.peek().kind == "ident"
                and line.peek().value == "deadline"
            ):
                expr_tokens.append(line.take())
            try:
                guard = parse_guard_tokens(expr_tokens)
            except GuardError as exc:
                raise ParseError(
                    str(exc),
                    getattr(exc, "line", guard_tok.line),
                    getattr(exc, "col", guard_tok.col),
                ) from exc
            tok = line.peek()
        deadline = None
        if tok is not None and tok.kind == "ident" and tok.value == (
            "deadline"
        ):
            line.take()
            ticks = line.take("tick count")
            if ticks.kind != "int":
                raise ParseError(
                    f"deadline expects a tick count, got {ticks.value!r}",
                    ticks.line,
                    ticks.col,
                )
            deadline = int(ticks.value)
        line.expect_end()
        return PrimitiveMessage(
            name,
            sender,
            receiver,
            act,
            MessageOption(mode=mode, guard=guard, deadline=deadline),
        )

    def _parse_messages(self) -> tuple[MessageStep, ...]:
        steps: list[MessageStep] = []
        seen: set[str] = set()
        for line in self._entries("messages"):
            head = line.expect_ident("'pm' or 'cm'")
            if head.value == "pm":
                steps.append(self._parse_pm(line, seen))
            elif head.value == "cm":
                name_tok = line.expect_ident("message name")
                name = str(name_tok.value)
                if name in seen:
                    raise ParseError(
                        f"duplicate message name {name!r}",
                        name_tok.line,
                        name_tok.col,
                    )
                seen.add(name)
                op_tok = line.expect_ident("'XOR', 'OR' or 'AND'")
                try:
                    op = Operator(str(op_tok.value))
                except ValueError:
                    raise ParseError(
                        f"unknown operator {op_tok.value!r}",
                        op_tok.line,
                        op_tok.col,
                    ) from None
                line.expect_punct("{")
                line.expect_end()
                branches: list[PrimitiveMessage] = []
                for branch_line in self._entries(f"cm {name!r}"):
                    branch_head = branch_line.expect_ident("'pm'")
                    if branch_head.value != "pm":
                        raise ParseError(
                            "complex-message branches must be pm entries",
                            branch_head.line,
                            branch_head.col,
                        )
                    branches.append(self._parse_pm(branch_line, seen))
                steps.append(ComplexMessage(name, op, tuple(branches)))
            else:
                raise ParseError(
                    f"expected 'pm' or 'cm', got {head.value!r}",
                    head.line,
                    head.col,
                )
        return tuple(steps)

    def _parse_flow(self) -> tuple[tuple[str, str], ...]:
        pairs: list[tuple[str, str]] = []
        for line in self._entries("flow"):
            line.expect_punct("(")
            a = str(line.expect_ident("role name").value)
            line.expect_punct(",")
            b = str(line.expect_ident("role name").value)
            line.expect_punct(")")
            line.expect_end()
            pairs.append((a, b))
        return tuple(pairs)


def parse_protocol(
    source: str, *, validate: bool = True
) -> InteractionProtocol:
    """Parse a protocol document.

    With validate=True (default) well-formedness errors raise
    ProtocolValidationError; syntax errors always raise ParseError.
    """
    ip = _DocParser(source).parse()
    if validate:
        report = validate_well_formedness(ip)
        if not report.ok:
            raise ProtocolValidationError(report)
    return ip
