"""Canonical serializer: the inverse of the parser.

Sections are emitted in a fixed order (roles, vars, messages, flow), one
entry per line, modes always explicit, so serialization is a pure function
of the protocol value: parse(serialize(ip)) == ip and serializing the
re-parsed document reproduces the same bytes.
"""

from __future__ import annotations

import re

from .guards import render_guard
from .lexer import quote_string
from .model import (
    ComplexMessage,
    InteractionProtocol,
    PrimitiveMessage,
    Role,
    RoleKind,
    VarDecl,
)

_BARE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


def _keyword(text: str) -> str:
    return text if _BARE.match(text) else quote_string(text)


def _literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return quote_string(value)


def _role_line(role: Role) -> str:
    suffix = ""
    if role.kind is RoleKind.WEB_SERVICE and role.keywords:
        suffix = "(" + ", ".join(_keyword(k) for k in role.keywords) + ")"
    return f"  {role.name}: {role.kind.value}{suffix}"


def _var_line(var: VarDecl) -> str:
    default = ""
    if var.default is not None:
        default = f" = {_literal(var.default)}"
    return f"  {var.name}: {var.type.value}{default}"


def _pm_line(pm: PrimitiveMessage, indent: str) -> str:
    parts = [
        f"{indent}pm {pm.name}: {pm.sender} -> {pm.receiver}",
        pm.act.value,
        pm.option.mode.value,
    ]
    if pm.option.guard is not None:
        parts.append(f"guard {render_guard(pm.option.guard)}")
    if pm.option.deadline is not None:
        parts.append(f"deadline {pm.option.deadline}")
    return " ".join(parts)


def serialize_protocol(ip: InteractionProtocol) -> str:
    out: list[str] = [f"protocol {ip.id}", ""]

    out.append("roles {")
    for role in ip.roles:
        out.append(_role_line(role))
    out.append("}")

    if ip.vars:
        out.append("")
        out.append("vars {")
        for var in ip.vars:
            out.append(_var_line(var))
        out.append("}")

    out.append("")
    out.append("messages {")
    for step in ip.messages:
        if isinstance(step, ComplexMessage):
            out.append(f"  cm {step.name} {step.operator.value} {{")
            for pm in step.branches:
                out.append(_pm_line(pm, "    "))
            out.append("  }")
        else:
            out.append(_pm_line(step, "  "))
    out.append("}")

    if ip.flow:
        out.append("")
        out.append("flow {")
        for a, b in ip.flow:
            out.append(f"  ({a}, {b})")
        out.append("}")

    out.append("")
    return "\n".join(out)
