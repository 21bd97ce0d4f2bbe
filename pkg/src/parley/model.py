"""Object model for interaction protocols.

A protocol is the quadruple (id, roles, message steps, flow relation).
Message steps are either primitive (one directed message) or complex (an
operator over branch messages sharing a sender). Everything here is an
immutable dataclass so protocols compare structurally, which is what the
parse/serialize round-trip law is stated over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from . import guards
from .guards import GuardExpr


class RoleKind(Enum):
    PRIVATE_PROCESS = "process"
    WEB_SERVICE = "service"


class CommunicativeAct(Enum):
    CFP = "cfp"
    INFORM = "inform"
    PROPOSE = "propose"
    ACCEPT_PROPOSAL = "accept-proposal"
    REJECT_PROPOSAL = "reject-proposal"
    REQUEST = "request"
    REFUSE = "refuse"
    AGREE = "agree"
    FAILURE = "failure"
    CANCEL = "cancel"
    NOT_UNDERSTOOD = "not-understood"


ACTS = {act.value: act for act in CommunicativeAct}


class Mode(Enum):
    SYNC = "sync"
    ASYNC = "async"


class Operator(Enum):
    XOR = "XOR"
    OR = "OR"
    AND = "AND"


class VarType(Enum):
    INT = "int"
    BOOL = "bool"
    STR = "str"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Role:
    name: str
    kind: RoleKind = RoleKind.PRIVATE_PROCESS
    # Discovery criteria for service roles; ignored for process roles.
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: VarType
    default: Optional[Union[int, bool, str]] = None


@dataclass(frozen=True)
class MessageOption:
    mode: Mode = Mode.ASYNC
    guard: Optional[GuardExpr] = None
    deadline: Optional[int] = None


@dataclass(frozen=True)
class PrimitiveMessage:
    name: str
    sender: str
    receiver: str
    act: CommunicativeAct
    option: MessageOption = field(default_factory=MessageOption)


@dataclass(frozen=True)
class ComplexMessage:
    name: str
    operator: Operator
    branches: tuple[PrimitiveMessage, ...]

    @property
    def sender(self) -> str:
        return self.branches[0].sender if self.branches else ""


MessageStep = Union[PrimitiveMessage, ComplexMessage]


@dataclass(frozen=True)
class InteractionProtocol:
    id: str
    roles: tuple[Role, ...]
    vars: tuple[VarDecl, ...] = ()
    messages: tuple[MessageStep, ...] = ()
    flow: tuple[tuple[str, str], ...] = ()

    def role_map(self) -> dict[str, Role]:
        return {r.name: r for r in self.roles}

    def var_map(self) -> dict[str, VarDecl]:
        return {v.name: v for v in self.vars}

    def step_map(self) -> dict[str, MessageStep]:
        return {s.name: s for s in self.messages}

    def initial_env(self) -> dict[str, Union[int, bool, str]]:
        """Variable bindings available before any run: declared defaults."""
        return {
            v.name: v.default for v in self.vars if v.default is not None
        }


def branches_of(step: MessageStep) -> tuple[PrimitiveMessage, ...]:
    if isinstance(step, ComplexMessage):
        return step.branches
    return (step,)


def message_pairs(
    messages: tuple[MessageStep, ...]
) -> tuple[tuple[str, str], ...]:
    """(sender, receiver) pairs used by the steps, in first-use order."""
    seen: dict[tuple[str, str], None] = {}
    for step in messages:
        for pm in branches_of(step):
            seen.setdefault((pm.sender, pm.receiver), None)
    return tuple(seen)


def expected_responses(step: MessageStep) -> tuple[int, int]:
    """(min, max) responses the sender may collect for one step instance."""
    if isinstance(step, PrimitiveMessage):
        return (1, 1)
    m = len(step.branches)
    if step.operator is Operator.AND:
        return (m, m)
    if step.operator is Operator.XOR:
        return (1, 1)
    return (1, m)


@dataclass(frozen=True)
class PartItem:
    """One hop in a role's local sequence: send or receive of one step.

    AND receivers get one item per branch addressed to them (consumed in
    branch order); every other shape is a single item per step and role.
    """

    step_index: int
    action: str  # "send" | "recv"
    branch: Optional[str] = None


def participation(ip: InteractionProtocol) -> dict[str, list[PartItem]]:
    """Ordered participation items per role, in document order."""
    items: dict[str, list[PartItem]] = {r.name: [] for r in ip.roles}
    for idx, step in enumerate(ip.messages):
        sender = (
            step.sender if isinstance(step, ComplexMessage) else step.sender
        )
        if sender in items:
            items[sender].append(PartItem(idx, "send"))
        if isinstance(step, PrimitiveMessage):
            if step.receiver in items:
                items[step.receiver].append(PartItem(idx, "recv"))
        elif step.operator is Operator.AND:
            for pm in step.branches:
                if pm.receiver in items:
                    items[pm.receiver].append(PartItem(idx, "recv", pm.name))
        else:  # XOR / OR: one receive item per distinct receiver
            seen: set[str] = set()
            for pm in step.branches:
                if pm.receiver in items and pm.receiver not in seen:
                    seen.add(pm.receiver)
                    items[pm.receiver].append(PartItem(idx, "recv"))
    return items


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    location: str
    detail: str

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "location": self.location,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def errors(self) -> tuple[Finding, ...]:
        return tuple(
            f for f in self.findings if f.severity is Severity.ERROR
        )

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "findings": [f.to_dict() for f in self.findings],
        }


def _iter_compares(expr: GuardExpr) -> Iterator[guards.Compare]:
    if isinstance(expr, guards.Compare):
        yield expr
    elif isinstance(expr, guards.Not):
        yield from _iter_compares(expr.operand)
    elif isinstance(expr, (guards.And, guards.Or)):
        for part in expr.operands:
            yield from _iter_compares(part)


def _literal_type(value: Union[int, bool, str]) -> VarType:
    if isinstance(value, bool):
        return VarType.BOOL
    if isinstance(value, int):
        return VarType.INT
    return VarType.STR


def _check_guard(
    expr: GuardExpr,
    decls: dict[str, VarDecl],
    location: str,
    out: list[Finding],
) -> None:
    for cmp in _iter_compares(expr):
        if cmp.var not in decls:
            out.append(
                Finding(
                    Severity.ERROR,
                    "GUARD_UNDECLARED_VAR",
                    location,
                    f"guard references undeclared variable {cmp.var!r}",
                )
            )
            continue
        declared = decls[cmp.var].type
        if _literal_type(cmp.value) is not declared:
            out.append(
                Finding(
                    Severity.ERROR,
                    "GUARD_TYPE",
                    location,
                    f"{cmp.var} is {declared.value}, compared against "
                    f"{_literal_type(cmp.value).value} literal",
                )
            )
        elif cmp.op in ("<", "<=", ">", ">=") and declared is not VarType.INT:
            out.append(
                Finding(
                    Severity.ERROR,
                    "GUARD_TYPE",
                    location,
                    f"ordering comparison on non-int variable {cmp.var!r}",
                )
            )


def _check_pm(
    pm: PrimitiveMessage,
    role_names: set[str],
    decls: dict[str, VarDecl],
    location: str,
    out: list[Finding],
) -> None:
    for endpoint, value in (("sender", pm.sender), ("receiver", pm.receiver)):
        if value not in role_names:
            out.append(
                Finding(
                    Severity.ERROR,
                    "UNKNOWN_ROLE",
                    location,
                    f"{endpoint} {value!r} is not a declared role",
                )
            )
    if pm.sender == pm.receiver:
        out.append(
            Finding(
                Severity.ERROR,
                "SELF_MESSAGE",
                location,
                f"{pm.sender!r} sends to itself",
            )
        )
    if pm.option.guard is not None:
        _check_guard(pm.option.guard, decls, location, out)
    if pm.option.deadline is not None and pm.option.deadline <= 0:
        out.append(
            Finding(
                Severity.ERROR,
                "DEADLINE_NOT_POSITIVE",
                location,
                f"deadline must be a positive tick count, "
                f"got {pm.option.deadline}",
            )
        )


def validate_well_formedness(ip: InteractionProtocol) -> ValidationReport:
    """Check the semantic rules a parse alone cannot enforce."""
    out: list[Finding] = []
    role_names: set[str] = set()
    for role in ip.roles:
        if role.name in role_names:
            out.append(
                Finding(
                    Severity.ERROR,
                    "DUPLICATE_ROLE",
                    f"roles.{role.name}",
                    "role declared twice",
                )
            )
        role_names.add(role.name)
        if role.kind is RoleKind.WEB_SERVICE and not role.keywords:
            out.append(
                Finding(
                    Severity.WARNING,
                    "SERVICE_NO_KEYWORDS",
                    f"roles.{role.name}",
                    "service role has no discovery keywords; "
                    "the role name is used as the only criterion",
                )
            )
    if len(ip.roles) < 2:
        out.append(
            Finding(
                Severity.ERROR,
                "ROLES_TOO_FEW",
                "roles",
                f"a protocol needs more than one role, got {len(ip.roles)}",
            )
        )
    if len(ip.roles) > 32:
        out.append(
            Finding(
                Severity.ERROR,
                "ROLES_TOO_MANY",
                "roles",
                f"at most 32 roles supported, got {len(ip.roles)}",
            )
        )

    decls: dict[str, VarDecl] = {}
    for var in ip.vars:
        if var.name in decls:
            out.append(
                Finding(
                    Severity.ERROR,
                    "DUPLICATE_VAR",
                    f"vars.{var.name}",
                    "variable declared twice",
                )
            )
        decls[var.name] = var
        if var.default is not None and _literal_type(var.default) is not (
            var.type
        ):
            out.append(
                Finding(
                    Severity.ERROR,
                    "VAR_DEFAULT_TYPE",
                    f"vars.{var.name}",
                    f"default {var.default!r} does not have declared "
                    f"type {var.type.value}",
                )
            )

    if not ip.messages:
        out.append(
            Finding(
                Severity.WARNING,
                "EMPTY_MESSAGES",
                "messages",
                "protocol declares no message steps",
            )
        )

    step_names: set[str] = set()
    for step in ip.messages:
        location = f"messages.{step.name}"
        names = [step.name]
        if isinstance(step, ComplexMessage):
            names.extend(pm.name for pm in step.branches)
        for name in names:
            if name in step_names:
                out.append(
                    Finding(
                        Severity.ERROR,
                        "DUPLICATE_STEP",
                        location,
                        f"message name {name!r} used twice",
                    )
                )
            step_names.add(name)
        if isinstance(step, PrimitiveMessage):
            _check_pm(step, role_names, decls, location, out)
            continue
        m = len(step.branches)
        if m < 2:
            out.append(
                Finding(
                    Severity.ERROR,
                    "CM_TOO_FEW_BRANCHES",
                    location,
                    f"complex message needs more than one branch, got {m}",
                )
            )
        if m > 16:
            out.append(
                Finding(
                    Severity.ERROR,
                    "CM_TOO_MANY_BRANCHES",
                    location,
                    f"at most 16 branches supported, got {m}",
                )
            )
        elif step.operator is Operator.OR and m > 8:
            out.append(
                Finding(
                    Severity.WARNING,
                    "CM_WIDE_OR",
                    location,
                    f"OR over {m} branches expands to {2 ** m - 1} subsets",
                )
            )
        senders = {pm.sender for pm in step.branches}
        if len(senders) > 1:
            out.append(
                Finding(
                    Severity.ERROR,
                    "CM_MIXED_SENDER",
                    location,
                    f"branches must share one sender, got "
                    f"{sorted(senders)}",
                )
            )
        for pm in step.branches:
            _check_pm(
                pm, role_names, decls, f"{location}.{pm.name}", out
            )

    used = set(message_pairs(ip.messages))
    declared_pairs: set[tuple[str, str]] = set()
    for i, (a, b) in enumerate(ip.flow):
        location = f"flow[{i}]"
        if (a, b) in declared_pairs:
            out.append(
                Finding(
                    Severity.WARNING,
                    "FLOW_DUPLICATE_PAIR",
                    location,
                    f"({a}, {b}) declared twice",
                )
            )
        declared_pairs.add((a, b))
        if a == b:
            out.append(
                Finding(
                    Severity.ERROR,
                    "FLOW_SELF_PAIR",
                    location,
                    f"({a}, {b}) relates a role to itself",
                )
            )
        for end in (a, b):
            if end not in role_names:
                out.append(
                    Finding(
                        Severity.ERROR,
                        "FLOW_UNKNOWN_ROLE",
                        location,
                        f"{end!r} is not a declared role",
                    )
                )
        if (a, b) not in used:
            out.append(
                Finding(
                    Severity.WARNING,
                    "FLOW_UNUSED_PAIR",
                    location,
                    f"({a}, {b}) carries no message",
                )
            )
    for pair in message_pairs(ip.messages):
        if pair not in declared_pairs:
            out.append(
                Finding(
                    Severity.ERROR,
                    "FLOW_MISSING_PAIR",
                    "flow",
                    f"messages use {pair} but the flow relation "
                    f"does not declare it",
                )
            )

    return ValidationReport(tuple(out))
