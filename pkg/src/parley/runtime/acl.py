"""Agent-communication messages exchanged during a session.

Every message carries one of the protocol's communicative acts, an XML
content payload, a conversation id, and correlation tokens (reply-with /
in-reply-to). The XML wire form is canonical, so hashing it gives the
stable payload digest recorded in traces.
"""

from __future__ import annotations

import hashlib
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

from ..model import CommunicativeAct


class AgentKind(Enum):
    INTEGRATOR = "integrator"
    ENTERPRISE = "enterprise"
    SERVICE = "service"


@dataclass(frozen=True)
class AgentId:
    name: str
    kind: AgentKind


@dataclass(frozen=True)
class Task:
    """Work announced by the Integrator with the protocol's first message."""

    description: str = ""
    requirements: Tuple[str, ...] = ()
    constraints: Tuple[str, ...] = ()


Binding = Tuple[str, Union[int, bool, str, float]]

# Content kinds: "step" is a protocol message step; the rest are fabric
# traffic (service discovery/invocation) and bookkeeping notices.
CONTENT_KINDS = (
    "step",
    "probe",
    "probe-reply",
    "invoke",
    "invoke-reply",
    "cancel",
    "notice",
)


@dataclass(frozen=True)
class Content:
    kind: str = "step"
    step: Optional[str] = None
    branch: Optional[str] = None
    subset: Optional[Tuple[str, ...]] = None
    bindings: Tuple[Binding, ...] = ()
    body: str = ""
    task: Optional[Task] = None


@dataclass(frozen=True)
class AclMessage:
    performative: CommunicativeAct
    sender: AgentId
    receiver: AgentId
    content: Content
    conversation_id: str
    reply_with: Optional[str] = None
    in_reply_to: Optional[str] = None
    language: str = "xml"


def _binding_type(value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    return "str"


def _binding_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def wire_xml(msg: AclMessage) -> str:
    """Canonical XML rendering of a message (attribute order is fixed)."""
    root = ET.Element(
        "message",
        performative=msg.performative.value,
        sender=msg.sender.name,
        receiver=msg.receiver.name,
        conversation=msg.conversation_id,
    )
    root.set("reply-with", msg.reply_with or "")
    root.set("in-reply-to", msg.in_reply_to or "")
    content = ET.SubElement(root, "content", kind=msg.content.kind)
    if msg.content.step:
        content.set("step", msg.content.step)
    if msg.content.branch:
        content.set("branch", msg.content.branch)
    if msg.content.subset:
        content.set("subset", " ".join(msg.content.subset))
    for name, value in msg.content.bindings:
        el = ET.SubElement(
            content, "binding", name=name, type=_binding_type(value)
        )
        el.text = _binding_text(value)
    if msg.content.body:
        ET.SubElement(content, "body").text = msg.content.body
    if msg.content.task is not None:
        task = ET.SubElement(
            content, "task", description=msg.content.task.description
        )
        for req in msg.content.task.requirements:
            ET.SubElement(task, "requirement").text = req
        for con in msg.content.task.constraints:
            ET.SubElement(task, "constraint").text = con
    return ET.tostring(root, encoding="unicode")


def payload_digest(msg: AclMessage) -> str:
    """Short stable digest of the wire form, recorded in trace files."""
    return hashlib.sha256(wire_xml(msg).encode("utf-8")).hexdigest()[:16]
