"""Execution traces: the replayable event log of a session.

Trace records serialize to JSON lines with a fixed field order (tick,
kind, performative, sender, receiver, conversation-id, correlation,
payload-digest), so a trace file is byte-identical across runs with the
same seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple

from .acl import AclMessage, payload_digest


class EventKind(Enum):
    SENT = "Sent"
    DELIVERED = "Delivered"
    HANDLED = "Handled"
    VAR_WRITE = "VarWrite"
    STATUS_CHANGE = "StatusChange"
    DISCOVER = "Discover"


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    kind: EventKind
    message: Optional[AclMessage] = None
    # (name, value, version) for VarWrite events
    var: Optional[Tuple] = None
    # (old status, new status, reason) for StatusChange events
    status: Optional[Tuple] = None
    # (criteria, result service ids) for Discover events
    discover: Optional[Tuple] = None


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class ExecutionTrace:
    """Append-only event log for one conversation."""

    def __init__(self, conversation_id: str):
        self.conversation_id = conversation_id
        self.events: list[TraceEvent] = []

    def append(self, event: TraceEvent) -> TraceEvent:
        self.events.append(event)
        return event

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)

    def __getitem__(self, index):
        return self.events[index]

    def messages(self, kind: EventKind) -> list[AclMessage]:
        return [
            e.message for e in self.events
            if e.kind is kind and e.message is not None
        ]

    def to_records(self) -> list[dict]:
        out = []
        for event in self.events:
            record = {
                "tick": event.tick,
                "kind": event.kind.value,
                "performative": "",
                "sender": "",
                "receiver": "",
                "conversation-id": self.conversation_id,
                "correlation": "",
                "payload-digest": "",
            }
            if event.message is not None:
                msg = event.message
                record["performative"] = msg.performative.value
                record["sender"] = msg.sender.name
                record["receiver"] = msg.receiver.name
                record["correlation"] = (
                    f"{msg.reply_with or '-'}>{msg.in_reply_to or '-'}"
                )
                record["payload-digest"] = payload_digest(msg)
            elif event.var is not None:
                name, value, version = event.var
                record["payload-digest"] = _digest(
                    f"{name}={value!r}#v{version}"
                )
            elif event.status is not None:
                old, new, reason = event.status
                record["payload-digest"] = _digest(
                    f"{old}->{new}:{reason}"
                )
            elif event.discover is not None:
                criteria, results = event.discover
                record["payload-digest"] = _digest(
                    f"{','.join(criteria)};{','.join(results)}"
                )
            out.append(record)
        return out

    def dumps_jsonl(self) -> str:
        lines = [
            json.dumps(record, separators=(", ", ": "))
            for record in self.to_records()
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps_jsonl())
