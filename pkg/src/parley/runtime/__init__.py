from .acl import AclMessage, AgentId, AgentKind, Content, Task, wire_xml
from .dataspace import Dataspace
from .trace import EventKind, ExecutionTrace, TraceEvent
from .session import (
    Session,
    SkillInfo,
    Status,
    announce,
    create_session,
    run_to_completion,
    step,
)
from .conformance import (
    ConformanceResult,
    trace_conformance,
    trace_to_marking,
)

__all__ = [
    "AclMessage",
    "AgentId",
    "AgentKind",
    "Content",
    "Task",
    "wire_xml",
    "Dataspace",
    "EventKind",
    "ExecutionTrace",
    "TraceEvent",
    "Session",
    "SkillInfo",
    "Status",
    "announce",
    "create_session",
    "run_to_completion",
    "step",
    "ConformanceResult",
    "trace_conformance",
    "trace_to_marking",
]
