"""parley: declarative interaction protocols, verified and executable.

Parse protocol documents, check well-formedness, translate to colored
Petri nets, verify behavioural properties by bounded reachability, and
execute protocols deterministically across mock agents and services.
"""

from .errors import (
    AnalysisInconclusive,
    DataspaceError,
    GuardError,
    ParleyError,
    ParseError,
    ProtocolValidationError,
    RegistryError,
    SessionError,
    TranslationError,
)
from .guards import eval_guard, parse_guard, render_guard
from .model import (
    ACTS,
    CommunicativeAct,
    ComplexMessage,
    Finding,
    InteractionProtocol,
    MessageOption,
    Mode,
    Operator,
    PrimitiveMessage,
    Role,
    RoleKind,
    Severity,
    ValidationReport,
    VarDecl,
    VarType,
    validate_well_formedness,
)
from .parser import parse_protocol
from .serializer import serialize_protocol
from .cpn import (
    ColoredPetriNet,
    Marking,
    ReachabilityGraph,
    VerificationReport,
    build_reachability_graph,
    to_dot,
    to_pnml,
    translate,
    verify,
)
from .runtime import (
    AclMessage,
    AgentId,
    AgentKind,
    ConformanceResult,
    Content,
    Dataspace,
    EventKind,
    ExecutionTrace,
    Session,
    SkillInfo,
    Status,
    Task,
    TraceEvent,
    announce,
    create_session,
    run_to_completion,
    step,
    trace_conformance,
    trace_to_marking,
    wire_xml,
)
from .services import (
    Registry,
    SelectionPolicy,
    ServiceDescription,
    ServiceStub,
    StubEntry,
    fetch_attributes,
    select_service,
)

__version__ = "0.1.0"

__all__ = [
    "ACTS",
    "AclMessage",
    "AgentId",
    "AgentKind",
    "AnalysisInconclusive",
    "ColoredPetriNet",
    "CommunicativeAct",
    "ComplexMessage",
    "ConformanceResult",
    "Content",
    "Dataspace",
    "DataspaceError",
    "EventKind",
    "ExecutionTrace",
    "Finding",
    "GuardError",
    "InteractionProtocol",
    "Marking",
    "MessageOption",
    "Mode",
    "Operator",
    "ParleyError",
    "ParseError",
    "PrimitiveMessage",
    "ProtocolValidationError",
    "ReachabilityGraph",
    "Registry",
    "RegistryError",
    "Role",
    "RoleKind",
    "SelectionPolicy",
    "ServiceDescription",
    "ServiceStub",
    "Session",
    "SessionError",
    "Severity",
    "SkillInfo",
    "Status",
    "StubEntry",
    "Task",
    "TraceEvent",
    "TranslationError",
    "ValidationReport",
    "VarDecl",
    "VarType",
    "VerificationReport",
    "announce",
    "build_reachability_graph",
    "create_session",
    "eval_guard",
    "fetch_attributes",
    "parse_guard",
    "parse_protocol",
    "render_guard",
    "run_to_completion",
    "select_service",
    "serialize_protocol",
    "step",
    "to_dot",
    "to_pnml",
    "trace_conformance",
    "trace_to_marking",
    "translate",
    "verify",
    "wire_xml",
    "__version__",
]
