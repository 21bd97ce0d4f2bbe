from .net import (
    Arc,
    ColoredPetriNet,
    Marking,
    Place,
    PlaceKind,
    Transition,
    TransitionPhase,
    validate_net,
)
from .translate import translate
from .reach import ReachabilityGraph, build_reachability_graph
from .analysis import (
    Deadlock,
    VerificationReport,
    check_termination,
    detect_deadlocks,
    find_dead_transitions,
    verify,
)
from .export import to_dot, to_pnml

__all__ = [
    "Arc",
    "ColoredPetriNet",
    "Marking",
    "Place",
    "PlaceKind",
    "Transition",
    "TransitionPhase",
    "validate_net",
    "translate",
    "ReachabilityGraph",
    "build_reachability_graph",
    "Deadlock",
    "VerificationReport",
    "check_termination",
    "detect_deadlocks",
    "find_dead_transitions",
    "verify",
    "to_dot",
    "to_pnml",
]
