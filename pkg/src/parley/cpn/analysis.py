"""Verification verdicts over a bounded reachability graph.

Every question here is only meaningful on a complete graph; the functions
raise AnalysisInconclusive when a bound was tripped, and verify() folds
that into a report with unresolved (None) verdicts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from ..errors import AnalysisInconclusive
from .kernel import backward_reachable
from .net import ColoredPetriNet
from .reach import (
    DEFAULT_MAX_NODES,
    DEFAULT_MAX_TOKENS,
    ReachabilityGraph,
    build_reachability_graph,
)


@dataclass(frozen=True)
class Deadlock:
    node: int
    marking: dict  # sparse place -> tokens view
    witness: tuple[str, ...]  # shortest firing sequence from the root


def _require_bounded(graph: ReachabilityGraph) -> None:
    if not graph.bounded:
        raise AnalysisInconclusive(
            f"reachability graph truncated ({graph.bound_reason}); "
            f"raise the bounds to analyze this net"
        )


def detect_deadlocks(graph: ReachabilityGraph) -> list[Deadlock]:
    """Reachable non-final markings with no enabled transition."""
    _require_bounded(graph)
    finals = set(graph.final_nodes())
    out = []
    degrees = graph.out_degrees()
    for node, degree in enumerate(degrees):
        if degree == 0 and node not in finals:
            out.append(
                Deadlock(
                    node=node,
                    marking=graph.net.marking_to_dict(graph.marking(node)),
                    witness=graph.path_to(node),
                )
            )
    return out


def check_termination(graph: ReachabilityGraph) -> bool:
    """True iff every reachable marking can still reach a final marking."""
    _require_bounded(graph)
    seeds = graph.final_nodes()
    if not seeds:
        return False
    mark = backward_reachable(
        graph.node_count, graph.edge_src, graph.edge_dst, seeds
    )
    return all(mark)


def find_dead_transitions(graph: ReachabilityGraph) -> list[str]:
    """Transitions that fire on no edge of the graph, in net order."""
    _require_bounded(graph)
    fired = set(graph.edge_t)
    return [
        t.id
        for i, t in enumerate(graph.net.transitions)
        if i not in fired
    ]


@dataclass
class VerificationReport:
    protocol_id: str
    bounded: bool
    bound_reason: str
    node_count: int
    edge_count: int
    max_nodes: int
    max_tokens: int
    elapsed: float
    kernel: str
    deadlock_free: Optional[bool]
    deadlocks: tuple[Deadlock, ...]
    proper_termination: Optional[bool]
    dead_transitions: tuple[str, ...]

    @property
    def ok(self) -> bool:
        """Verification passes: complete graph, no deadlock, proper end.

        Dead transitions are reported but do not fail verification: they
        are unreachable behavior (e.g. statically false guards), not an
        error state the conversation can get stuck in.
        """
        return bool(
            self.bounded and self.deadlock_free and self.proper_termination
        )

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol_id,
            "ok": self.ok,
            "bounded": self.bounded,
            "bound_reason": self.bound_reason,
            "nodes": self.node_count,
            "edges": self.edge_count,
            "bounds": {
                "max_nodes": self.max_nodes,
                "max_tokens": self.max_tokens,
            },
            "elapsed_seconds": round(self.elapsed, 6),
            "kernel": self.kernel,
            "deadlock_free": self.deadlock_free,
            "deadlocks": [
                {
                    "node": d.node,
                    "marking": d.marking,
                    "witness": list(d.witness),
                }
                for d in self.deadlocks
            ],
            "proper_termination": self.proper_termination,
            "dead_transitions": list(self.dead_transitions),
        }


def verify(
    net: ColoredPetriNet,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> VerificationReport:
    """Build the bounded graph and evaluate all three verdict families."""
    started = time.monotonic()
    graph = build_reachability_graph(net, max_nodes, max_tokens)
    if not graph.bounded:
        return VerificationReport(
            protocol_id=net.id,
            bounded=False,
            bound_reason=graph.bound_reason,
            node_count=graph.node_count,
            edge_count=graph.edge_count,
            max_nodes=max_nodes,
            max_tokens=max_tokens,
            elapsed=time.monotonic() - started,
            kernel=graph.kernel,
            deadlock_free=None,
            deadlocks=(),
            proper_termination=None,
            dead_transitions=(),
        )
    deadlocks = detect_deadlocks(graph)
    proper = check_termination(graph)
    dead = find_dead_transitions(graph)
    return VerificationReport(
        protocol_id=net.id,
        bounded=True,
        bound_reason="",
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        max_nodes=max_nodes,
        max_tokens=max_tokens,
        elapsed=time.monotonic() - started,
        kernel=graph.kernel,
        deadlock_free=not deadlocks,
        deadlocks=tuple(deadlocks),
        proper_termination=proper,
        dead_transitions=tuple(dead),
    )
