"""Bounded reachability graphs over translated nets."""

from __future__ import annotations

import time
from array import array
from dataclasses import dataclass, field

from ..guards import eval_guard
from .kernel import KERNEL_KIND, explore
from .net import ColoredPetriNet, Marking

DEFAULT_MAX_NODES = 200_000
DEFAULT_MAX_TOKENS = 8


@dataclass
class ReachabilityGraph:
    net: ColoredPetriNet
    nodes: list  # list[bytes], discovery order; node 0 is the root
    edge_src: list
    edge_t: list
    edge_dst: list
    parent_node: list
    parent_trans: list
    bounded: bool
    bound_reason: str
    max_nodes: int
    max_tokens: int
    elapsed: float
    kernel: str
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    def marking(self, node: int) -> Marking:
        return Marking(tuple(self.nodes[node]))

    def index_of(self, marking: Marking) -> int | None:
        """Node index of a marking, or None if it was not reached."""
        if not self._index:
            self._index = {m: i for i, m in enumerate(self.nodes)}
        return self._index.get(bytes(marking.counts))

    def final_nodes(self) -> list[int]:
        finals = {bytes(m.counts) for m in self.net.finals}
        return [i for i, m in enumerate(self.nodes) if m in finals]

    def path_to(self, node: int) -> tuple[str, ...]:
        """Shortest firing sequence from the root to a node."""
        ids = []
        cur = node
        while cur != 0:
            ids.append(self.net.transitions[self.parent_trans[cur]].id)
            cur = self.parent_node[cur]
        ids.reverse()
        return tuple(ids)

    def out_degrees(self) -> list[int]:
        out = [0] * len(self.nodes)
        for s in self.edge_src:
            out[s] += 1
        return out


def compile_net(net: ColoredPetriNet):
    """Flatten a net into the arc arrays the kernel consumes."""
    pidx = net.place_index()
    tidx = net.transition_index()
    num_t = len(net.transitions)
    ins: list[list[tuple[int, int]]] = [[] for _ in range(num_t)]
    outs: list[list[tuple[int, int]]] = [[] for _ in range(num_t)]
    for arc in net.arcs:
        if arc.source in pidx:
            ins[tidx[arc.target]].append((pidx[arc.source], arc.weight))
        else:
            outs[tidx[arc.source]].append((pidx[arc.target], arc.weight))
    tin_off = array("i", [0])
    tin_place = array("i")
    tin_w = array("i")
    tout_off = array("i", [0])
    tout_place = array("i")
    tout_w = array("i")
    for t in range(num_t):
        for p, w in sorted(ins[t]):
            tin_place.append(p)
            tin_w.append(w)
        tin_off.append(len(tin_place))
        for p, w in sorted(outs[t]):
            tout_place.append(p)
            tout_w.append(w)
        tout_off.append(len(tout_place))
    enabled = bytes(
        1 if eval_guard(t.guard, net.env) else 0 for t in net.transitions
    )
    return tin_off, tin_place, tin_w, tout_off, tout_place, tout_w, enabled


def build_reachability_graph(
    net: ColoredPetriNet,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> ReachabilityGraph:
    """Explore the marking graph breadth-first under the given bounds.

    Guards are evaluated statically against the net's environment (the
    protocol's declared variable defaults): transitions whose guard is
    false are never enabled, and guards referencing an unbound variable
    fail closed.
    """
    if not 1 <= max_tokens <= 255:
        raise ValueError("max_tokens must be within 1..255")
    if max_nodes < 1:
        raise ValueError("max_nodes must be positive")
    arrays = compile_net(net)
    initial = bytes(net.initial.counts)
    started = time.monotonic()
    (
        nodes, edge_src, edge_t, edge_dst,
        parent_node, parent_trans, bounded, reason,
    ) = explore(initial, len(net.places), *arrays[:6], arrays[6],
                max_nodes, max_tokens)
    elapsed = time.monotonic() - started
    return ReachabilityGraph(
        net=net,
        nodes=nodes,
        edge_src=edge_src,
        edge_t=edge_t,
        edge_dst=edge_dst,
        parent_node=parent_node,
        parent_trans=parent_trans,
        bounded=bounded,
        bound_reason=reason,
        max_nodes=max_nodes,
        max_tokens=max_tokens,
        elapsed=elapsed,
        kernel=KERNEL_KIND,
    )
