"""Colored Petri net structure produced by the protocol translation.

Markings are count vectors aligned with the net's place order (places are
sorted by id when the net is assembled), which keeps every downstream
artifact — reachability nodes, witness markings, exports — canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..errors import TranslationError
from ..guards import GuardExpr


class PlaceKind(Enum):
    ROLE_STATE = "role-state"
    MESSAGE_BUFFER = "message-buffer"
    CONTROL = "control"


class TransitionPhase(Enum):
    SEND = "send"
    RECEIVE = "receive"
    RENDEZVOUS = "rendezvous"
    FORK = "fork"
    JOIN = "join"
    CHOICE = "choice"


@dataclass(frozen=True)
class Place:
    id: str
    kind: PlaceKind
    owner: Optional[str] = None  # role name for role-state places
    domain: str = "unit"  # token color domain


@dataclass(frozen=True)
class Transition:
    id: str
    label: str
    phase: TransitionPhase
    step: str  # message step name this transition belongs to
    branch: Optional[str] = None  # branch pm name for complex messages
    subset: Optional[tuple[str, ...]] = None  # OR: branch names of the subset
    guard: Optional[GuardExpr] = None


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    weight: int = 1


@dataclass(frozen=True)
class Marking:
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass
class ColoredPetriNet:
    id: str
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[Arc, ...]
    initial: Marking
    finals: tuple[Marking, ...]
    # Variable bindings guards are evaluated under during static analysis.
    env: dict = field(default_factory=dict)

    def place_index(self) -> dict[str, int]:
        return {p.id: i for i, p in enumerate(self.places)}

    def transition_index(self) -> dict[str, int]:
        return {t.id: i for i, t in enumerate(self.transitions)}

    def marking_to_dict(self, marking: Marking) -> dict[str, int]:
        """Sparse view of a marking: only the marked places."""
        return {
            self.places[i].id: count
            for i, count in enumerate(marking.counts)
            if count
        }

    def inputs_of(self, transition_id: str) -> list[Arc]:
        return [a for a in self.arcs if a.target == transition_id]

    def outputs_of(self, transition_id: str) -> list[Arc]:
        return [a for a in self.arcs if a.source == transition_id]


def validate_net(net: ColoredPetriNet) -> None:
    """Structural sanity: raise TranslationError on a malformed net."""
    place_ids = {p.id for p in net.places}
    trans_ids = {t.id for t in net.transitions}
    if place_ids & trans_ids:
        raise TranslationError("place and transition ids overlap")
    seen_arcs = set()
    ins: dict[str, int] = {t: 0 for t in trans_ids}
    outs: dict[str, int] = {t: 0 for t in trans_ids}
    for arc in net.arcs:
        if arc.weight < 1:
            raise TranslationError(f"arc {arc.source}->{arc.target}: "
                                   f"weight {arc.weight}")
        key = (arc.source, arc.target)
        if key in seen_arcs:
            raise TranslationError(f"duplicate arc {key}")
        seen_arcs.add(key)
        if arc.source in place_ids and arc.target in trans_ids:
            ins[arc.target] += 1
        elif arc.source in trans_ids and arc.target in place_ids:
            outs[arc.source] += 1
        else:
            raise TranslationError(
                f"arc {arc.source}->{arc.target} does not connect a place "
                f"and a transition"
            )
    for t in net.transitions:
        if ins[t.id] == 0 or outs[t.id] == 0:
            raise TranslationError(
                f"transition {t.id} must have at least one input and one "
                f"output arc"
            )
    for marking in (net.initial, *net.finals):
        if len(marking) != len(net.places):
            raise TranslationError("marking length does not match places")
        if any(c < 0 for c in marking.counts):
            raise TranslationError("negative token count in marking")
    role_starts = {
        i
        for i, p in enumerate(net.places)
        if p.kind is PlaceKind.ROLE_STATE and p.id.endswith(":0")
    }
    for i, count in enumerate(net.initial.counts):
        expected = 1 if i in role_starts else 0
        if count != expected:
            raise TranslationError(
                f"initial marking must put one token in each role start "
                f"place and none elsewhere (place {net.places[i].id})"
            )
