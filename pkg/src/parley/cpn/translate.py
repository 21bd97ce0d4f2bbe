"""Translation of interaction protocols to colored Petri nets.

Rules (the structural equations the tests re-derive follow directly):

* Role chains. Every role owns a chain of role-state places, one hop per
  participation item (sending a step = one item; receiving a primitive,
  XOR or OR step = one item; receiving an AND = one item per branch
  addressed to the role, in branch order). A role with k items gets k+1
  places ``role:<name>:0..k``; a role with no items keeps a single place.

* Primitive async: ``send:<pm>`` (sender hop, produces into ``buf:<pm>``)
  and ``recv:<pm>`` (consumes buffer + receiver hop) — 2 transitions,
  1 buffer. Primitive sync: a single ``rzv:<pm>`` rendezvous consuming
  both role states — 1 transition, no buffer.

* XOR: one transition per branch sharing the sender place (a free-choice
  conflict): async branches ``choice:<cm>.<pm>`` plus ``recv:<cm>.<pm>``,
  sync branches a single rendezvous. No extra control places.

* AND: ``fork:<cm>`` scatters the sender token over per-branch control
  places, each branch sends (or rendezvouses) from its control place, and
  ``join:<cm>`` collects the per-branch done places — 2m control places,
  2 extra transitions.

* OR: an exclusive choice over every non-empty branch subset (2^m − 1,
  refused above m = 16). Subset q gets its own ``fork:<cm>#q<mask>``
  (guarded by the conjunction of its branch guards), per-branch sends,
  buffers and done places, and a ``join:<cm>#q<mask>``. A receiver
  consumes its subset branches in branch order through ``mid:`` places.

The initial marking puts one token in each role start place; the single
final marking puts one token in each role end place.
"""

from __future__ import annotations

from ..errors import TranslationError
from ..guards import And, GuardExpr
from ..model import (
    ComplexMessage,
    InteractionProtocol,
    Mode,
    Operator,
    PrimitiveMessage,
    participation,
)
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

MAX_OR_BRANCHES = 16


class _Builder:
    def __init__(self, ip: InteractionProtocol):
        self.ip = ip
        self.places: dict[str, Place] = {}
        self.transitions: dict[str, Transition] = {}
        self.arcs: list[Arc] = []
        items = participation(ip)
        # (role, step_index, action, branch) -> chain position
        self.slot: dict[tuple, int] = {}
        self.chain_len: dict[str, int] = {}
        for role in ip.roles:
            role_items = items[role.name]
            self.chain_len[role.name] = len(role_items)
            for j, item in enumerate(role_items):
                key = (role.name, item.step_index, item.action, item.branch)
                self.slot[key] = j
            for j in range(max(len(role_items), 1) + (1 if role_items else 0)):
                self.place(
                    f"role:{role.name}:{j}",
                    PlaceKind.ROLE_STATE,
                    owner=role.name,
                )

    def place(self, pid: str, kind: PlaceKind, owner=None,
              domain: str = "unit") -> str:
        if pid not in self.places:
            self.places[pid] = Place(pid, kind, owner, domain)
        return pid

    def buffer(self, pid: str) -> str:
        return self.place(pid, PlaceKind.MESSAGE_BUFFER, domain="record")

    def control(self, pid: str) -> str:
        return self.place(pid, PlaceKind.CONTROL)

    def transition(self, tid: str, phase: TransitionPhase, step: str,
                   branch=None, subset=None, guard=None) -> str:
        label = f"{branch or step}/{phase.value}"
        self.transitions[tid] = Transition(
            tid, label, phase, step, branch, subset, guard
        )
        return tid

    def arc(self, source: str, target: str, weight: int = 1) -> None:
        self.arcs.append(Arc(source, target, weight))

    def role_place(self, role: str, pos: int) -> str:
        return f"role:{role}:{pos}"

    def hop(self, role: str, step_index: int, action: str, branch=None):
        """(current place, next place) for one participation item."""
        j = self.slot[(role, step_index, action, branch)]
        return (self.role_place(role, j), self.role_place(role, j + 1))


def _conjunction(guards: list[GuardExpr | None]) -> GuardExpr | None:
    present = [g for g in guards if g is not None]
    if not present:
        return None
    if len(present) == 1:
        return present[0]
    return And(tuple(present))


def _wire_pm(b: _Builder, idx: int, pm: PrimitiveMessage) -> None:
    src, dst = b.hop(pm.sender, idx, "send")
    rin, rout = b.hop(pm.receiver, idx, "recv")
    if pm.option.mode is Mode.SYNC:
        t = b.transition(
            f"rzv:{pm.name}", TransitionPhase.RENDEZVOUS, pm.name,
            guard=pm.option.guard,
        )
        b.arc(src, t)
        b.arc(rin, t)
        b.arc(t, dst)
        b.arc(t, rout)
        return
    buf = b.buffer(f"buf:{pm.name}")
    t_send = b.transition(
        f"send:{pm.name}", TransitionPhase.SEND, pm.name,
        guard=pm.option.guard,
    )
    b.arc(src, t_send)
    b.arc(t_send, dst)
    b.arc(t_send, buf)
    t_recv = b.transition(
        f"recv:{pm.name}", TransitionPhase.RECEIVE, pm.name
    )
    b.arc(buf, t_recv)
    b.arc(rin, t_recv)
    b.arc(t_recv, rout)


def _wire_xor(b: _Builder, idx: int, cm: ComplexMessage) -> None:
    src, dst = b.hop(cm.sender, idx, "send")
    for pm in cm.branches:
        rin, rout = b.hop(pm.receiver, idx, "recv")
        if pm.option.mode is Mode.SYNC:
            t = b.transition(
                f"rzv:{cm.name}.{pm.name}", TransitionPhase.RENDEZVOUS,
                cm.name, branch=pm.name, guard=pm.option.guard,
            )
            b.arc(src, t)
            b.arc(rin, t)
            b.arc(t, dst)
            b.arc(t, rout)
            continue
        buf = b.buffer(f"buf:{cm.name}.{pm.name}")
        t_send = b.transition(
            f"choice:{cm.name}.{pm.name}", TransitionPhase.CHOICE,
            cm.name, branch=pm.name, guard=pm.option.guard,
        )
        b.arc(src, t_send)
        b.arc(t_send, dst)
        b.arc(t_send, buf)
        t_recv = b.transition(
            f"recv:{cm.name}.{pm.name}", TransitionPhase.RECEIVE,
            cm.name, branch=pm.name,
        )
        b.arc(buf, t_recv)
        b.arc(rin, t_recv)
        b.arc(t_recv, rout)


def _wire_and(b: _Builder, idx: int, cm: ComplexMessage) -> None:
    src, dst = b.hop(cm.sender, idx, "send")
    fork = b.transition(f"fork:{cm.name}", TransitionPhase.FORK, cm.name)
    b.arc(src, fork)
    dones = []
    for pm in cm.branches:
        go = b.control(f"ctl:{cm.name}.{pm.name}:go")
        done = b.control(f"ctl:{cm.name}.{pm.name}:done")
        dones.append(done)
        b.arc(fork, go)
        rin, rout = b.hop(pm.receiver, idx, "recv", pm.name)
        if pm.option.mode is Mode.SYNC:
            t = b.transition(
                f"rzv:{cm.name}.{pm.name}", TransitionPhase.RENDEZVOUS,
                cm.name, branch=pm.name, guard=pm.option.guard,
            )
            b.arc(go, t)
            b.arc(rin, t)
            b.arc(t, done)
            b.arc(t, rout)
            continue
        buf = b.buffer(f"buf:{cm.name}.{pm.name}")
        t_send = b.transition(
            f"send:{cm.name}.{pm.name}", TransitionPhase.SEND,
            cm.name, branch=pm.name, guard=pm.option.guard,
        )
        b.arc(go, t_send)
        b.arc(t_send, done)
        b.arc(t_send, buf)
        t_recv = b.transition(
            f"recv:{cm.name}.{pm.name}", TransitionPhase.RECEIVE,
            cm.name, branch=pm.name,
        )
        b.arc(buf, t_recv)
        b.arc(rin, t_recv)
        b.arc(t_recv, rout)
    join = b.transition(f"join:{cm.name}", TransitionPhase.JOIN, cm.name)
    for done in dones:
        b.arc(done, join)
    b.arc(join, dst)


def _wire_or(b: _Builder, idx: int, cm: ComplexMessage) -> None:
    m = len(cm.branches)
    src, dst = b.hop(cm.sender, idx, "send")
    receivers: dict[str, tuple[str, str]] = {}
    for pm in cm.branches:
        if pm.receiver not in receivers:
            receivers[pm.receiver] = b.hop(pm.receiver, idx, "recv")
    for mask in range(1, 1 << m):
        chosen = [
            pm for i, pm in enumerate(cm.branches) if mask & (1 << i)
        ]
        subset = tuple(pm.name for pm in chosen)
        tag = f"{cm.name}#q{mask}"
        fork = b.transition(
            f"fork:{tag}", TransitionPhase.CHOICE, cm.name, subset=subset,
            guard=_conjunction([pm.option.guard for pm in chosen]),
        )
        b.arc(src, fork)
        # Receiver paths: hop through mid places in branch order.
        path: dict[str, list[str]] = {}
        for receiver, (rin, rout) in receivers.items():
            mine = [pm for pm in chosen if pm.receiver == receiver]
            if not mine:
                continue
            stops = [rin]
            for j in range(1, len(mine)):
                stops.append(b.control(f"mid:{tag}:{receiver}:{j}"))
            stops.append(rout)
            path[receiver] = stops
        progress = {receiver: 0 for receiver in path}
        dones = []
        for pm in chosen:
            go = b.control(f"ctl:{tag}.{pm.name}:go")
            done = b.control(f"ctl:{tag}.{pm.name}:done")
            dones.append(done)
            b.arc(fork, go)
            stops = path[pm.receiver]
            at = progress[pm.receiver]
            progress[pm.receiver] += 1
            rin, rout = stops[at], stops[at + 1]
            if pm.option.mode is Mode.SYNC:
                t = b.transition(
                    f"rzv:{tag}.{pm.name}", TransitionPhase.RENDEZVOUS,
                    cm.name, branch=pm.name, subset=subset,
                    guard=pm.option.guard,
                )
                b.arc(go, t)
                b.arc(rin, t)
                b.arc(t, done)
                b.arc(t, rout)
                continue
            buf = b.buffer(f"buf:{tag}.{pm.name}")
            t_send = b.transition(
                f"send:{tag}.{pm.name}", TransitionPhase.SEND,
                cm.name, branch=pm.name, subset=subset,
                guard=pm.option.guard,
            )
            b.arc(go, t_send)
            b.arc(t_send, done)
            b.arc(t_send, buf)
            t_recv = b.transition(
                f"recv:{tag}.{pm.name}", TransitionPhase.RECEIVE,
                cm.name, branch=pm.name, subset=subset,
            )
            b.arc(buf, t_recv)
            b.arc(rin, t_recv)
            b.arc(t_recv, rout)
        join = b.transition(
            f"join:{tag}", TransitionPhase.JOIN, cm.name, subset=subset
        )
        for done in dones:
            b.arc(done, join)
        b.arc(join, dst)


def translate(ip: InteractionProtocol) -> ColoredPetriNet:
    """Translate a well-formed protocol into its colored Petri net."""
    for step in ip.messages:
        if (
            isinstance(step, ComplexMessage)
            and step.operator is Operator.OR
            and len(step.branches) > MAX_OR_BRANCHES
        ):
            raise TranslationError(
                f"OR message {step.name!r} has {len(step.branches)} "
                f"branches; refusing to expand beyond {MAX_OR_BRANCHES}"
            )
    b = _Builder(ip)
    for idx, step in enumerate(ip.messages):
        if isinstance(step, PrimitiveMessage):
            _wire_pm(b, idx, step)
        elif step.operator is Operator.XOR:
            _wire_xor(b, idx, step)
        elif step.operator is Operator.AND:
            _wire_and(b, idx, step)
        else:
            _wire_or(b, idx, step)

    places = tuple(sorted(b.places.values(), key=lambda p: p.id))
    transitions = tuple(sorted(b.transitions.values(), key=lambda t: t.id))
    arcs = tuple(sorted(b.arcs, key=lambda a: (a.source, a.target)))
    index = {p.id: i for i, p in enumerate(places)}
    initial = [0] * len(places)
    final = [0] * len(places)
    for role in ip.roles:
        initial[index[f"role:{role.name}:0"]] = 1
        final[index[f"role:{role.name}:{b.chain_len[role.name]}"]] = 1
    net = ColoredPetriNet(
        id=ip.id,
        places=places,
        transitions=transitions,
        arcs=arcs,
        initial=Marking(tuple(initial)),
        finals=(Marking(tuple(final)),),
        env=ip.initial_env(),
    )
    validate_net(net)
    return net
