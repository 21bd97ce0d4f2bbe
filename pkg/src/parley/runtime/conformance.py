"""Replay of execution traces against the protocol's net.

A trace conforms when its visible events map onto a firing sequence of
the translated net: a Sent event fires the matching send transition, a
Handled event the matching receive (or, for synchronous steps, the
rendezvous — whose Sent is silent because the exchange is atomic).
Structural transitions without a message counterpart — AND fork/join,
OR subset choice and join — are closed over silently between visible
firings. A trace that ends Completed must silently close onto the final
marking.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from ..errors import SessionError
from ..guards import eval_guard
from ..cpn.net import ColoredPetriNet, Marking, TransitionPhase
from .acl import AclMessage
from .trace import EventKind, ExecutionTrace

SILENT_CLOSURE_BOUND = 4096


@dataclass(frozen=True)
class ConformanceResult:
    ok: bool
    reason: str = ""
    event_index: Optional[int] = None


class _Replay:
    def __init__(self, net: ColoredPetriNet):
        self.net = net
        index = net.place_index()
        self.inputs = {
            t.id: [
                (index[a.source], a.weight)
                for a in net.arcs
                if a.target == t.id
            ]
            for t in net.transitions
        }
        self.outputs = {
            t.id: [
                (index[a.target], a.weight)
                for a in net.arcs
                if a.source == t.id
            ]
            for t in net.transitions
        }
        self.guards = {t.id: t.guard for t in net.transitions}
        self.emit_map: dict[tuple, str] = {}
        self.recv_map: dict[tuple, str] = {}
        self.rzv_map: dict[tuple, str] = {}
        self.silent: list[str] = []
        for t in net.transitions:
            key = (t.step, t.branch, t.subset)
            if t.phase is TransitionPhase.SEND:
                self.emit_map[key] = t.id
            elif t.phase is TransitionPhase.CHOICE and t.branch is not None:
                self.emit_map[key] = t.id
            elif t.phase is TransitionPhase.RECEIVE:
                self.recv_map[key] = t.id
            elif t.phase is TransitionPhase.RENDEZVOUS:
                self.rzv_map[key] = t.id
            else:
                self.silent.append(t.id)
        self.marking = list(net.initial.counts)
        self.env = dict(net.env)

    def _enabled(self, tid: str, marking) -> bool:
        if not eval_guard(self.guards[tid], self.env):
            return False
        return all(marking[p] >= w for p, w in self.inputs[tid])

    def _fire(self, tid: str, marking) -> list:
        out = list(marking)
        for p, w in self.inputs[tid]:
            out[p] -= w
        for p, w in self.outputs[tid]:
            out[p] += w
        return out

    def _close_until(self, want) -> bool:
        """Fire silent transitions (bounded BFS) until `want(marking)`
        holds; commits the found marking."""
        start = tuple(self.marking)
        if want(start):
            return True
        seen = {start}
        queue = deque([start])
        while queue and len(seen) <= SILENT_CLOSURE_BOUND:
            marking = queue.popleft()
            for tid in self.silent:
                if not self._enabled(tid, marking):
                    continue
                nxt = tuple(self._fire(tid, marking))
                if nxt in seen:
                    continue
                if want(nxt):
                    self.marking = list(nxt)
                    return True
                seen.add(nxt)
                queue.append(nxt)
        return False

    def fire_visible(self, tid: str) -> bool:
        if not self._close_until(
            lambda m: self._enabled(tid, list(m))
        ):
            return False
        self.marking = self._fire(tid, self.marking)
        return True

    def close_to_final(self) -> bool:
        finals = {f.counts for f in self.net.finals}
        return self._close_until(lambda m: m in finals)


def _message_key(msg: AclMessage) -> tuple:
    return (msg.content.step, msg.content.branch, msg.content.subset)


def _replay_events(trace: ExecutionTrace, net: ColoredPetriNet):
    """Run the replay; returns (replay, failure reason, failing index)."""
    replay = _Replay(net)
    for i, event in enumerate(trace):
        if event.kind is EventKind.VAR_WRITE:
            name, value, _ = event.var
            replay.env[name] = value
            continue
        msg = event.message
        if msg is None or msg.content.kind != "step":
            continue
        key = _message_key(msg)
        if event.kind is EventKind.SENT:
            if key in replay.rzv_map:
                continue  # atomic: fires at the Handled event
            tid = replay.emit_map.get(key)
            if tid is None:
                return replay, (
                    f"sent message {key!r} has no send transition"
                ), i
            if not replay.fire_visible(tid):
                return replay, (
                    f"send transition {tid!r} not enabled at this point"
                ), i
        elif event.kind is EventKind.HANDLED:
            tid = replay.recv_map.get(key) or replay.rzv_map.get(key)
            if tid is None:
                return replay, (
                    f"handled message {key!r} has no receive transition"
                ), i
            if not replay.fire_visible(tid):
                return replay, (
                    f"receive transition {tid!r} not enabled at this point"
                ), i
    return replay, "", None


def trace_conformance(
    trace: ExecutionTrace, net: ColoredPetriNet
) -> ConformanceResult:
    """Check that a trace is a firing sequence of the net."""
    replay, reason, index = _replay_events(trace, net)
    if reason:
        return ConformanceResult(False, reason, index)
    completed = any(
        e.kind is EventKind.STATUS_CHANGE
        and e.status
        and e.status[1] == "Completed"
        for e in trace
    )
    if completed and not replay.close_to_final():
        return ConformanceResult(
            False,
            "completed trace does not close onto the final marking",
            len(trace) - 1,
        )
    return ConformanceResult(True)


def trace_to_marking(
    trace: ExecutionTrace, net: ColoredPetriNet
) -> Marking:
    """Replay a trace and return the marking it stops in.

    Silent transitions that can still fire afterwards are closed greedily
    (deterministically, in transition-id order) so the result is the
    quiescent marking the run left the net in.
    """
    replay, reason, index = _replay_events(trace, net)
    if reason:
        raise SessionError(
            f"trace does not replay onto the net at event {index}: "
            f"{reason}"
        )
    # Quiesce: fire silent transitions until none is enabled.
    for _ in range(SILENT_CLOSURE_BOUND):
        fired = False
        for tid in replay.silent:
            if replay._enabled(tid, replay.marking):
                replay.marking = replay._fire(tid, replay.marking)
                fired = True
                break
        if not fired:
            break
    return Marking(tuple(replay.marking))
