"""Deterministic multi-agent execution of interaction protocols.

A session binds protocol roles to agents (exactly one Integrator plus
Enterprise agents; service roles are served by registry stubs through the
service fabric) and drives the conversation with a discrete-event
scheduler. Delivery order is a deterministic function of the seed: the
queue is keyed by (deliver tick, seeded jitter, sequence number), so two
sessions with the same protocol, bindings and seed produce byte-identical
traces.

Each role walks its participation items in document order, mirroring the
role chain of the translated net: sends are emitted as soon as their
guards pass (XOR picks one enabled branch, OR sends every enabled branch,
AND sends all or blocks), receives consume matching messages and defer
out-of-order arrivals until their item comes up. Unexpected messages get
a not-understood reply and leave the cursor untouched.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from heapq import heappop, heappush
from typing import Optional

from ..errors import SessionError
from ..guards import eval_guard
from ..model import (
    CommunicativeAct,
    ComplexMessage,
    InteractionProtocol,
    Mode,
    Operator,
    PartItem,
    PrimitiveMessage,
    Role,
    RoleKind,
    branches_of,
    expected_responses,
    participation,
)
from ..cpn.net import ColoredPetriNet
from .acl import AclMessage, AgentId, AgentKind, Content, Task
from .dataspace import Dataspace
from .trace import EventKind, ExecutionTrace, TraceEvent

DEFAULT_LATENCY = 1
STEP_BUDGET = 10_000


class Status(Enum):
    RUNNING = "Running"
    COMPLETED = "Completed"
    STUCK = "Stuck"
    DEADLINE_EXPIRED = "DeadlineExpired"


@dataclass(frozen=True)
class SkillInfo:
    available: bool = True
    cost: int = 0


@dataclass
class _Ledger:
    """Response bookkeeping for one complex message sent by the Integrator."""

    step_name: str
    owner_role: str
    minimum: int
    maximum: int
    replies_defined: bool
    tokens: set = field(default_factory=set)
    responded: set = field(default_factory=set)

    @property
    def satisfied(self) -> bool:
        return (
            not self.replies_defined or len(self.responded) >= self.minimum
        )


class _RoleState:
    def __init__(self, role: Role, agent: AgentId, items: list[PartItem]):
        self.role = role
        self.agent = agent
        self.items = items
        self.cursor = 0
        self.emitted: set[int] = set()
        self.pending_sync: dict[int, set] = {}
        self.recv_seq: dict[int, list] = {}
        self.recv_done: dict[int, int] = {}
        self.held: list[AclMessage] = []
        self.pending_corr: list[tuple[str, str]] = []
        self.outgoing_bindings: tuple = ()

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.items)

    def current(self) -> Optional[PartItem]:
        if self.cursor < len(self.items):
            return self.items[self.cursor]
        return None


class Session:
    def __init__(
        self,
        ip: InteractionProtocol,
        net: ColoredPetriNet,
        bindings: dict[str, AgentId],
        seed: int,
        *,
        forced: bool,
        registry=None,
        policy=None,
        retries: int = 1,
        profiles: Optional[dict] = None,
    ):
        self.ip = ip
        self.net = net
        self.seed = seed
        self.rng = random.Random(seed)
        self.conversation_id = f"conv-{ip.id}-s{seed}"
        self.trace = ExecutionTrace(self.conversation_id)
        self.status = Status.RUNNING
        self.announced = False
        self.task: Optional[Task] = None
        self.forced = forced
        self.tick = 0
        self.profiles = profiles or {}
        self.dataspace = Dataspace(ip.vars)
        self.ledgers: dict[int, _Ledger] = {}
        self.deadlines: dict[str, tuple[int, AclMessage]] = {}
        self._queue: list = []
        self._queue_seq = 0
        self._rw_seq = 0
        self._steps_taken = 0

        self._step_index = {s.name: i for i, s in enumerate(ip.messages)}
        items = participation(ip)
        self.bindings = dict(bindings)
        self.states: dict[str, _RoleState] = {}
        self._agent_role: dict[str, str] = {}
        for role in ip.roles:
            agent = self.bindings[role.name]
            self.states[role.name] = _RoleState(role, agent, items[role.name])
            self._agent_role[agent.name] = role.name
        self._send_item: dict[tuple[str, int], int] = {}
        for role_name, role_items in items.items():
            for j, item in enumerate(role_items):
                if item.action == "send":
                    self._send_item[(role_name, item.step_index)] = j
        self._replies_defined = self._compute_replies_defined()

        self.fabric = None
        service_roles = [
            r for r in ip.roles if r.kind is RoleKind.WEB_SERVICE
        ]
        if service_roles:
            from ..services.manager import SelectionPolicy, ServiceFabric

            self.fabric = ServiceFabric(
                self,
                registry,
                policy or SelectionPolicy.MIN_COST,
                retries,
            )
        self._status_event(
            None,
            Status.RUNNING,
            "created (unverified, forced)" if forced else "created",
        )

    # ------------------------------------------------------------------
    # trace and scheduling helpers

    def _log(self, kind: EventKind, msg: AclMessage) -> None:
        self.trace.append(TraceEvent(self.tick, kind, message=msg))

    def _status_event(self, old, new: Status, reason: str) -> None:
        self.status = new
        self.trace.append(
            TraceEvent(
                self.tick,
                EventKind.STATUS_CHANGE,
                status=(old.value if old else None, new.value, reason),
            )
        )

    def next_reply_token(self) -> str:
        self._rw_seq += 1
        return f"rw-{self._rw_seq}"

    def enqueue(self, msg: AclMessage, latency: int = DEFAULT_LATENCY) -> None:
        """Record the Sent event and schedule delivery."""
        self._log(EventKind.SENT, msg)
        self._queue_seq += 1
        jitter = self.rng.randrange(1 << 20)
        heappush(
            self._queue,
            (self.tick + max(latency, 1), jitter, self._queue_seq, msg),
        )

    @property
    def integrator(self) -> AgentId:
        for agent in self.bindings.values():
            if agent.kind is AgentKind.INTEGRATOR:
                return agent
        raise SessionError("no integrator bound")

    # ------------------------------------------------------------------
    # structural helpers

    def _compute_replies_defined(self) -> dict[int, bool]:
        """For each complex step: is its response minimum structurally
        guaranteed?

        Mirrors the runtime's correlation exactly, statically: every
        handled message queues a reply token at its receiver, keyed by
        the (from, to) role pair, and every later emission back along
        that pair answers the oldest queued token. A step whose emission
        count is not fixed (an OR fires one-to-all branches; a choice
        over mixed receivers may address anyone) taints the affected
        queues — tokens flowing through a tainted queue can no longer be
        attributed, so their step is not gated. A complex step is
        "defined" when every token it provably queues is provably
        answered; only then does the session enforce the ledger minimum.
        """
        queues: dict[tuple[str, str], list[int]] = {}
        tainted: set[tuple[str, str]] = set()
        pushed: dict[int, int] = {}
        answered: dict[int, int] = {}
        undefined: set[int] = set()
        expected: dict[int, int] = {}

        for idx, step in enumerate(self.ip.messages):
            sender = step.sender
            if isinstance(step, PrimitiveMessage):
                plan = [(step.receiver, 1)]
                expected[idx] = 1
            elif step.operator is Operator.AND:
                counts: dict[str, int] = {}
                for pm in step.branches:
                    counts[pm.receiver] = counts.get(pm.receiver, 0) + 1
                plan = list(counts.items())
                expected[idx] = len(step.branches)
            else:
                receivers = list(
                    dict.fromkeys(pm.receiver for pm in step.branches)
                )
                if len(receivers) == 1:
                    plan = [(receivers[0], 1)]
                    expected[idx] = 1
                else:
                    plan = []
                    expected[idx] = 0
                    undefined.add(idx)
                    for r in receivers:
                        tainted.add((r, sender))
                        tainted.add((sender, r))
            total = 0
            for receiver, n in plan:
                pop_key = (receiver, sender)
                if pop_key not in tainted:
                    queue = queues.setdefault(pop_key, [])
                    for _ in range(n):
                        if queue:
                            token_owner = queue.pop(0)
                            answered[token_owner] = (
                                answered.get(token_owner, 0) + 1
                            )
                push_key = (sender, receiver)
                if push_key not in tainted:
                    queues.setdefault(push_key, []).extend([idx] * n)
                    total += n
            pushed[idx] = total
            if (
                isinstance(step, ComplexMessage)
                and step.operator is Operator.OR
            ):
                # Beyond the guaranteed first branch, an OR's emission
                # count depends on guards at run time.
                for receiver, _ in plan:
                    tainted.add((sender, receiver))
                    tainted.add((receiver, sender))

        out: dict[int, bool] = {}
        for idx, step in enumerate(self.ip.messages):
            if not isinstance(step, ComplexMessage):
                continue
            out[idx] = (
                idx not in undefined
                and pushed.get(idx, 0) == expected[idx]
                and answered.get(idx, 0) >= pushed.get(idx, 0)
            )
        return out

    def _resolve_branch(
        self, msg: AclMessage
    ) -> Optional[tuple[int, object, PrimitiveMessage]]:
        """(step index, step, branch pm) for a step message, or None."""
        if msg.content.kind != "step" or msg.content.step is None:
            return None
        idx = self._step_index.get(msg.content.step)
        if idx is None:
            return None
        step = self.ip.messages[idx]
        if isinstance(step, PrimitiveMessage):
            if msg.content.branch is not None:
                return None
            return (idx, step, step)
        for pm in step.branches:
            if pm.name == msg.content.branch:
                return (idx, step, pm)
        return None

    def _or_sequence(
        self, state: _RoleState, item_index: int, subset: tuple
    ) -> list[str]:
        """Branch names this role consumes for an OR instance, in order."""
        seq = state.recv_seq.get(item_index)
        if seq is None:
            step = self.ip.messages[state.items[item_index].step_index]
            seq = [
                pm.name
                for pm in step.branches
                if pm.receiver == state.role.name and pm.name in subset
            ]
            state.recv_seq[item_index] = seq
            state.recv_done.setdefault(item_index, 0)
        return seq

    # ------------------------------------------------------------------
    # receiving

    def _match_current(self, state: _RoleState, msg: AclMessage) -> bool:
        item = state.current()
        if item is None or item.action != "recv":
            return False
        resolved = self._resolve_branch(msg)
        if resolved is None:
            return False
        idx, step, pm = resolved
        if idx != item.step_index:
            return False
        if pm.receiver != state.role.name:
            return False
        if msg.performative is not pm.act:
            return False
        if isinstance(step, PrimitiveMessage):
            return True
        if step.operator is Operator.AND:
            return item.branch == pm.name
        if step.operator is Operator.XOR:
            return True
        seq = self._or_sequence(
            state, state.cursor, msg.content.subset or ()
        )
        k = state.recv_done.get(state.cursor, 0)
        return k < len(seq) and seq[k] == pm.name

    def _matches_future(self, state: _RoleState, msg: AclMessage) -> bool:
        resolved = self._resolve_branch(msg)
        if resolved is None:
            return False
        idx, step, pm = resolved
        if pm.receiver != state.role.name:
            return False
        if msg.performative is not pm.act:
            return False
        for j in range(state.cursor, len(state.items)):
            item = state.items[j]
            if item.action != "recv" or item.step_index != idx:
                continue
            if isinstance(step, PrimitiveMessage):
                return True
            if step.operator is Operator.AND:
                if item.branch == pm.name:
                    return True
                continue
            if step.operator is Operator.XOR:
                return True
            # OR: the branch must belong to the instance's fired subset
            # and not be consumed yet.
            seq = self._or_sequence(state, j, msg.content.subset or ())
            k = state.recv_done.get(j, 0)
            if pm.name in seq[k:]:
                return True
        return False

    def _apply_handle(self, state: _RoleState, msg: AclMessage) -> None:
        self._log(EventKind.HANDLED, msg)
        if msg.reply_with:
            state.pending_corr.append((msg.reply_with, msg.sender.name))
        for ledger in self.ledgers.values():
            if (
                ledger.owner_role == state.role.name
                and msg.in_reply_to
                and msg.in_reply_to in ledger.tokens
            ):
                ledger.responded.add(msg.in_reply_to)
        if msg.in_reply_to and msg.in_reply_to in self.deadlines:
            del self.deadlines[msg.in_reply_to]
        idx, step, pm = self._resolve_branch(msg)
        if pm.option.mode is Mode.SYNC:
            sender_state = self.states[pm.sender]
            send_idx = self._send_item[(pm.sender, idx)]
            sender_state.pending_sync.get(send_idx, set()).discard(pm.name)
        item = state.current()
        if (
            isinstance(step, ComplexMessage)
            and step.operator is Operator.OR
        ):
            state.recv_done[state.cursor] = (
                state.recv_done.get(state.cursor, 0) + 1
            )
            seq = state.recv_seq[state.cursor]
            if state.recv_done[state.cursor] >= len(seq):
                state.cursor += 1
        else:
            state.cursor += 1
        del item

    def _not_understood(self, state: _RoleState, msg: AclMessage) -> None:
        reply = AclMessage(
            performative=CommunicativeAct.NOT_UNDERSTOOD,
            sender=state.agent,
            receiver=msg.sender,
            content=Content(
                kind="notice",
                step=msg.content.step,
                branch=msg.content.branch,
                body="unexpected message",
            ),
            conversation_id=self.conversation_id,
            reply_with=self.next_reply_token(),
            in_reply_to=msg.reply_with,
        )
        self.enqueue(reply)

    def handle_message(self, role: str, msg: AclMessage) -> list[AclMessage]:
        """Process one delivered message against a role's state.

        Returns the protocol messages emitted as a consequence. Held
        (early) messages produce nothing yet; unexpected ones produce a
        not-understood reply and leave the cursor unchanged.
        """
        state = self.states[role]
        mark = len(self.trace)
        if self._match_current(state, msg):
            self._apply_handle(state, msg)
            self._settle()
        elif self._matches_future(state, msg):
            state.held.append(msg)
        else:
            self._not_understood(state, msg)
        return [
            e.message
            for e in self.trace[mark:]
            if e.kind is EventKind.SENT and e.message is not None
        ]

    # ------------------------------------------------------------------
    # sending

    def _receiver_ready(self, pm: PrimitiveMessage, step_index: int) -> bool:
        state = self.states[pm.receiver]
        item = state.current()
        return (
            item is not None
            and item.action == "recv"
            and item.step_index == step_index
        )

    def _choose_xor(
        self, state: _RoleState, enabled: list[PrimitiveMessage]
    ) -> tuple[PrimitiveMessage, tuple]:
        """Pick one XOR branch: skill-driven for an Enterprise agent facing
        a propose/refuse decision, seeded-random otherwise."""
        if state.agent.kind is AgentKind.ENTERPRISE and len(enabled) == 2:
            acts = {pm.act for pm in enabled}
            if acts == {CommunicativeAct.PROPOSE, CommunicativeAct.REFUSE}:
                profile = self.profiles.get(state.agent.name, {})
                requirements = self.task.requirements if self.task else ()
                have_all = all(
                    profile.get(req, SkillInfo()).available
                    for req in requirements
                )
                if have_all:
                    pm = next(
                        p
                        for p in enabled
                        if p.act is CommunicativeAct.PROPOSE
                    )
                    cost = sum(
                        profile.get(req, SkillInfo()).cost
                        for req in requirements
                    )
                    return pm, (("cost", cost),)
                pm = next(
                    p for p in enabled if p.act is CommunicativeAct.REFUSE
                )
                return pm, ()
        return enabled[self.rng.randrange(len(enabled))], ()

    def _send_protocol(
        self,
        state: _RoleState,
        step,
        pm: PrimitiveMessage,
        subset: Optional[tuple],
        extra_bindings: tuple = (),
        step_index: int = -1,
    ) -> AclMessage:
        is_cm = isinstance(step, ComplexMessage)
        task = None
        if step_index == 0 and self.task is not None:
            task = self.task
        content = Content(
            kind="step",
            step=step.name,
            branch=pm.name if is_cm else None,
            subset=subset,
            bindings=tuple(state.outgoing_bindings) + tuple(extra_bindings),
            task=task,
        )
        receiver_agent = self.bindings[pm.receiver]
        # Reply correlation: answer the oldest unanswered message from
        # the agent this message is addressed to.
        in_reply_to = None
        for i, (token, peer) in enumerate(state.pending_corr):
            if peer == receiver_agent.name:
                in_reply_to = token
                del state.pending_corr[i]
                break
        msg = AclMessage(
            performative=pm.act,
            sender=state.agent,
            receiver=receiver_agent,
            content=content,
            conversation_id=self.conversation_id,
            reply_with=self.next_reply_token(),
            in_reply_to=in_reply_to,
        )
        self.enqueue(msg)
        if (
            pm.option.deadline is not None
            and state.agent.kind is AgentKind.INTEGRATOR
        ):
            self.deadlines[msg.reply_with] = (
                self.tick + pm.option.deadline,
                msg,
            )
        return msg

    def _emit_item(self, state: _RoleState, idx: int, item: PartItem) -> bool:
        step = self.ip.messages[item.step_index]
        env = self.dataspace.env()
        sent: list[AclMessage] = []
        pending: set = set()
        if isinstance(step, PrimitiveMessage):
            if not eval_guard(step.option.guard, env):
                return False
            sent.append(
                self._send_protocol(
                    state, step, step, None, step_index=item.step_index
                )
            )
            if step.option.mode is Mode.SYNC:
                pending.add(step.name)
        elif step.operator is Operator.AND:
            if not all(
                eval_guard(pm.option.guard, env) for pm in step.branches
            ):
                return False
            for pm in step.branches:
                sent.append(
                    self._send_protocol(
                        state, step, pm, None, step_index=item.step_index
                    )
                )
                if pm.option.mode is Mode.SYNC:
                    pending.add(pm.name)
        elif step.operator is Operator.XOR:
            enabled = [
                pm
                for pm in step.branches
                if eval_guard(pm.option.guard, env)
                and (
                    pm.option.mode is Mode.ASYNC
                    or self._receiver_ready(pm, item.step_index)
                )
            ]
            if not enabled:
                return False
            pm, extra = self._choose_xor(state, enabled)
            sent.append(
                self._send_protocol(
                    state, step, pm, None, extra, item.step_index
                )
            )
            if pm.option.mode is Mode.SYNC:
                pending.add(pm.name)
        else:  # OR: every guard-enabled branch fires
            enabled = [
                pm
                for pm in step.branches
                if eval_guard(pm.option.guard, env)
            ]
            if not enabled:
                return False
            subset = tuple(pm.name for pm in enabled)
            for pm in enabled:
                sent.append(
                    self._send_protocol(
                        state, step, pm, subset, step_index=item.step_index
                    )
                )
                if pm.option.mode is Mode.SYNC:
                    pending.add(pm.name)
        state.emitted.add(idx)
        state.pending_sync[idx] = pending
        if (
            isinstance(step, ComplexMessage)
            and state.agent.kind is AgentKind.INTEGRATOR
        ):
            minimum, maximum = expected_responses(step)
            self.ledgers[item.step_index] = _Ledger(
                step_name=step.name,
                owner_role=state.role.name,
                minimum=min(minimum, len(sent)),
                maximum=maximum,
                replies_defined=self._replies_defined[item.step_index],
                tokens={m.reply_with for m in sent},
            )
        return True

    def _pump(self, state: _RoleState) -> bool:
        moved = False
        while not state.done:
            item = state.current()
            if item.action == "recv":
                break
            idx = state.cursor
            if idx not in state.emitted:
                if not self._emit_item(state, idx, item):
                    break
                moved = True
            if state.pending_sync.get(idx):
                break
            state.cursor += 1
            moved = True
        return moved

    def _rescan_held(self) -> bool:
        moved = False
        for state in self.states.values():
            kept: list[AclMessage] = []
            for msg in state.held:
                if self._match_current(state, msg):
                    self._apply_handle(state, msg)
                    moved = True
                elif self._matches_future(state, msg):
                    kept.append(msg)
                else:
                    # The cursor moved past this message's item: it can
                    # never be consumed now.
                    self._not_understood(state, msg)
                    moved = True
            state.held = kept
        return moved

    def _settle(self) -> None:
        while True:
            moved = False
            for role in self.ip.roles:
                moved |= self._pump(self.states[role.name])
            moved |= self._rescan_held()
            if not moved:
                break

    # ------------------------------------------------------------------
    # dataspace

    def write_var(self, name: str, value) -> int:
        version = self.dataspace.write(name, value)
        self.trace.append(
            TraceEvent(
                self.tick,
                EventKind.VAR_WRITE,
                var=(name, value, version),
            )
        )
        if self.announced and self.status is Status.RUNNING:
            self._settle()
        return version

    def read_var(self, name: str):
        return self.dataspace.read(name)

    # ------------------------------------------------------------------
    # lifecycle

    def _deliverable_work(self) -> bool:
        return bool(self._queue or self.deadlines)

    def _all_done(self) -> tuple[bool, str]:
        if self.fabric is not None and self.fabric.failure:
            return False, self.fabric.failure
        for role in self.ip.roles:
            state = self.states[role.name]
            if not state.done:
                item = state.current()
                step = self.ip.messages[item.step_index]
                if item.action == "send":
                    if state.cursor in state.emitted:
                        return False, (
                            f"role {role.name!r} awaiting sync handling "
                            f"of {step.name!r}"
                        )
                    return False, (
                        f"role {role.name!r} blocked sending {step.name!r} "
                        f"(guard or choice disabled)"
                    )
                return False, (
                    f"role {role.name!r} still waiting to receive "
                    f"{step.name!r}"
                )
        for state in self.states.values():
            if state.held:
                return False, (
                    f"role {state.role.name!r} holds "
                    f"{len(state.held)} unconsumed message(s)"
                )
        for ledger in self.ledgers.values():
            if not ledger.satisfied:
                return False, (
                    f"step {ledger.step_name!r} collected "
                    f"{len(ledger.responded)} of at least "
                    f"{ledger.minimum} expected response(s)"
                )
        return True, ""

    def _maybe_finish(self) -> None:
        if (
            not self.announced
            or self.status is not Status.RUNNING
            or self._deliverable_work()
        ):
            return
        done, reason = self._all_done()
        if done:
            self._status_event(
                Status.RUNNING, Status.COMPLETED, "protocol completed"
            )
        else:
            self._status_event(Status.RUNNING, Status.STUCK, reason)

    def _earliest_deadline(self) -> Optional[tuple[int, str]]:
        if not self.deadlines:
            return None
        return min(
            (expiry, rw) for rw, (expiry, _) in self.deadlines.items()
        )

    def _expire(self) -> None:
        expiry, rw = self._earliest_deadline()
        _, original = self.deadlines.pop(rw)
        self.tick = max(self.tick, expiry)
        cancel = AclMessage(
            performative=CommunicativeAct.CANCEL,
            sender=original.sender,
            receiver=original.receiver,
            content=Content(
                kind="notice",
                step=original.content.step,
                branch=original.content.branch,
                body="deadline expired",
            ),
            conversation_id=self.conversation_id,
            reply_with=self.next_reply_token(),
            in_reply_to=rw,
        )
        self.enqueue(cancel)
        self._status_event(
            Status.RUNNING,
            Status.DEADLINE_EXPIRED,
            f"deadline expired waiting for a reply to "
            f"{original.content.step!r}",
        )

    def _route(self, msg: AclMessage) -> None:
        kind = msg.content.kind
        if kind == "step":
            role = self._agent_role.get(msg.receiver.name)
            if role is None:
                return
            if self.states[role].role.kind is RoleKind.WEB_SERVICE:
                self.fabric.on_step_message(role, msg)
            else:
                self.handle_message(role, msg)
        elif kind in ("probe", "invoke", "cancel"):
            if msg.receiver.kind is AgentKind.SERVICE and self.fabric:
                self.fabric.on_stub_request(msg)
        elif kind in ("probe-reply", "invoke-reply"):
            if self.fabric:
                self.fabric.on_stub_reply(msg)
        # "notice" traffic is logged on delivery and otherwise ignored.


def create_session(
    ip: InteractionProtocol,
    net: ColoredPetriNet,
    bindings: dict[str, AgentId],
    seed: int,
    *,
    verification=None,
    force: bool = False,
    registry=None,
    policy=None,
    retries: int = 1,
    profiles: Optional[dict] = None,
) -> Session:
    """Create a session over a verified protocol.

    The caller either supplies a verification report whose bounded
    proper-termination verdict passed, or sets force=True, which is
    recorded in the trace.
    """
    if not force:
        if verification is None:
            raise SessionError(
                "a passing verification report is required "
                "(or force=True to override)"
            )
        if not (verification.bounded and verification.proper_termination):
            raise SessionError(
                "verification did not establish proper termination; "
                "use force=True to run anyway"
            )
    process_roles = {
        r.name for r in ip.roles if r.kind is RoleKind.PRIVATE_PROCESS
    }
    service_roles = {
        r.name for r in ip.roles if r.kind is RoleKind.WEB_SERVICE
    }
    missing = process_roles - set(bindings)
    if missing:
        raise SessionError(f"unbound process roles: {sorted(missing)}")
    extra = set(bindings) - process_roles
    if extra:
        raise SessionError(
            f"bindings name non-process roles: {sorted(extra)}"
        )
    agents = list(bindings.values())
    names = [a.name for a in agents]
    if len(set(names)) != len(names):
        raise SessionError("agent names must be unique")
    integrators = [a for a in agents if a.kind is AgentKind.INTEGRATOR]
    if len(integrators) != 1:
        raise SessionError(
            f"exactly one Integrator required, got {len(integrators)}"
        )
    if any(a.kind is AgentKind.SERVICE for a in agents):
        raise SessionError("service agents are bound via the registry")
    if service_roles and registry is None:
        raise SessionError(
            f"protocol has service roles {sorted(service_roles)} "
            f"but no registry was supplied"
        )
    full = dict(bindings)
    for role in sorted(service_roles):
        full[role] = AgentId(f"fabric:{role}", AgentKind.SERVICE)
    return Session(
        ip,
        net,
        full,
        seed,
        forced=force,
        registry=registry,
        policy=policy,
        retries=retries,
        profiles=profiles,
    )


def announce(session: Session, task: Optional[Task] = None) -> list:
    """Open the conversation: instantiate the protocol's first message."""
    if session.announced:
        raise SessionError("session already announced")
    if session.status is not Status.RUNNING:
        raise SessionError("cannot announce a finished session")
    if session.ip.messages:
        first = session.ip.messages[0]
        sender = first.sender if isinstance(first, ComplexMessage) else (
            first.sender
        )
        agent = session.bindings[sender]
        if agent.kind is not AgentKind.INTEGRATOR:
            raise SessionError(
                f"first step's sender {sender!r} is not bound to the "
                f"Integrator"
            )
    session.task = task
    session.announced = True
    mark = len(session.trace)
    session._settle()
    session._maybe_finish()
    return list(session.trace[mark:])


def step(session: Session) -> list:
    """Deliver the next scheduled message (or expire the next deadline)."""
    if not session.announced:
        raise SessionError("announce the session before stepping")
    if session.status is not Status.RUNNING:
        raise SessionError("cannot step a finished session")
    mark = len(session.trace)
    session._steps_taken += 1
    if not session._queue:
        if session.deadlines:
            session._expire()
        else:
            session._maybe_finish()
        return list(session.trace[mark:])
    deadline = session._earliest_deadline()
    if deadline is not None and deadline[0] < session._queue[0][0]:
        session._expire()
        return list(session.trace[mark:])
    deliver_tick, _, _, msg = heappop(session._queue)
    session.tick = max(session.tick, deliver_tick)
    session._log(EventKind.DELIVERED, msg)
    session._route(msg)
    session._settle()
    session._maybe_finish()
    return list(session.trace[mark:])


def run_to_completion(
    session: Session, max_steps: int = STEP_BUDGET
) -> Status:
    """Step until the session leaves Running (or the budget runs out)."""
    if not session.announced:
        raise SessionError("announce the session before running it")
    steps = 0
    while session.status is Status.RUNNING and steps < max_steps:
        step(session)
        steps += 1
    if session.status is Status.RUNNING:
        session._status_event(
            Status.RUNNING,
            Status.STUCK,
            f"step budget of {max_steps} exhausted",
        )
    return session.status
