"""Discovery, probing, selection and invocation over registry stubs.

Every protocol message delivered to a web-service role triggers one
service flow on behalf of the Integrator:

1. discover candidates by the role's keywords,
2. probe each candidate for its attributes (stubs answer after their
   configured latency, or report unavailable on a seeded failure draw),
3. select one candidate under the active policy,
4. invoke the selected service and cancel every other candidate.

A failed invocation removes the candidate and retries the selection
until the retry budget or the candidate set runs out. On success the
original protocol message is handled by the chosen service's agent,
which then produces whatever replies the protocol prescribes, carrying
the stub's invocation payload.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..errors import RegistryError
from ..model import CommunicativeAct
from ..runtime.acl import AclMessage, AgentId, AgentKind, Content
from ..runtime.trace import EventKind, TraceEvent
from .registry import Registry, ServiceDescription


class SelectionPolicy(Enum):
    MIN_COST = "min-cost"
    FIRST = "first"


def fetch_attributes(registry: Registry, service_ids, rng) -> dict:
    """Probe services directly (no scheduling): id -> attribute dict.

    A probe that fails its seeded draw yields {"unavailable": True}.
    """
    out = {}
    for sid in service_ids:
        desc = registry.get(sid)
        if rng.random() < desc.stub.probe.failure_probability:
            out[sid] = {"unavailable": True}
        else:
            out[sid] = desc.attribute_map()
    return out


def select_service(attributes: dict, policy: SelectionPolicy) -> str:
    """Pick one service id from probed attributes under the policy.

    min-cost takes the lowest numeric "cost" attribute; first takes the
    lowest id. Unavailable candidates are excluded; ties break on id.
    """
    available = {
        sid: attrs
        for sid, attrs in attributes.items()
        if not attrs.get("unavailable")
    }
    if not available:
        raise RegistryError("no candidate available after probing")
    if policy is SelectionPolicy.FIRST:
        return min(available)
    costed = {
        sid: attrs["cost"]
        for sid, attrs in available.items()
        if isinstance(attrs.get("cost"), (int, float))
        and not isinstance(attrs.get("cost"), bool)
    }
    if not costed:
        raise RegistryError(
            "no available candidate advertises a numeric cost"
        )
    return min(costed, key=lambda sid: (costed[sid], sid))


@dataclass
class _Flow:
    key: str
    role: str
    original: AclMessage
    candidates: list
    attempts: int = 0
    probes_pending: set = field(default_factory=set)
    attributes: dict = field(default_factory=dict)
    chosen: Optional[str] = None


class ServiceFabric:
    """Session-attached execution of the six-step service flow."""

    def __init__(self, session, registry, policy, retries: int):
        self.session = session
        self.registry = registry
        self.policy = policy
        self.retries = retries
        self.flows: dict[str, _Flow] = {}
        self.failure = ""
        self._flow_seq = 0

    # -- protocol side -------------------------------------------------

    def on_step_message(self, role: str, msg: AclMessage) -> None:
        session = self.session
        role_obj = session.states[role].role
        criteria = tuple(sorted(role_obj.keywords or (role_obj.name,)))
        found = self.registry.discover(criteria) if self.registry else []
        ids = tuple(d.id for d in found)
        session.trace.append(
            TraceEvent(
                session.tick,
                EventKind.DISCOVER,
                discover=(criteria, ids),
            )
        )
        if not ids:
            self.failure = (
                f"no registered service matches criteria {list(criteria)}"
            )
            return
        self._flow_seq += 1
        flow = _Flow(
            key=f"flow-{self._flow_seq}",
            role=role,
            original=msg,
            candidates=list(ids),
            probes_pending=set(ids),
        )
        self.flows[flow.key] = flow
        for sid in ids:
            desc = self.registry.get(sid)
            probe = AclMessage(
                performative=CommunicativeAct.REQUEST,
                sender=session.integrator,
                receiver=self._stub_agent(sid),
                content=Content(
                    kind="probe",
                    step=msg.content.step,
                    branch=msg.content.branch,
                    body=flow.key,
                ),
                conversation_id=session.conversation_id,
                reply_with=session.next_reply_token(),
            )
            session.enqueue(probe, latency=desc.stub.probe.latency)

    # -- stub side -----------------------------------------------------

    def on_stub_request(self, msg: AclMessage) -> None:
        session = self.session
        sid = msg.receiver.name.partition(":")[2]
        desc = self.registry.get(sid)
        kind = msg.content.kind
        session._log(EventKind.HANDLED, msg)
        if kind == "probe":
            failed = (
                session.rng.random() < desc.stub.probe.failure_probability
            )
            if failed:
                performative = CommunicativeAct.FAILURE
                bindings = (("unavailable", True),)
            else:
                performative = CommunicativeAct.INFORM
                bindings = desc.attributes
            reply = AclMessage(
                performative=performative,
                sender=msg.receiver,
                receiver=msg.sender,
                content=Content(
                    kind="probe-reply",
                    step=msg.content.step,
                    branch=msg.content.branch,
                    bindings=bindings,
                    body=msg.content.body,
                ),
                conversation_id=session.conversation_id,
                reply_with=session.next_reply_token(),
                in_reply_to=msg.reply_with,
            )
            session.enqueue(reply)
        elif kind == "invoke":
            failed = (
                session.rng.random() < desc.stub.invoke.failure_probability
            )
            if failed:
                performative = CommunicativeAct.FAILURE
                bindings = (("error", "invocation failed"),)
            else:
                performative = CommunicativeAct.INFORM
                bindings = desc.stub.invoke.payload
            reply = AclMessage(
                performative=performative,
                sender=msg.receiver,
                receiver=msg.sender,
                content=Content(
                    kind="invoke-reply",
                    step=msg.content.step,
                    branch=msg.content.branch,
                    bindings=bindings,
                    body=msg.content.body,
                ),
                conversation_id=session.conversation_id,
                reply_with=session.next_reply_token(),
                in_reply_to=msg.reply_with,
            )
            session.enqueue(reply)
        # "cancel" needs no reply: the stub just acknowledges it.

    # -- integrator side -----------------------------------------------

    def on_stub_reply(self, msg: AclMessage) -> None:
        session = self.session
        session._log(EventKind.HANDLED, msg)
        flow = self.flows.get(msg.content.body or "")
        if flow is None:
            return
        sid = msg.sender.name.partition(":")[2]
        if msg.content.kind == "probe-reply":
            flow.probes_pending.discard(sid)
            flow.attributes[sid] = dict(msg.content.bindings)
            if not flow.probes_pending:
                self._select_and_invoke(flow)
        elif msg.content.kind == "invoke-reply":
            if msg.performative is CommunicativeAct.FAILURE:
                self._retry(flow, failed=sid)
            else:
                del self.flows[flow.key]
                self._complete(flow, sid)

    def _select_and_invoke(self, flow: _Flow) -> None:
        session = self.session
        try:
            chosen = select_service(
                {
                    sid: flow.attributes.get(sid, {"unavailable": True})
                    for sid in flow.candidates
                },
                self.policy,
            )
        except RegistryError as exc:
            self.failure = f"selection for role {flow.role!r} failed: {exc}"
            del self.flows[flow.key]
            return
        flow.chosen = chosen
        desc = self.registry.get(chosen)
        invoke = AclMessage(
            performative=CommunicativeAct.REQUEST,
            sender=session.integrator,
            receiver=self._stub_agent(chosen),
            content=Content(
                kind="invoke",
                step=flow.original.content.step,
                branch=flow.original.content.branch,
                bindings=flow.original.content.bindings,
                body=flow.key,
            ),
            conversation_id=session.conversation_id,
            reply_with=session.next_reply_token(),
        )
        session.enqueue(invoke, latency=desc.stub.invoke.latency)
        for sid in flow.candidates:
            if sid == chosen:
                continue
            cancel = AclMessage(
                performative=CommunicativeAct.CANCEL,
                sender=session.integrator,
                receiver=self._stub_agent(sid),
                content=Content(
                    kind="cancel",
                    step=flow.original.content.step,
                    branch=flow.original.content.branch,
                    body=flow.key,
                ),
                conversation_id=session.conversation_id,
                reply_with=session.next_reply_token(),
            )
            session.enqueue(cancel)

    def _retry(self, flow: _Flow, failed: str) -> None:
        flow.candidates = [s for s in flow.candidates if s != failed]
        flow.attempts += 1
        if flow.attempts > self.retries or not flow.candidates:
            self.failure = (
                f"invocation for role {flow.role!r} failed after "
                f"{flow.attempts} attempt(s)"
            )
            del self.flows[flow.key]
            return
        self._select_and_invoke(flow)

    def _complete(self, flow: _Flow, sid: str) -> None:
        """Successful invocation: the chosen service takes over the role."""
        session = self.session
        desc = self.registry.get(sid)
        agent = self._stub_agent(sid)
        state = session.states[flow.role]
        state.agent = agent
        state.outgoing_bindings = desc.stub.invoke.payload
        session.bindings[flow.role] = agent
        session._agent_role[agent.name] = flow.role
        session.handle_message(flow.role, flow.original)

    @staticmethod
    def _stub_agent(sid: str) -> AgentId:
        return AgentId(f"svc:{sid}", AgentKind.SERVICE)
