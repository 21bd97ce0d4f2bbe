"""Object-model invariants: helpers, participation, and well-formedness."""

from parley import guards
from parley.model import (
    ACTS,
    CommunicativeAct,
    ComplexMessage,
    InteractionProtocol,
    MessageOption,
    Mode,
    Operator,
    PartItem,
    PrimitiveMessage,
    Role,
    RoleKind,
    Severity,
    VarDecl,
    VarType,
    expected_responses,
    message_pairs,
    participation,
    validate_well_formedness,
)

REQ = CommunicativeAct.REQUEST
INF = CommunicativeAct.INFORM


def pm(name, snd, rcv, act=REQ, **opt):
    return PrimitiveMessage(name, snd, rcv, act, MessageOption(**opt))


def proto(roles=("a", "b"), vars=(), messages=(), flow=None):
    steps = tuple(messages)
    if flow is None:
        flow = message_pairs(steps)
    return InteractionProtocol(
        id="t",
        roles=tuple(Role(r) if isinstance(r, str) else r for r in roles),
        vars=tuple(vars),
        messages=steps,
        flow=tuple(flow),
    )


def codes(report, severity=None):
    return [
        f.code
        for f in report.findings
        if severity is None or f.severity is severity
    ]


# --- roster and simple helpers -------------------------------------------


def test_acts_roster_is_the_eleven_fipa_acts():
    assert sorted(ACTS) == [
        "accept-proposal",
        "agree",
        "cancel",
        "cfp",
        "failure",
        "inform",
        "not-understood",
        "propose",
        "refuse",
        "reject-proposal",
        "request",
    ]
    assert ACTS["cfp"] is CommunicativeAct.CFP


def test_expected_responses_per_operator():
    p = pm("m", "a", "b")
    br = tuple(pm(f"x{i}", "a", "b", INF) for i in range(3))
    assert expected_responses(p) == (1, 1)
    assert expected_responses(ComplexMessage("c", Operator.AND, br)) == (3, 3)
    assert expected_responses(ComplexMessage("c", Operator.XOR, br)) == (1, 1)
    assert expected_responses(ComplexMessage("c", Operator.OR, br)) == (1, 3)


def test_message_pairs_dedup_in_first_use_order():
    steps = (
        pm("m0", "a", "b"),
        pm("m1", "b", "a", INF),
        pm("m2", "a", "b", INF),
    )
    assert message_pairs(steps) == (("a", "b"), ("b", "a"))


def test_initial_env_only_defaults():
    ip = proto(
        vars=(
            VarDecl("x", VarType.INT, 3),
            VarDecl("y", VarType.BOOL),
            VarDecl("z", VarType.STR, "hi"),
        ),
        messages=(pm("m0", "a", "b"),),
    )
    assert ip.initial_env() == {"x": 3, "z": "hi"}


# --- participation ---------------------------------------------------------


def test_participation_primitive():
    ip = proto(messages=(pm("m0", "a", "b"), pm("m1", "b", "a", INF)))
    part = participation(ip)
    assert part["a"] == [PartItem(0, "send"), PartItem(1, "recv")]
    assert part["b"] == [PartItem(0, "recv"), PartItem(1, "send")]


def test_participation_and_gets_item_per_branch():
    step = ComplexMessage(
        "blast",
        Operator.AND,
        (pm("b1", "a", "b"), pm("b2", "a", "c"), pm("b3", "a", "b")),
    )
    ip = proto(roles=("a", "b", "c"), messages=(step,))
    part = participation(ip)
    assert part["a"] == [PartItem(0, "send")]
    assert part["b"] == [PartItem(0, "recv", "b1"), PartItem(0, "recv", "b3")]
    assert part["c"] == [PartItem(0, "recv", "b2")]


def test_participation_xor_one_item_per_distinct_receiver():
    step = ComplexMessage(
        "pick",
        Operator.XOR,
        (pm("y", "a", "b", INF), pm("n", "a", "c", INF), pm("z", "a", "b")),
    )
    ip = proto(roles=("a", "b", "c"), messages=(step,))
    part = participation(ip)
    assert part["b"] == [PartItem(0, "recv")]
    assert part["c"] == [PartItem(0, "recv")]


# --- well-formedness: roles and vars ---------------------------------------


def test_valid_protocol_is_ok():
    ip = proto(messages=(pm("m0", "a", "b"),))
    report = validate_well_formedness(ip)
    assert report.ok
    assert report.errors() == ()


def test_duplicate_role():
    ip = proto(roles=("a", "b", "a"), messages=(pm("m0", "a", "b"),))
    assert "DUPLICATE_ROLE" in codes(validate_well_formedness(ip))


def test_roles_too_few():
    ip = InteractionProtocol(id="t", roles=(Role("a"),))
    assert "ROLES_TOO_FEW" in codes(validate_well_formedness(ip))


def test_roles_too_many():
    names = [f"r{i}" for i in range(33)]
    ip = proto(roles=names, messages=(pm("m0", "r0", "r1"),))
    assert "ROLES_TOO_MANY" in codes(validate_well_formedness(ip))


def test_service_without_keywords_warns():
    ip = proto(
        roles=(Role("a"), Role("s", RoleKind.WEB_SERVICE)),
        messages=(pm("m0", "a", "s"),),
    )
    report = validate_well_formedness(ip)
    assert "SERVICE_NO_KEYWORDS" in codes(report, Severity.WARNING)
    assert report.ok  # warning only


def test_duplicate_var():
    ip = proto(
        vars=(VarDecl("x", VarType.INT), VarDecl("x", VarType.BOOL)),
        messages=(pm("m0", "a", "b"),),
    )
    assert "DUPLICATE_VAR" in codes(validate_well_formedness(ip))


def test_var_default_type_mismatch():
    ip = proto(
        vars=(VarDecl("x", VarType.INT, default="oops"),),
        messages=(pm("m0", "a", "b"),),
    )
    assert "VAR_DEFAULT_TYPE" in codes(validate_well_formedness(ip))


def test_bool_default_is_not_an_int_default():
    # bool is a subclass of int in Python; the checker must not conflate them.
    ip = proto(
        vars=(VarDecl("x", VarType.INT, default=True),),
        messages=(pm("m0", "a", "b"),),
    )
    assert "VAR_DEFAULT_TYPE" in codes(validate_well_formedness(ip))


def test_empty_messages_warns_but_ok():
    ip = proto()
    report = validate_well_formedness(ip)
    assert "EMPTY_MESSAGES" in codes(report, Severity.WARNING)
    assert report.ok


# --- well-formedness: steps -------------------------------------------------


def test_duplicate_step_name():
    ip = proto(messages=(pm("m0", "a", "b"), pm("m0", "b", "a", INF)))
    assert "DUPLICATE_STEP" in codes(validate_well_formedness(ip))


def test_branch_name_collides_with_step_name():
    step = ComplexMessage(
        "m0", Operator.XOR, (pm("m0", "a", "b", INF), pm("n", "a", "b"))
    )
    ip = proto(messages=(step,))
    assert "DUPLICATE_STEP" in codes(validate_well_formedness(ip))


def test_unknown_role():
    ip = proto(messages=(pm("m0", "a", "ghost"),))
    assert "UNKNOWN_ROLE" in codes(validate_well_formedness(ip))


def test_self_message():
    ip = proto(messages=(pm("m0", "a", "a"),))
    assert "SELF_MESSAGE" in codes(validate_well_formedness(ip))


def test_guard_undeclared_var():
    g = guards.parse_guard("rush = true")
    ip = proto(messages=(pm("m0", "a", "b", guard=g),))
    assert "GUARD_UNDECLARED_VAR" in codes(validate_well_formedness(ip))


def test_guard_type_family_mismatch():
    g = guards.parse_guard("rush = 3")
    ip = proto(
        vars=(VarDecl("rush", VarType.BOOL),),
        messages=(pm("m0", "a", "b", guard=g),),
    )
    assert "GUARD_TYPE" in codes(validate_well_formedness(ip))


def test_guard_ordering_needs_int():
    g = guards.parse_guard("name < \"zz\"")
    ip = proto(
        vars=(VarDecl("name", VarType.STR),),
        messages=(pm("m0", "a", "b", guard=g),),
    )
    assert "GUARD_TYPE" in codes(validate_well_formedness(ip))


def test_deadline_not_positive():
    ip = proto(messages=(pm("m0", "a", "b", deadline=0),))
    assert "DEADLINE_NOT_POSITIVE" in codes(validate_well_formedness(ip))


def test_cm_too_few_branches():
    step = ComplexMessage("c", Operator.AND, (pm("x", "a", "b"),))
    ip = proto(messages=(step,))
    assert "CM_TOO_FEW_BRANCHES" in codes(validate_well_formedness(ip))


def test_cm_too_many_branches():
    br = tuple(pm(f"x{i}", "a", "b") for i in range(17))
    step = ComplexMessage("c", Operator.AND, br)
    ip = proto(messages=(step,))
    assert "CM_TOO_MANY_BRANCHES" in codes(validate_well_formedness(ip))


def test_wide_or_warns_but_ok():
    br = tuple(pm(f"x{i}", "a", "b", INF) for i in range(9))
    step = ComplexMessage("c", Operator.OR, br)
    ip = proto(messages=(step,))
    report = validate_well_formedness(ip)
    assert "CM_WIDE_OR" in codes(report, Severity.WARNING)
    assert report.ok


def test_and_nine_branches_no_warning():
    br = tuple(pm(f"x{i}", "a", "b") for i in range(9))
    step = ComplexMessage("c", Operator.AND, br)
    ip = proto(messages=(step,))
    assert "CM_WIDE_OR" not in codes(validate_well_formedness(ip))


def test_cm_mixed_sender():
    step = ComplexMessage(
        "c", Operator.XOR, (pm("x", "a", "b", INF), pm("y", "b", "a", INF))
    )
    ip = proto(messages=(step,))
    assert "CM_MIXED_SENDER" in codes(validate_well_formedness(ip))


# --- well-formedness: flow ---------------------------------------------------


def test_flow_duplicate_pair_warns():
    ip = proto(
        messages=(pm("m0", "a", "b"),),
        flow=(("a", "b"), ("a", "b")),
    )
    report = validate_well_formedness(ip)
    assert "FLOW_DUPLICATE_PAIR" in codes(report, Severity.WARNING)
    assert report.ok


def test_flow_self_pair():
    ip = proto(
        messages=(pm("m0", "a", "b"),),
        flow=(("a", "b"), ("a", "a")),
    )
    assert "FLOW_SELF_PAIR" in codes(validate_well_formedness(ip))


def test_flow_unknown_role():
    ip = proto(
        messages=(pm("m0", "a", "b"),),
        flow=(("a", "b"), ("a", "ghost")),
    )
    assert "FLOW_UNKNOWN_ROLE" in codes(validate_well_formedness(ip))


def test_flow_unused_pair_warns():
    ip = proto(
        messages=(pm("m0", "a", "b"),),
        flow=(("a", "b"), ("b", "a")),
    )
    report = validate_well_formedness(ip)
    assert "FLOW_UNUSED_PAIR" in codes(report, Severity.WARNING)
    assert report.ok


def test_flow_missing_pair():
    ip = proto(messages=(pm("m0", "a", "b"),), flow=())
    assert "FLOW_MISSING_PAIR" in codes(validate_well_formedness(ip))


def test_report_to_dict_shape():
    ip = proto(messages=(pm("m0", "a", "ghost"),))
    d = validate_well_formedness(ip).to_dict()
    assert d["ok"] is False
    assert {"severity", "code", "location", "detail"} == set(
        d["findings"][0]
    )
