"""Parser behaviour: grammar coverage, positions, validation wiring."""

import pytest

from parley import parse_protocol
from parley.errors import ParseError, ProtocolValidationError
from parley.guards import Compare
from parley.model import (
    CommunicativeAct,
    ComplexMessage,
    Mode,
    Operator,
    PrimitiveMessage,
    RoleKind,
    VarType,
)

FULL = """\
protocol quote  # trailing comment on the header

roles {
  buyer: process
  seller: process
  ledger: service(audit, "finance ops")
}

vars {
  budget: int = 40
  rush: bool
  region: str = "emea"
}

messages {
  pm ask: buyer -> seller cfp
  cm answer XOR {
    pm bid: seller -> buyer propose sync guard budget >= 10
    pm pass: seller -> buyer refuse
  }
  pm log: buyer -> ledger inform async deadline 9
}

flow {
  (buyer, seller)
  (seller, buyer)
  (buyer, ledger)
}
"""


def test_full_document():
    ip = parse_protocol(FULL)
    assert ip.id == "quote"
    assert [r.name for r in ip.roles] == ["buyer", "seller", "ledger"]
    assert ip.roles[0].kind is RoleKind.PRIVATE_PROCESS
    assert ip.roles[2].kind is RoleKind.WEB_SERVICE
    assert ip.roles[2].keywords == ("audit", "finance ops")
    assert [(v.name, v.type, v.default) for v in ip.vars] == [
        ("budget", VarType.INT, 40),
        ("rush", VarType.BOOL, None),
        ("region", VarType.STR, "emea"),
    ]
    ask, answer, log = ip.messages
    assert isinstance(ask, PrimitiveMessage)
    assert (ask.sender, ask.receiver) == ("buyer", "seller")
    assert ask.act is CommunicativeAct.CFP
    assert ask.option.mode is Mode.ASYNC  # default
    assert isinstance(answer, ComplexMessage)
    assert answer.operator is Operator.XOR
    bid = answer.branches[0]
    assert bid.option.mode is Mode.SYNC
    assert bid.option.guard == Compare("budget", ">=", 10)
    assert log.option.deadline == 9
    assert ip.flow == (("buyer", "seller"), ("seller", "buyer"),
                       ("buyer", "ledger"))


def test_flow_inferred_when_omitted():
    src = (
        "protocol p\n"
        "roles {\n  a: process\n  b: process\n}\n"
        "messages {\n"
        "  pm m0: a -> b request\n"
        "  pm m1: b -> a inform\n"
        "  pm m2: a -> b inform\n"
        "}\n"
    )
    ip = parse_protocol(src)
    assert ip.flow == (("a", "b"), ("b", "a"))


def test_service_role_defaults_keywords_to_name():
    src = (
        "protocol p\n"
        "roles {\n  a: process\n  track: service\n}\n"
        "messages {\n  pm m0: a -> track request\n}\n"
    )
    ip = parse_protocol(src)
    assert ip.roles[1].keywords == ("track",)


def test_guard_region_ends_at_deadline_keyword():
    src = (
        "protocol p\n"
        "roles {\n  a: process\n  b: process\n}\n"
        "vars {\n  n: int = 1\n}\n"
        "messages {\n"
        "  pm m0: a -> b request guard n >= 1 and n <= 5 deadline 7\n"
        "}\n"
    )
    step = parse_protocol(src).messages[0]
    assert step.option.deadline == 7
    assert step.option.guard is not None


def err(src):
    with pytest.raises(ParseError) as info:
        parse_protocol(src)
    return info.value


def test_header_required():
    e = err("roles {\n}\n")
    assert "protocol" in e.message
    assert (e.line, e.col) == (1, 1)


def test_unknown_section():
    e = err("protocol p\nchapters {\n}\n")
    assert "unknown section" in e.message
    assert e.line == 2


def test_duplicate_section():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "roles {\n}\n"
    )
    assert "duplicate section" in e.message


def test_missing_messages_section():
    e = err("protocol p\nroles {\n  a: process\n  b: process\n}\n")
    assert "'messages'" in str(e)


def test_unclosed_section_reports_eof():
    e = err("protocol p\nroles {\n  a: process\n")
    assert "end of input" in e.message


def test_bad_role_kind():
    e = err("protocol p\nroles {\n  a: machine\n}\n")
    assert "unknown role kind" in e.message
    assert (e.line, e.col) == (3, 6)


def test_keywords_rejected_on_process_role():
    e = err("protocol p\nroles {\n  a: process(fast)\n}\n")
    assert "only valid on service roles" in e.message


def test_duplicate_role_is_a_parse_error():
    e = err("protocol p\nroles {\n  a: process\n  a: process\n}\n")
    assert "duplicate role" in e.message


def test_bad_var_type():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "vars {\n  x: float\n}\nmessages {\n}\n"
    )
    assert "unknown variable type" in e.message


def test_bad_var_default_literal():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "vars {\n  x: int = maybe\n}\nmessages {\n}\n"
    )
    assert "expected literal" in e.message


def test_unknown_act():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b shout\n}\n"
    )
    assert "unknown communicative act" in e.message
    assert e.line == 7


def test_deadline_requires_int():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b request deadline soon\n}\n"
    )
    assert "tick count" in e.message


def test_trailing_tokens_rejected():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b request async extra\n}\n"
    )
    assert "trailing" in e.message


def test_duplicate_message_name_at_parse_time():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b request\n  pm m0: b -> a inform\n}\n"
    )
    assert "duplicate message name" in e.message


def test_cm_branch_must_be_pm():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  cm c XOR {\n    cm inner OR {\n    }\n  }\n}\n"
    )
    assert "must be pm entries" in e.message


def test_unknown_operator():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  cm c NAND {\n  }\n}\n"
    )
    assert "unknown operator" in e.message


def test_operator_is_case_sensitive():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  cm c xor {\n  }\n}\n"
    )
    assert "unknown operator" in e.message


def test_flow_pair_syntax():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b request\n}\n"
        "flow {\n  a -> b\n}\n"
    )
    assert "expected '('" in e.message


def test_malformed_guard_reports_position():
    e = err(
        "protocol p\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> b request guard and and\n}\n"
    )
    assert e.line == 7


def test_validation_error_raised_by_default():
    src = (
        "protocol p\n"
        "roles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> ghost request\n}\n"
    )
    with pytest.raises(ProtocolValidationError) as info:
        parse_protocol(src)
    assert any(
        f.code == "UNKNOWN_ROLE" for f in info.value.report.findings
    )


def test_validate_false_returns_malformed_document():
    src = (
        "protocol p\n"
        "roles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> ghost request\n}\n"
    )
    ip = parse_protocol(src, validate=False)
    assert ip.messages[0].receiver == "ghost"


def test_fixture_corpus_parses(fixtures):
    for path in sorted(fixtures.glob("*.ipd")):
        ip = parse_protocol(path.read_text())
        assert ip.id
