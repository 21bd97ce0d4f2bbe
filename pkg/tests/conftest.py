from pathlib import Path

import pytest

from parley.parser import parse_protocol
from parley.runtime import AgentId, AgentKind

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def load():
    def _load(name: str):
        return parse_protocol(
            (FIXTURES / name).read_text(encoding="utf-8")
        )

    return _load


def auto_bindings(ip) -> dict:
    """First step's sender plays the Integrator; every other process
    role gets an Enterprise agent named after it."""
    from parley.model import RoleKind

    integrator = ip.messages[0].sender if ip.messages else None
    out = {}
    for role in ip.roles:
        if role.kind is not RoleKind.PRIVATE_PROCESS:
            continue
        if role.name == integrator:
            out[role.name] = AgentId("integrator", AgentKind.INTEGRATOR)
        else:
            out[role.name] = AgentId(role.name, AgentKind.ENTERPRISE)
    return out


@pytest.fixture
def bind():
    return auto_bindings


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist collected during the run."""
    try:
        from tests.test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
