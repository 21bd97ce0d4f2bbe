"""Exception hierarchy for the parley engine."""

from __future__ import annotations


class ParleyError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ParleyError):
    """Syntax error in a protocol document. Carries a 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ProtocolValidationError(ParleyError):
    """Raised when a parsed document violates well-formedness rules."""

    def __init__(self, report):
        errors = [f for f in report.findings if f.severity.value == "error"]
        detail = "; ".join(f"{f.code} at {f.location}" for f in errors)
        super().__init__(f"protocol is not well-formed: {detail}")
        self.report = report


class GuardError(ParleyError):
    """Malformed guard expression (raised by the guard sub-parser)."""


class TranslationError(ParleyError):
    """Protocol cannot be translated to a net (e.g. an OR too wide)."""


class AnalysisInconclusive(ParleyError):
    """Analysis was asked a question a truncated graph cannot answer."""


class SessionError(ParleyError):
    """Misuse of the execution runtime (bad bindings, double announce...)."""


class DataspaceError(ParleyError):
    """Bad dataspace access: unknown name, type mismatch, unbound read."""


class RegistryError(ParleyError):
    """Service registry misuse: duplicate id, unknown id, no candidates."""
