"""Shared dataspace: versioned variable bindings guards read."""

from __future__ import annotations

from typing import Union

from ..errors import DataspaceError
from ..model import VarDecl, VarType

Value = Union[int, bool, str]


def _value_type(value: Value) -> VarType:
    if isinstance(value, bool):
        return VarType.BOOL
    if isinstance(value, int):
        return VarType.INT
    if isinstance(value, str):
        return VarType.STR
    raise DataspaceError(f"unsupported value type {type(value).__name__}")


class Dataspace:
    """Typed key/value store; writes bump a per-key version counter.

    Declared defaults are seeded at version 0; explicit writes start at 1.
    Reads of unbound (default-less, never-written) variables are errors —
    guards instead fail closed via env(), which only exposes bound keys.
    """

    def __init__(self, decls: tuple[VarDecl, ...]):
        self._decls = {d.name: d for d in decls}
        self._values: dict[str, tuple[Value, int]] = {}
        for decl in decls:
            if decl.default is not None:
                self._values[decl.name] = (decl.default, 0)

    def _decl(self, name: str) -> VarDecl:
        decl = self._decls.get(name)
        if decl is None:
            raise DataspaceError(f"undeclared variable {name!r}")
        return decl

    def read(self, name: str) -> Value:
        self._decl(name)
        entry = self._values.get(name)
        if entry is None:
            raise DataspaceError(f"variable {name!r} is unbound")
        return entry[0]

    def version(self, name: str) -> int:
        self._decl(name)
        entry = self._values.get(name)
        return entry[1] if entry else -1

    def write(self, name: str, value: Value) -> int:
        decl = self._decl(name)
        if _value_type(value) is not decl.type:
            raise DataspaceError(
                f"variable {name!r} is {decl.type.value}, "
                f"got {type(value).__name__}"
            )
        version = max(self.version(name) + 1, 1)
        self._values[name] = (value, version)
        return version

    def env(self) -> dict[str, Value]:
        return {name: value for name, (value, _) in self._values.items()}
