"""Mock service registry.

Registered services carry a keyword set used by discovery, an attribute
map inspected during probing (selection policies read ``cost``), and a
stub behaviour table: per-operation latency, failure probability, and the
payload an invocation returns. Registries round-trip through a canonical
JSON document so fixtures stay byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import RegistryError


def _freeze_bindings(mapping) -> tuple:
    if isinstance(mapping, dict):
        return tuple(sorted(mapping.items()))
    return tuple(sorted(tuple(pair) for pair in mapping))


@dataclass(frozen=True)
class StubEntry:
    """Behaviour of one stub operation (probe or invoke)."""

    latency: int = 1
    failure_probability: float = 0.0
    payload: tuple = ()

    def __post_init__(self):
        if self.latency < 1:
            raise RegistryError("stub latency must be >= 1")
        if not 0.0 <= self.failure_probability <= 1.0:
            raise RegistryError(
                "failure probability must lie in [0.0, 1.0]"
            )
        object.__setattr__(
            self, "payload", _freeze_bindings(self.payload)
        )

    def to_dict(self) -> dict:
        return {
            "latency": self.latency,
            "failure_probability": self.failure_probability,
            "payload": dict(self.payload),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StubEntry":
        return cls(
            latency=data.get("latency", 1),
            failure_probability=data.get("failure_probability", 0.0),
            payload=data.get("payload", {}),
        )


@dataclass(frozen=True)
class ServiceStub:
    probe: StubEntry = field(default_factory=StubEntry)
    invoke: StubEntry = field(default_factory=StubEntry)

    def to_dict(self) -> dict:
        return {
            "probe": self.probe.to_dict(),
            "invoke": self.invoke.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceStub":
        return cls(
            probe=StubEntry.from_dict(data.get("probe", {})),
            invoke=StubEntry.from_dict(data.get("invoke", {})),
        )


@dataclass(frozen=True)
class ServiceDescription:
    id: str
    name: str
    keywords: frozenset = frozenset()
    attributes: tuple = ()
    stub: ServiceStub = field(default_factory=ServiceStub)

    def __post_init__(self):
        if not self.id:
            raise RegistryError("service id must be non-empty")
        object.__setattr__(self, "keywords", frozenset(self.keywords))
        object.__setattr__(
            self, "attributes", _freeze_bindings(self.attributes)
        )

    def attribute_map(self) -> dict:
        return dict(self.attributes)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "keywords": sorted(self.keywords),
            "attributes": dict(self.attributes),
            "stub": self.stub.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceDescription":
        return cls(
            id=data["id"],
            name=data.get("name", data["id"]),
            keywords=frozenset(data.get("keywords", ())),
            attributes=data.get("attributes", {}),
            stub=ServiceStub.from_dict(data.get("stub", {})),
        )


class Registry:
    """Service directory keyed by id, with keyword-subset discovery."""

    def __init__(self, services=()):
        self._services: dict[str, ServiceDescription] = {}
        for desc in services:
            self.register(desc)

    def __len__(self) -> int:
        return len(self._services)

    def __contains__(self, service_id: str) -> bool:
        return service_id in self._services

    def __eq__(self, other) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return self._services == other._services

    def register(self, desc: ServiceDescription) -> str:
        if desc.id in self._services:
            raise RegistryError(f"duplicate service id {desc.id!r}")
        self._services[desc.id] = desc
        return desc.id

    def unregister(self, service_id: str) -> None:
        if service_id not in self._services:
            raise RegistryError(f"unknown service id {service_id!r}")
        del self._services[service_id]

    def get(self, service_id: str) -> ServiceDescription:
        try:
            return self._services[service_id]
        except KeyError:
            raise RegistryError(
                f"unknown service id {service_id!r}"
            ) from None

    def services(self) -> list:
        return [self._services[k] for k in sorted(self._services)]

    def discover(self, criteria) -> list:
        """All services whose keywords cover the criteria, sorted by id."""
        wanted = frozenset(criteria)
        return [
            desc
            for desc in self.services()
            if wanted <= desc.keywords
        ]

    def to_dict(self) -> dict:
        return {"services": [d.to_dict() for d in self.services()]}

    @classmethod
    def from_dict(cls, data: dict) -> "Registry":
        return cls(
            ServiceDescription.from_dict(d)
            for d in data.get("services", ())
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Registry":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RegistryError(f"malformed registry JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Registry":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())
