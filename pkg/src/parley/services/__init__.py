"""Mock service registry and the discovery/invocation fabric."""

from .registry import Registry, ServiceDescription, ServiceStub, StubEntry
from .manager import (
    SelectionPolicy,
    ServiceFabric,
    fetch_attributes,
    select_service,
)

__all__ = [
    "Registry",
    "SelectionPolicy",
    "ServiceDescription",
    "ServiceFabric",
    "ServiceStub",
    "StubEntry",
    "fetch_attributes",
    "select_service",
]
