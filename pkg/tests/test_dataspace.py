"""Dataspace: typed versioned bindings feeding guard evaluation."""

import pytest

from parley.errors import DataspaceError
from parley.model import VarDecl, VarType
from parley.runtime.dataspace import Dataspace

DECLS = (
    VarDecl("load", VarType.INT, 5),
    VarDecl("rush", VarType.BOOL),
    VarDecl("zone", VarType.STR, "east"),
)


def test_defaults_seed_version_zero():
    ds = Dataspace(DECLS)
    assert ds.read("load") == 5
    assert ds.version("load") == 0
    assert ds.version("rush") == -1  # no default, never written


def test_writes_bump_versions_from_one():
    ds = Dataspace(DECLS)
    assert ds.write("rush", True) == 1
    assert ds.write("rush", False) == 2
    assert ds.write("load", 9) == 1  # default was version 0
    assert ds.read("load") == 9


def test_unbound_read_is_an_error():
    ds = Dataspace(DECLS)
    with pytest.raises(DataspaceError, match="unbound"):
        ds.read("rush")


def test_undeclared_names_rejected():
    ds = Dataspace(DECLS)
    with pytest.raises(DataspaceError, match="undeclared"):
        ds.read("ghost")
    with pytest.raises(DataspaceError, match="undeclared"):
        ds.write("ghost", 1)
    with pytest.raises(DataspaceError, match="undeclared"):
        ds.version("ghost")


def test_type_enforcement():
    ds = Dataspace(DECLS)
    with pytest.raises(DataspaceError, match="is int"):
        ds.write("load", "heavy")
    with pytest.raises(DataspaceError, match="is bool"):
        ds.write("rush", 1)  # int is not bool
    with pytest.raises(DataspaceError, match="is int"):
        ds.write("load", True)  # bool is not int either


def test_env_exposes_only_bound_keys():
    ds = Dataspace(DECLS)
    assert ds.env() == {"load": 5, "zone": "east"}
    ds.write("rush", True)
    assert ds.env() == {"load": 5, "zone": "east", "rush": True}
    # env is a snapshot, not a live view
    snapshot = ds.env()
    ds.write("load", 1)
    assert snapshot["load"] == 5
