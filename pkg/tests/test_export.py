"""PNML and DOT exports: structure, annotations, determinism."""

import xml.etree.ElementTree as ET

from parley import parse_protocol
from parley.cpn import to_dot, to_pnml, translate
from parley.cpn.export import PNML_NS


def net_for(fixtures, name):
    return translate(parse_protocol((fixtures / f"{name}.ipd").read_text()))


def ns(tag):
    return f"{{{PNML_NS}}}{tag}"


def test_pnml_is_wellformed_and_complete(fixtures):
    net = net_for(fixtures, "contract-net")
    root = ET.fromstring(to_pnml(net))
    assert root.tag == ns("pnml")
    net_el = root.find(ns("net"))
    assert net_el.get("id") == "contract-net"
    page = net_el.find(ns("page"))
    places = page.findall(ns("place"))
    transitions = page.findall(ns("transition"))
    arcs = page.findall(ns("arc"))
    assert len(places) == len(net.places)
    assert len(transitions) == len(net.transitions)
    assert len(arcs) == len(net.arcs)


def test_pnml_initial_marking_only_on_marked_places(fixtures):
    net = net_for(fixtures, "linear")
    root = ET.fromstring(to_pnml(net))
    page = root.find(ns("net")).find(ns("page"))
    marked = {
        p.get("id")
        for p in page.findall(ns("place"))
        if p.find(ns("initialMarking")) is not None
    }
    assert marked == set(net.marking_to_dict(net.initial))


def test_pnml_toolspecific_carries_colored_annotations(fixtures):
    net = net_for(fixtures, "dead-branch")
    root = ET.fromstring(to_pnml(net))
    page = root.find(ns("net")).find(ns("page"))
    by_id = {
        t.get("id"): t.find(ns("toolspecific"))
        for t in page.findall(ns("transition"))
    }
    tool = by_id["choice:reply.discounted"]
    assert tool.get("tool") == "parley"
    fields = {child.tag.split("}")[-1]: child.text for child in tool}
    assert fields["phase"] == "choice"
    assert fields["step"] == "reply"
    assert fields["branch"] == "discounted"
    assert fields["guard"] == "clearance = true"
    place_tool = {
        p.get("id"): p.find(ns("toolspecific"))
        for p in page.findall(ns("place"))
    }["role:seller:0"]
    place_fields = {c.tag.split("}")[-1]: c.text for c in place_tool}
    assert place_fields["kind"] == "role-state"
    assert place_fields["owner"] == "seller"


def test_pnml_subset_annotation_on_or_transitions(fixtures):
    net = net_for(fixtures, "or-notify")
    text = to_pnml(net)
    assert "<subset>" in text


def test_dot_contains_every_node_and_edge(fixtures):
    net = net_for(fixtures, "linear")
    dot = to_dot(net)
    assert dot.startswith('digraph "linear" {')
    assert dot.endswith("}\n")
    for place in net.places:
        assert f'"{place.id}" [shape=circle' in dot
    for t in net.transitions:
        assert f'"{t.id}" [shape=box' in dot
    assert dot.count(" -> ") == len(net.arcs)


def test_exports_are_deterministic(fixtures):
    net = net_for(fixtures, "contract-net")
    assert to_pnml(net) == to_pnml(net)
    assert to_dot(net) == to_dot(net)
