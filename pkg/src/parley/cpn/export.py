"""Net exports: PNML (place/transition with tool annotations) and DOT."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..guards import render_guard
from .net import ColoredPetriNet

PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"
PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"
TOOL = "parley"
TOOL_VERSION = "0.1"


def _name(parent: ET.Element, text: str) -> None:
    ET.SubElement(ET.SubElement(parent, "name"), "text").text = text


def to_pnml(net: ColoredPetriNet) -> str:
    """Render the net as a PNML document (one page, P/T view).

    Colored/structured annotations that plain PNML cannot carry (place
    kind and owner, transition phase and guard) travel in a
    <toolspecific tool="parley"> block per node.
    """
    root = ET.Element("pnml", xmlns=PNML_NS)
    net_el = ET.SubElement(root, "net", id=net.id, type=PTNET_TYPE)
    page = ET.SubElement(net_el, "page", id="page0")
    for i, place in enumerate(net.places):
        el = ET.SubElement(page, "place", id=place.id)
        _name(el, place.id)
        tokens = net.initial.counts[i]
        if tokens:
            marking = ET.SubElement(el, "initialMarking")
            ET.SubElement(marking, "text").text = str(tokens)
        tool = ET.SubElement(
            el, "toolspecific", tool=TOOL, version=TOOL_VERSION
        )
        ET.SubElement(tool, "kind").text = place.kind.value
        if place.owner:
            ET.SubElement(tool, "owner").text = place.owner
        ET.SubElement(tool, "domain").text = place.domain
    for t in net.transitions:
        el = ET.SubElement(page, "transition", id=t.id)
        _name(el, t.label)
        tool = ET.SubElement(
            el, "toolspecific", tool=TOOL, version=TOOL_VERSION
        )
        ET.SubElement(tool, "phase").text = t.phase.value
        ET.SubElement(tool, "step").text = t.step
        if t.branch:
            ET.SubElement(tool, "branch").text = t.branch
        if t.subset:
            ET.SubElement(tool, "subset").text = " ".join(t.subset)
        if t.guard is not None:
            ET.SubElement(tool, "guard").text = render_guard(t.guard)
    for k, arc in enumerate(net.arcs):
        el = ET.SubElement(
            page, "arc", id=f"a{k}", source=arc.source, target=arc.target
        )
        if arc.weight != 1:
            inscription = ET.SubElement(el, "inscription")
            ET.SubElement(inscription, "text").text = str(arc.weight)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: ColoredPetriNet) -> str:
    """Render the net in Graphviz DOT: circles for places, boxes for
    transitions, arc weights as edge labels when above 1."""
    lines = [f"digraph {_quote(net.id)} {{", "  rankdir=LR;"]
    for i, place in enumerate(net.places):
        tokens = net.initial.counts[i]
        label = place.id if not tokens else f"{place.id} ({tokens})"
        lines.append(
            f"  {_quote(place.id)} [shape=circle, label={_quote(label)}];"
        )
    for t in net.transitions:
        lines.append(
            f"  {_quote(t.id)} [shape=box, label={_quote(t.label)}];"
        )
    for arc in net.arcs:
        attrs = f" [label={_quote(str(arc.weight))}]" if arc.weight != 1 else ""
        lines.append(f"  {_quote(arc.source)} -> {_quote(arc.target)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"
