"""Graphviz rendering of CIDs.

Each interface is a record node: stereotype, name and multiplicity on top,
one field per method below. Navigation edges leave from the method's field
and carry the label in glyph form (``$0..1->g``, ``1..2->caller``,
``*1->l``). Inheritance edges are dashed with a hollow arrowhead.
"""

from __future__ import annotations

from typing import Optional

from cidkit.model import CidModel, Component, Method

_RECORD_SPECIALS = str.maketrans({c: "\\" + c for c in '{}|<>"\\'})


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _record_text(text: str) -> str:
    return text.translate(_RECORD_SPECIALS)


def port_name(m: Method) -> str:
    return f"{m.name}_{m.arity}"


def node_id(comp: Component, iface: str) -> str:
    return f"{comp.name}.{iface}"


def _component_lines(comp: Component, indent: str) -> list[str]:
    lines = []
    for iface in comp.interfaces:
        head = ("«principal»\\n" if iface.principal else "") + _record_text(
            f"{iface.name} [{iface.multiplicity.short()}]"
        )
        fields = [f"<{port_name(m)}> {_record_text(m.signature())}\\l" for m in iface.methods]
        label = "{" + "|".join([head, *fields]) + "}"
        lines.append(f"{indent}{_quote(node_id(comp, iface.name))} [label=\"{label}\"];")
    for iface in comp.interfaces:
        for sup in iface.supertypes:
            lines.append(
                f"{indent}{_quote(node_id(comp, iface.name))} -> {_quote(node_id(comp, sup))} "
                "[style=dashed, arrowhead=empty];"
            )
    for iface, m, nav in comp.navigations():
        if not comp.has_interface(nav.target):
            continue
        lines.append(
            f"{indent}{_quote(node_id(comp, iface.name))}:{port_name(m)} -> "
            f"{_quote(node_id(comp, nav.target))} [label={_quote(nav.label())}];"
        )
    return lines


def emit_dot(model: CidModel, component: Optional[str] = None) -> str:
    """Render one component, or every component as a cluster when none is named."""
    header = ["  node [shape=record, fontname=\"Helvetica\"];", "  edge [fontname=\"Helvetica\"];"]
    if component is not None:
        comp = model.component(component)
        body = _component_lines(comp, "  ")
        return "\n".join([f"digraph {_quote(comp.name)} {{", *header, *body, "}"]) + "\n"
    lines = ["digraph \"cid\" {", *header]
    for comp in model.components:
        lines.append(f"  subgraph {_quote('cluster_' + comp.name)} {{")
        lines.append(f"    label={_quote(comp.name)};")
        lines += _component_lines(comp, "    ")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
