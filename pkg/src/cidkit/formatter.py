"""Canonical text rendering of a model.

The output is the fixpoint of ``parse``/``format``: two-space indentation,
one declaration per line, declaration order kept within each kind (basic
types, then externals, then interfaces). Navigation labels are written in
full form, so counts always appear as ``lower..upper``. Comments in the
source are not preserved.
"""

from __future__ import annotations

from cidkit.model import CidModel, Component, InterfaceType, Method, NavMode

INDENT = "  "


def format_model(model: CidModel) -> str:
    return "\n".join(format_component(c) for c in model.components)


def format_component(comp: Component) -> str:
    lines = [f"component {comp.name} {{"]
    lines += [f"{INDENT}basic {b};" for b in comp.basics]
    lines += [f"{INDENT}external {e};" for e in comp.externals]
    for iface in comp.interfaces:
        lines += _interface_lines(iface)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _interface_lines(iface: InterfaceType) -> list[str]:
    head = f"{INDENT}{'principal ' if iface.principal else ''}interface {iface.name}"
    if iface.supertypes:
        head += " : " + ", ".join(iface.supertypes)
    head += f" [{iface.multiplicity.short()}] {{"
    if not iface.methods:
        return [head + "}"]
    return [head, *(INDENT * 2 + format_method(m) for m in iface.methods), INDENT + "}"]


def format_method(m: Method) -> str:
    text = m.signature()
    nav = m.navigation
    if nav is not None:
        mode = "" if nav.mode is NavMode.PLAIN else nav.mode.value + " "
        text += f" nav {nav.target} [{mode}{nav.count.full()} -> {nav.delivery}]"
    return text + ";"
