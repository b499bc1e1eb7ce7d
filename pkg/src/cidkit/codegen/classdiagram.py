"""Lowering of a CID into an ordinary class diagram.

Interfaces become classes (multiplicities kept as annotations), supertype
declarations become generalizations, and each navigation becomes a
dependency from the navigating class, through the method, to the target.
"""

from __future__ import annotations

from dataclasses import dataclass

from cidkit.model import CidModel, Multiplicity


@dataclass(frozen=True)
class UmlClass:
    name: str
    methods: tuple[str, ...]
    multiplicity: Multiplicity
    stereotype: str = ""


@dataclass(frozen=True)
class Generalization:
    sub: str
    sup: str


@dataclass(frozen=True)
class Dependency:
    source: str
    method: str
    target: str
    label: str


@dataclass(frozen=True)
class ClassDiagramModel:
    name: str
    classes: tuple[UmlClass, ...]
    generalizations: tuple[Generalization, ...]
    dependencies: tuple[Dependency, ...]


def to_class_diagram(model: CidModel, component: str) -> ClassDiagramModel:
    comp = model.component(component)
    classes = tuple(
        UmlClass(i.name, tuple(m.signature() for m in i.methods), i.multiplicity,
                 "principal" if i.principal else "")
        for i in comp.interfaces
    )
    gens = tuple(Generalization(i.name, s) for i in comp.interfaces for s in i.supertypes)
    deps = tuple(
        Dependency(iface.name, m.name, nav.target, nav.label())
        for iface, m, nav in comp.navigations()
    )
    return ClassDiagramModel(comp.name, classes, gens, deps)
