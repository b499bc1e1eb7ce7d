from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cidkit.model import (
    CALLER,
    CidModel,
    Component,
    InheritanceCycle,
    InterfaceType,
    Method,
    Multiplicity,
    Navigation,
    NavMode,
    Param,
    SignatureConflict,
    UnknownComponent,
    UnknownInterface,
    effective_methods,
    is_subtype,
    linearize_supertypes,
)
from generators import random_component


def _model(*ifaces: InterfaceType) -> CidModel:
    return CidModel((Component("K", interfaces=ifaces),))


def iface(name, *supers, methods=()):
    return InterfaceType(name, Multiplicity(0, None), False, tuple(supers), tuple(methods))


def test_linearize_without_supertypes():
    assert linearize_supertypes(_model(iface("A")), "K", "A") == ["A"]


def test_linearize_single_edge():
    m = _model(iface("Undo", "Edit"), iface("Edit"))
    assert linearize_supertypes(m, "K", "Undo") == ["Undo", "Edit"]


def test_linearize_diamond_depth_first_first_occurrence():
    m = _model(iface("A", "B", "C"), iface("B", "D"), iface("C", "D"), iface("D"))
    assert linearize_supertypes(m, "K", "A") == ["A", "B", "D", "C"]


def test_linearize_cycle_names_members():
    m = _model(iface("A", "B"), iface("B", "C"), iface("C", "A"))
    with pytest.raises(InheritanceCycle) as info:
        linearize_supertypes(m, "K", "A")
    assert set(info.value.cycle) >= {"A", "B", "C"}


def test_linearize_unknown_names():
    with pytest.raises(UnknownComponent):
        linearize_supertypes(_model(iface("A")), "Nope", "A")
    with pytest.raises(UnknownInterface):
        linearize_supertypes(_model(iface("A")), "K", "Z")


def test_is_subtype():
    comp = _model(iface("A", "B"), iface("B")).components[0]
    assert is_subtype(comp, "A", "B")
    assert is_subtype(comp, "A", "A")
    assert not is_subtype(comp, "B", "A")


def test_effective_methods_own_only():
    m = _model(iface("A", methods=[Method("f"), Method("g")]))
    assert [(o, x.name) for o, x in effective_methods(m, "K", "A")] == [("A", "f"), ("A", "g")]


def test_effective_methods_override_keeps_subtype_owner():
    base = iface("Base", methods=[Method("f"), Method("g")])
    sub = iface("Sub", "Base", methods=[Method("f", return_type=None), Method("h")])
    out = effective_methods(_model(sub, base), "K", "Sub")
    assert len(out) == 3
    owners = {x.name: o for o, x in out}
    assert owners == {"f": "Sub", "h": "Sub", "g": "Base"}


def test_effective_methods_conflicting_unrelated_supertypes():
    left = iface("L", methods=[Method("f", navigation=Navigation("L"))])
    right = iface("R", methods=[Method("f", navigation=Navigation("R"))])
    with pytest.raises(SignatureConflict):
        effective_methods(_model(iface("A", "L", "R"), left, right), "K", "A")


def test_effective_methods_same_signature_from_two_sides_is_fine():
    left = iface("L", methods=[Method("f")])
    right = iface("R", methods=[Method("f")])
    out = effective_methods(_model(iface("A", "L", "R"), left, right), "K", "A")
    assert [x.name for _, x in out] == ["f"]


def test_overload_by_arity_is_not_override():
    from cidkit.model import Parameter, TypeRef

    base = iface("Base", methods=[Method("f")])
    sub = iface("Sub", "Base", methods=[Method("f", (Parameter("x", TypeRef("Base")),))])
    assert len(effective_methods(_model(sub, base), "K", "Sub")) == 2


@pytest.mark.parametrize("m,text,full", [
    (Multiplicity(1, 1), "1", "1..1"),
    (Multiplicity(0, 1), "0..1", "0..1"),
    (Multiplicity(0, None), "0..*", "0..*"),
])
def test_multiplicity_rendering(m, text, full):
    assert m.short() == text
    assert m.full() == full


def test_multiplicity_arithmetic():
    m = Multiplicity(1, 2)
    assert m.contains(1) and m.contains(2) and not m.contains(3) and not m.contains(0)
    assert m.clamp(5) == 2 and m.clamp(0) == 1
    assert m.default_count() == 2
    assert Multiplicity(2, None).default_count() == 2
    assert not Multiplicity(2, 1).is_valid()


@pytest.mark.parametrize("nav,label", [
    (Navigation("Edit", NavMode.SHARED, Multiplicity(0, 1), Param("g")), "$0..1->g"),
    (Navigation("Menu", NavMode.PLAIN, Multiplicity(1, 2), CALLER), "1..2->caller"),
    (Navigation("UndoableAction", NavMode.FRESH, Multiplicity(1, 1), Param("l")), "*1->l"),
])
def test_navigation_labels(nav, label):
    assert nav.label() == label


def test_equality_ignores_locations(part_handler):
    from cidkit.parser import parse

    text = "component E { principal interface P [1] { } }"
    assert parse(text, "a.cid") == parse("\n\n" + text, "b.cid")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_linearization_and_method_set_laws(seed):
    comp = random_component(random.Random(seed), "R")
    model = CidModel((comp,))
    for i in comp.interfaces:
        order = linearize_supertypes(model, "R", i.name)
        assert order[0] == i.name
        assert len(order) == len(set(order)) <= len(comp.interfaces)
        assert order == linearize_supertypes(model, "R", i.name)
        keys = {m.key for _, m in effective_methods(model, "R", i.name)}
        assert {m.key for m in i.methods} <= keys
