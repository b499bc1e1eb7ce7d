from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cidkit.check import Severity, check, errors
from cidkit.model import CidModel
from cidkit.parser import parse
from conftest import PART_HANDLER
from generators import random_model
from mutants import MUTANTS


def rules(model) -> list[str]:
    return [d.rule for d in check(model)]


def test_fixtures_are_clean(part_handler, doc_manager, drawing):
    assert check(part_handler) == []
    assert check(doc_manager) == []
    assert check(drawing) == []


def test_missing_principal_gives_one_w1():
    model = parse(PART_HANDLER.read_text().replace("principal interface", "interface"))
    assert [d.rule for d in errors(check(model))] == ["W1"]


def test_bounded_fresh_target_is_w6_at_the_navigation():
    text = PART_HANDLER.read_text()
    model = parse(text.replace("UndoableAction [0..*]", "UndoableAction [1]"), "p.cid")
    (d,) = check(model)
    assert d.rule == "W6"
    line = text.splitlines()[d.location.line - 1]
    assert "addActionListener" in line and line[d.location.column - 1:].startswith("nav")


@pytest.mark.parametrize("rule", sorted(MUTANTS, key=lambda r: int(r[1:])))
def test_mutant_triggers_rule(rule):
    _, build = MUTANTS[rule]
    found = check(build())
    assert rule in [d.rule for d in found if d.severity is Severity.ERROR], [str(d) for d in found]


def test_two_principals_is_w1():
    model = parse("component X { principal interface A [1] {} principal interface B [1] {} }")
    assert "W1" in rules(model)


def test_signature_conflict_surfaces_as_w8():
    model = parse("""component X {
      principal interface P [1] { +a(): A nav A [1 -> caller]; }
      interface A : L, R [0..1] {}
      interface L [0..*] { +f() nav L [1 -> caller]; }
      interface R [0..*] { +f() nav R [1 -> caller]; }
    }""")
    assert "W8" in rules(model)


def test_unreachable_interface_is_only_a_warning():
    model = parse("component X { principal interface P [1] {} interface Lonely [0..1] {} }")
    (d,) = check(model)
    assert (d.rule, d.severity) == ("W11", Severity.WARNING)
    assert errors([d]) == []


def test_supertypes_of_navigation_targets_count_as_reachable(drawing):
    assert check(drawing) == []


def test_diagnostic_text_format():
    model = parse("component X { principal interface P [1] {} interface Lonely [0..1] {} }", "x.cid")
    assert str(check(model)[0]) == (
        "x.cid:1:44: warning [W11] interface Lonely is not the target of any navigation "
        "and cannot be reached")


def test_diagnostics_sorted_by_location_then_rule():
    model = parse("""component X {
      interface A [0..1] {}
      principal interface P [1..2] { +f() nav A [fresh 1 -> caller]; }
    }""")
    found = check(model)
    assert [d.rule for d in found] == ["W10", "W6"]
    assert found == sorted(found, key=lambda d: d.sort_key())


def test_programmatic_model_without_locations():
    from cidkit.model import UNKNOWN_LOCATION, Component, InterfaceType, Multiplicity

    comp = Component("K", interfaces=(InterfaceType("P", Multiplicity(2, 1), principal=True),))
    found = check(CidModel((comp,)))
    assert {d.rule for d in found} == {"W9", "W10"}
    assert all(d.location == UNKNOWN_LOCATION for d in found)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_deterministic_and_locations_in_source(seed):
    from cidkit.formatter import format_model

    rng = random.Random(seed)
    text = format_model(random_model(rng))
    # mutate a multiplicity to provoke findings
    text = text.replace("[1]", "[0..3]", 1)
    model = parse(text, "r.cid")
    first, second = check(model), check(model)
    assert first == second
    lines = text.split("\n")
    for d in first:
        assert d.message
        assert 1 <= d.location.line <= len(lines)
        assert 1 <= d.location.column <= len(lines[d.location.line - 1])
