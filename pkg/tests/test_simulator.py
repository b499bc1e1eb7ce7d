from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cidkit.parser import parse
from cidkit.runtime.simulator import (
    Deferred,
    InstanceHalted,
    ModelNotWellFormed,
    Nil,
    Refs,
    Simulator,
    Subscribed,
    UnknownSubscription,
    Violation,
)
from cidkit.runtime.trace import Callback
from cidkit.script import run_script
from generators import Walker, random_model


@pytest.fixture
def sim(part_handler):
    return Simulator(part_handler)


@pytest.fixture
def ph(sim):
    return sim.instantiate("PartHandler")


def test_instantiate_exports_only_the_principal(ph):
    inst, principal = ph
    assert principal.type == "BasicPartHandler"
    assert inst.snapshot().counts == {"BasicPartHandler": 1}
    assert inst.snapshot().links == ()
    assert not inst.shared_cache and not inst.plain_used and not inst.pending


def test_two_instances_have_distinct_principals(sim):
    _, a = sim.instantiate("PartHandler")
    _, b = sim.instantiate("PartHandler")
    assert a.id != b.id


def test_instantiate_rejects_unchecked_model():
    model = parse("component X { interface A [1] {} }")
    with pytest.raises(ModelNotWellFormed):
        Simulator(model).instantiate("X")


def test_get_menus_defaults_to_upper_bound(ph):
    inst, p = ph
    out = inst.navigate(p, "getMenus")
    assert isinstance(out, Refs) and len(out.refs) == 2
    assert {r.type for r in out.refs} == {"Menu"}


def test_get_menus_count_is_clamped(sim):
    inst, p = sim.instantiate("PartHandler")
    assert len(inst.navigate(p, "getMenus", count=1).refs) == 1
    inst2, p2 = sim.instantiate("PartHandler")
    assert len(inst2.navigate(p2, "getMenus", count=9).refs) == 2


def test_second_get_menus_is_r2(ph):
    inst, p = ph
    inst.navigate(p, "getMenus")
    out = inst.navigate(p, "getMenus")
    assert isinstance(out, Violation) and out.rule == "R2"
    with pytest.raises(InstanceHalted):
        inst.navigate(p, "getWidth")


def test_get_edit_twice_delivers_one_shared_ref(sim, ph):
    inst, p = ph
    g = sim.environment("EditReceiver")
    first, second = inst.navigate(p, "getEdit", (g,)), inst.navigate(p, "getEdit", (g,))
    assert isinstance(first, Deferred) and isinstance(second, Deferred)
    assert first.token != second.token
    deliveries = inst.flush_callbacks()
    assert [recv for recv, _ in deliveries] == [g, g]
    assert deliveries[0][1] == deliveries[1][1] and len(deliveries[0][1]) == 1


def test_shared_ref_goes_to_every_receiver(sim, ph):
    inst, p = ph
    g1, g2 = sim.environment("EditReceiver"), sim.environment("EditReceiver")
    inst.navigate(p, "getEdit", (g1,))
    inst.navigate(p, "getEdit", (g2,))
    (r1, refs1), (r2, refs2) = inst.flush_callbacks()
    assert (r1, r2) == (g1, g2) and refs1 == refs2


def test_flush_on_fresh_instance_is_empty(ph):
    assert ph[0].flush_callbacks() == []


def test_absent_optional_interface_delivers_nothing(sim, ph):
    inst, p = ph
    sim.provide("Edit", present=False)
    inst.navigate(p, "getEdit", (sim.environment("EditReceiver"),))
    ((_, refs),) = inst.flush_callbacks()
    assert refs == ()


def _undo(sim, inst, p):
    g = sim.environment("EditReceiver")
    inst.navigate(p, "getEdit", (g,))
    ((_, (edit,)),) = inst.flush_callbacks()
    (undo,) = inst.navigate(edit, "getUndo").refs
    return undo


def test_each_trigger_yields_a_fresh_undoable_action(sim, ph):
    inst, p = ph
    undo = _undo(sim, inst, p)
    listener = sim.environment("UndoActionListener")
    sub = inst.navigate(undo, "addActionListener", (listener,))
    assert isinstance(sub, Subscribed)
    inst.trigger(sub.token)
    inst.trigger(sub.token)
    (r1, a), (r2, b) = inst.flush_callbacks()
    assert r1 == r2 == listener
    assert len(a) == len(b) == 1 and a != b
    assert a[0].type == "UndoableAction"


def test_hundred_triggers_hundred_distinct_refs(sim, ph):
    inst, p = ph
    undo = _undo(sim, inst, p)
    sub = inst.navigate(undo, "addActionListener", (sim.environment("UndoActionListener"),))
    for _ in range(100):
        assert isinstance(inst.trigger(sub.token), Deferred)
    refs = [r for _, rs in inst.flush_callbacks() for r in rs]
    assert len(refs) == len({r.id for r in refs}) == 100


def test_unknown_subscription(ph):
    with pytest.raises(UnknownSubscription):
        ph[0].trigger("i1.s42")


def test_snapshot_after_menus_and_edit(sim, ph):
    inst, p = ph
    inst.navigate(p, "getMenus")
    inst.navigate(p, "getEdit", (sim.environment("EditReceiver"),))
    inst.flush_callbacks()
    assert inst.snapshot().counts == {"BasicPartHandler": 1, "Menu": 2, "Edit": 1}


def test_snapshot_ignores_flush_order(part_handler):
    def counts(order):
        sim = Simulator(part_handler)
        inst, p = sim.instantiate("PartHandler")
        g = sim.environment("EditReceiver")
        for step in order:
            if step == "edit":
                inst.navigate(p, "getEdit", (g,))
            elif step == "menus":
                inst.navigate(p, "getMenus")
            else:
                inst.flush_callbacks()
        inst.flush_callbacks()
        return inst.snapshot().counts

    assert counts(["edit", "flush", "menus"]) == counts(["menus", "edit", "flush"])


def test_unexported_source_is_r7(sim, ph):
    inst, p = ph
    inst.navigate(p, "getEdit", (sim.environment("EditReceiver"),))
    (edit,) = inst.pending[0].refs  # created but not yet delivered
    out = inst.navigate(edit, "activate")
    assert isinstance(out, Violation) and out.rule == "R7"


def test_unknown_method_is_r1(ph):
    inst, p = ph
    assert inst.navigate(p, "getMenu").rule == "R1"


def test_wrong_argument_kind_is_r1(sim, ph):
    inst, p = ph
    assert inst.navigate(p, "getEdit", (sim.value("String"),)).rule == "R1"


def test_plain_optional_navigation_returns_nil_when_exhausted():
    model = parse("""component X {
      principal interface P [1] { +opt() nav A [0..1 -> caller]; }
      interface A [0..1] {}
    }""")
    sim = Simulator(model)
    inst, p = sim.instantiate("X")
    assert len(inst.navigate(p, "opt").refs) == 1
    assert isinstance(inst.navigate(p, "opt"), Nil)


def test_aggregate_multiplicity_is_r5():
    model = parse("""component X {
      principal interface P [1] { +a() nav A [1 -> caller]; +b() nav A [1 -> caller]; }
      interface A [1] {}
    }""")
    sim = Simulator(model)
    inst, p = sim.instantiate("X")
    inst.navigate(p, "a")
    out = inst.navigate(p, "b")
    assert out.rule == "R5"
    assert inst.snapshot().counts == {"P": 1, "A": 1}


def test_inherited_methods_are_callable(drawing):
    sim = Simulator(drawing)
    inst, p = sim.instantiate("Drawing")
    (shape,) = inst.navigate(p, "getShape").refs
    assert inst.navigate(shape, "id") == Refs(())


def test_runs_are_reproducible(part_handler):
    script = "call principal.getMenus() count=1\nlet g = env EditReceiver\ncall principal.getEdit(g)\nflush\n"
    a = run_script(part_handler, "PartHandler", script).sim.events
    b = run_script(part_handler, "PartHandler", script).sim.events
    assert a == b


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_runtime_laws_on_random_walks(seed):
    rng = random.Random(seed)
    model = random_model(rng)
    w = Walker(model, rng, noise=0.02)
    for _ in range(rng.randint(1, 2)):
        w.instantiate(rng.choice(model.component_names()))
    history = []
    shared_seen = {}
    while not w.stopped and len(w.sim.events) < 150:
        w.step()
        snap = {i.id: {k: list(v) for k, v in i.exported.items()} for i in w.instances}
        for prev in history[-1:]:
            for inst_id, ifaces in prev.items():
                for name, refs in ifaces.items():
                    assert snap[inst_id][name][:len(refs)] == refs  # monotone export
        history.append(snap)
        for inst in w.instances:
            for key, refs in inst.shared_cache.items():
                assert shared_seen.setdefault((inst.id, key), refs) == refs  # shared idempotence
    # fresh distinctness: no ref id is ever delivered by two different creations
    created = [r.id for i in w.instances for refs in i.exported.values() for r in refs]
    assert len(created) == len(set(created))
    for ev in w.sim.events:
        if isinstance(ev, Callback):
            assert len(set(ev.refs)) == len(ev.refs)
