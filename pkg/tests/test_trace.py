from __future__ import annotations

import json

import pytest

from cidkit.runtime.trace import (
    Call,
    Callback,
    Instantiate,
    MalformedEvent,
    Return,
    ReturnNil,
    Trigger,
    dump_trace,
    event_to_dict,
    parse_trace,
)

EVENTS = [
    Instantiate("PartHandler", "i1", "i1.r1"),
    Call("i1", "i1.r1", "getEdit", ("ext:EditReceiver.1",)),
    Return((), None),
    Call("i1", "i1.r1", "getMenus"),
    Return(("i1.r2", "i1.r3"), "Menu"),
    Call("i1", "i1.r4", "addActionListener", ("ext:L.1",)),
    Return((), None, "i1.s1"),
    Trigger("i1.s1"),
    Callback("ext:EditReceiver.1", ("i1.r5",), "Edit", "i1"),
    Callback("ext:EditReceiver.1", (), "Edit"),
    ReturnNil(),
]


def test_round_trip():
    text = dump_trace(EVENTS)
    assert list(parse_trace(text.splitlines())) == EVENTS
    assert len(text.splitlines()) == len(EVENTS)


def test_field_names_on_the_wire():
    keys = set()
    for ev in EVENTS:
        keys |= set(event_to_dict(ev))
    assert keys <= {"ev", "inst", "on", "method", "args", "refs", "iface", "to", "sub", "component"}
    assert {event_to_dict(ev)["ev"] for ev in EVENTS} == {
        "instantiate", "call", "return", "return_nil", "callback", "trigger"}


def test_blank_lines_skipped():
    lines = ['{"ev": "trigger", "sub": "a.s1"}', "", "  ", '{"ev": "return_nil"}']
    assert list(parse_trace(lines)) == [Trigger("a.s1"), ReturnNil()]


@pytest.mark.parametrize("line,needle", [
    ("not json", "invalid JSON"),
    ("[1, 2]", "not an object"),
    ('{"ev": "explode"}', "unknown event kind"),
    ('{"ev": "call", "inst": "i1", "on": "i1.r1"}', "lacks"),
    ('{"ev": "trigger", "sub": "s", "extra": 1}', "unknown fields"),
    ('{"ev": "trigger", "sub": 3}', "non-empty string"),
    ('{"ev": "return", "refs": "i1.r1", "iface": "A"}', "list of ref ids"),
    ('{"ev": "instantiate", "component": "C", "inst": "i1", "refs": []}', "exactly one"),
])
def test_malformed_records(line, needle):
    good = json.dumps({"ev": "return_nil"})
    with pytest.raises(MalformedEvent) as info:
        list(parse_trace([good, "", line]))
    assert info.value.index == 1
    assert needle in str(info.value)
