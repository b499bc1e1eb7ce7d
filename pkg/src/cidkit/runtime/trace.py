"""Trace events and their newline-delimited JSON encoding.

One JSON object per line; ``ev`` selects the variant::

    {"ev": "instantiate", "component": "PartHandler", "inst": "i1", "refs": ["i1.r1"]}
    {"ev": "call", "inst": "i1", "on": "i1.r1", "method": "getEdit", "args": ["ext:EditReceiver.1"]}
    {"ev": "return", "refs": [], "iface": null}
    {"ev": "return", "refs": [], "sub": "i1.s1"}
    {"ev": "return_nil"}
    {"ev": "callback", "inst": "i1", "to": "ext:EditReceiver.1", "refs": ["i1.r2"], "iface": "Edit"}
    {"ev": "trigger", "sub": "i1.s1"}

Ref ids are strings. Environment objects use the ``ext:`` prefix and basic
values the ``val:`` prefix; every other id names a component object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

EXT_PREFIX = "ext:"
VAL_PREFIX = "val:"


def is_env_id(ref: str) -> bool:
    return ref.startswith(EXT_PREFIX)


def is_value_id(ref: str) -> bool:
    return ref.startswith(VAL_PREFIX)


@dataclass(frozen=True)
class Instantiate:
    component: str
    inst: str
    principal: str


@dataclass(frozen=True)
class Call:
    inst: str
    on: str
    method: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Return:
    refs: tuple[str, ...] = ()
    iface: Optional[str] = None
    sub: Optional[str] = None  # set when the call registered a subscription


@dataclass(frozen=True)
class ReturnNil:
    pass


@dataclass(frozen=True)
class Callback:
    to: str
    refs: tuple[str, ...]
    iface: str
    inst: Optional[str] = None


@dataclass(frozen=True)
class Trigger:
    sub: str


TraceEvent = Union[Instantiate, Call, Return, ReturnNil, Callback, Trigger]


class MalformedEvent(Exception):
    def __init__(self, index: int, message: str):
        self.index = index
        self.message = message
        super().__init__(f"malformed event {index}: {message}")


def event_to_dict(ev: TraceEvent) -> dict:
    if isinstance(ev, Instantiate):
        return {"ev": "instantiate", "component": ev.component, "inst": ev.inst, "refs": [ev.principal]}
    if isinstance(ev, Call):
        return {"ev": "call", "inst": ev.inst, "on": ev.on, "method": ev.method, "args": list(ev.args)}
    if isinstance(ev, Return):
        d = {"ev": "return", "refs": list(ev.refs), "iface": ev.iface}
        if ev.sub is not None:
            d["sub"] = ev.sub
        return d
    if isinstance(ev, ReturnNil):
        return {"ev": "return_nil"}
    if isinstance(ev, Callback):
        d = {"ev": "callback", "to": ev.to, "refs": list(ev.refs), "iface": ev.iface}
        if ev.inst is not None:
            d["inst"] = ev.inst
        return d
    if isinstance(ev, Trigger):
        return {"ev": "trigger", "sub": ev.sub}
    raise TypeError(f"not a trace event: {ev!r}")


def dumps_event(ev: TraceEvent) -> str:
    return json.dumps(event_to_dict(ev), separators=(", ", ": "))


def dump_trace(events: Iterable[TraceEvent]) -> str:
    return "".join(dumps_event(e) + "\n" for e in events)


_FIELDS = {
    "instantiate": ({"component", "inst", "refs"}, set()),
    "call": ({"inst", "on", "method", "args"}, set()),
    "return": ({"refs"}, {"iface", "sub"}),
    "return_nil": (set(), set()),
    "callback": ({"to", "refs", "iface"}, {"inst"}),
    "trigger": ({"sub"}, set()),
}


def event_from_dict(d: object, index: int = 0) -> TraceEvent:
    if not isinstance(d, dict):
        raise MalformedEvent(index, "event is not an object")
    kind = d.get("ev")
    if kind not in _FIELDS:
        raise MalformedEvent(index, f"unknown event kind {kind!r}")
    required, optional = _FIELDS[kind]
    keys = set(d) - {"ev"}
    if missing := required - keys:
        raise MalformedEvent(index, f"{kind} event lacks {', '.join(sorted(missing))}")
    if extra := keys - required - optional:
        raise MalformedEvent(index, f"{kind} event has unknown fields {', '.join(sorted(extra))}")

    def string(key: str, nullable: bool = False) -> Optional[str]:
        v = d.get(key)
        if v is None and nullable:
            return None
        if not isinstance(v, str) or not v:
            raise MalformedEvent(index, f"field {key!r} must be a non-empty string")
        return v

    def strings(key: str) -> tuple[str, ...]:
        v = d[key]
        if not isinstance(v, list) or not all(isinstance(x, str) and x for x in v):
            raise MalformedEvent(index, f"field {key!r} must be a list of ref ids")
        return tuple(v)

    if kind == "instantiate":
        refs = strings("refs")
        if len(refs) != 1:
            raise MalformedEvent(index, "instantiate must name exactly one principal ref")
        return Instantiate(string("component"), string("inst"), refs[0])
    if kind == "call":
        return Call(string("inst"), string("on"), string("method"), strings("args"))
    if kind == "return":
        return Return(strings("refs"), string("iface", True), string("sub", True))
    if kind == "return_nil":
        return ReturnNil()
    if kind == "callback":
        return Callback(string("to"), strings("refs"), string("iface"), string("inst", True))
    return Trigger(string("sub"))


def parse_trace(lines: Iterable[str]) -> Iterator[TraceEvent]:
    """Decode NDJSON lines lazily; blank lines are skipped and not counted."""
    index = 0
    for line in lines:
        if not line.strip():
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedEvent(index, f"invalid JSON: {exc.msg}") from None
        yield event_from_dict(d, index)
        index += 1
