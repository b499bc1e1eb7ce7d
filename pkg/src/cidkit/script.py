"""Line-oriented simulation scripts.

One directive per line; ``#`` starts a comment::

    provide Edit = absent
    let g = env EditReceiver
    let v = value String
    call principal.getEdit(g)
    flush
    let e = received g
    let menus = call principal.getMenus() count=1
    call menus[0].getTitle()
    let s = call u.addActionListener(l)
    trigger s

``principal`` is bound to the principal ref of the instantiated component.
A variable holds either a list of refs (``x`` means ``x[0]``) or a token
returned by a subscribing or deferred call. ``received g`` binds every ref
delivered to ``g`` so far, in delivery order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from cidkit.model import CidModel
from cidkit.runtime.simulator import (
    ComponentInstance,
    Deferred,
    Nil,
    ObjectRef,
    Refs,
    Simulator,
    Subscribed,
    Violation,
)

_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_REF = rf"{_NAME}(?:\[\d+\])?"
_CALL = rf"call\s+(?P<on>{_REF})\.(?P<method>{_NAME})\((?P<args>[^)]*)\)(?:\s+count=(?P<count>\d+))?"

_DIRECTIVES = [
    ("provide", re.compile(rf"provide\s+(?P<iface>{_NAME})\s*=\s*(?P<state>present|absent)")),
    ("env", re.compile(rf"let\s+(?P<var>{_NAME})\s*=\s*env\s+(?P<type>{_NAME})")),
    ("value", re.compile(rf"let\s+(?P<var>{_NAME})\s*=\s*value\s+(?P<type>{_NAME})")),
    ("received", re.compile(rf"let\s+(?P<var>{_NAME})\s*=\s*received\s+(?P<src>{_REF})")),
    ("call", re.compile(rf"(?:let\s+(?P<var>{_NAME})\s*=\s*)?{_CALL}")),
    ("trigger", re.compile(rf"trigger\s+(?P<sub>{_NAME})(?:\s+count=(?P<count>\d+))?")),
    ("flush", re.compile(r"flush")),
]


class ScriptError(Exception):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class Directive:
    kind: str
    line: int
    fields: dict


def parse_script(text: str) -> list[Directive]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for kind, rx in _DIRECTIVES:
            m = rx.fullmatch(line)
            if m:
                out.append(Directive(kind, lineno, m.groupdict()))
                break
        else:
            raise ScriptError(lineno, f"cannot parse directive {line!r}")
    return out


@dataclass
class ScriptResult:
    sim: Simulator
    instance: ComponentInstance
    violation: Optional[Violation] = None
    bindings: dict = field(default_factory=dict)


def run_script(model: CidModel, component: str, script: Union[str, list[Directive]]) -> ScriptResult:
    """Instantiate ``component`` and execute ``script``; stops at the first violation."""
    directives = parse_script(script) if isinstance(script, str) else script
    sim = Simulator(model)
    inst, principal = sim.instantiate(component)
    env: dict[str, Union[list[ObjectRef], str]] = {"principal": [principal]}
    received: dict[str, list[ObjectRef]] = {}
    result = ScriptResult(sim, inst, bindings=env)

    def lookup(expr: str, line: int) -> ObjectRef:
        m = re.fullmatch(rf"({_NAME})(?:\[(\d+)\])?", expr.strip())
        if m is None:
            raise ScriptError(line, f"bad reference {expr!r}")
        name, index = m.group(1), int(m.group(2) or 0)
        if name not in env:
            raise ScriptError(line, f"undefined variable {name!r}")
        value = env[name]
        if isinstance(value, str):
            raise ScriptError(line, f"{name!r} holds a token, not refs")
        if index >= len(value):
            raise ScriptError(line, f"{name!r} holds {len(value)} refs, no index {index}")
        return value[index]

    for d in directives:
        f = d.fields
        if d.kind == "provide":
            sim.provide(f["iface"], f["state"] == "present")
        elif d.kind == "env":
            env[f["var"]] = [sim.environment(f["type"])]
        elif d.kind == "value":
            env[f["var"]] = [sim.value(f["type"])]
        elif d.kind == "received":
            src = lookup(f["src"], d.line)
            env[f["var"]] = list(received.get(src.id, []))
        elif d.kind == "flush":
            for receiver, refs in inst.flush_callbacks():
                bucket = received.setdefault(receiver.id, [])
                bucket.extend(r for r in refs if r not in bucket)
        elif d.kind == "trigger":
            token = env.get(f["sub"])
            if not isinstance(token, str) or token not in inst.subscriptions:
                raise ScriptError(d.line, f"{f['sub']!r} is not a subscription")
            count = int(f["count"]) if f["count"] else None
            outcome = inst.trigger(token, count)
            if isinstance(outcome, Violation):
                result.violation = outcome
                return result
        elif d.kind == "call":
            on = lookup(f["on"], d.line)
            args = tuple(lookup(a, d.line) for a in f["args"].split(",") if a.strip())
            count = int(f["count"]) if f["count"] else None
            outcome = inst.navigate(on, f["method"], args, count)
            if isinstance(outcome, Violation):
                result.violation = outcome
                return result
            if f["var"]:
                if isinstance(outcome, Refs):
                    env[f["var"]] = list(outcome.refs)
                elif isinstance(outcome, (Subscribed, Deferred)):
                    env[f["var"]] = outcome.token
                else:
                    assert isinstance(outcome, Nil)
                    env[f["var"]] = []
    return result
