"""Conformance monitor for recorded component traces.

The monitor replays events against the navigation semantics of a checked
model and stops at the first violation. For each event the checks below run
in order; the first failing one decides.

Pairing: a ``call`` must be answered by the very next event, which must be
``return`` or ``return_nil``; anything else is a :class:`MalformedEvent`.

``call``
    R7 unknown instance, receiver not exported by that instance, or an
    argument that is neither ``ext:``/``val:`` nor a known ref.
    R1 no method with that name and arity on the receiver's interface
    (inherited included), or an argument of the wrong kind for its parameter.
    R2 repeat act on an exhausted plain navigation whose lower bound is > 0.

``return`` / ``return_nil``
    Malformed on duplicate or non-component ref ids, refs without ``iface``,
    or a ``sub`` token that is missing, unexpected, or reused.
    R2 refs returned by a method without navigation or with parameter
    delivery, a wrong ``iface``, a non-nil answer to an exhausted optional
    plain navigation, or a count outside the navigation's range.
    R3 a shared navigation answering with a different set than before.
    R4 a fresh navigation answering with an already known ref.
    R2 a known ref re-delivered as another interface or instance.
    R5 the instance now exports more refs of an interface than allowed.

``callback``
    R7 unknown instance or receiver; R6 no outstanding delivery for that
    receiver and interface (oldest outstanding delivery is consumed); then
    the count, R3, R4, R2 and R5 checks as for returns.

``trigger``
    R7 unknown subscription token.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Optional

from cidkit.model import (
    CidModel,
    Component,
    Method,
    Multiplicity,
    Navigation,
    NavMode,
    Param,
    TypeKind,
    UnknownComponent,
    _effective_methods,
    _linearize,
)
from cidkit.runtime.trace import (
    Call,
    Callback,
    Instantiate,
    MalformedEvent,
    Return,
    ReturnNil,
    TraceEvent,
    Trigger,
    is_env_id,
    is_value_id,
)


@dataclass(frozen=True)
class Violation:
    index: int
    rule: str
    message: str

    def __str__(self) -> str:
        return f"VIOLATION {self.rule} at event {self.index}: {self.message}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    first_violation: Optional[Violation] = None

    def __str__(self) -> str:
        return "OK" if self.ok else str(self.first_violation)


class _Fail(Exception):
    def __init__(self, rule: str, message: str):
        self.rule = rule
        self.message = message


class _ComponentTables:
    """Per-component lookups computed once per monitor."""

    def __init__(self, comp: Component):
        self.comp = comp
        self.principal = comp.principal.name
        self.methods: dict[str, dict[tuple[str, int], Method]] = {}
        self.ancestors: dict[str, frozenset[str]] = {}
        self.upper: dict[str, Optional[int]] = {}
        for iface in comp.interfaces:
            self.methods[iface.name] = {m.key: m for _, m in _effective_methods(comp, iface.name)}
            self.ancestors[iface.name] = frozenset(_linearize(comp, iface.name))
            self.upper[iface.name] = iface.multiplicity.upper
        self.kinds = {name: comp.kind_of(name) for name in (*comp.basics, *comp.externals)}
        for iface in comp.interfaces:
            self.kinds[iface.name] = TypeKind.INTERFACE


@dataclass
class _Obligation:
    inst: str
    nav: Navigation
    key: tuple


@dataclass
class _Pending:
    index: int
    inst: str
    on: str
    method: Method
    args: tuple[str, ...]


class TraceMonitor:
    """Incremental monitor; feed events one at a time with :meth:`feed`."""

    def __init__(self, model: CidModel):
        self.model = model
        self._tables: dict[str, _ComponentTables] = {}
        self.instances: dict[str, _ComponentTables] = {}
        self.refs: dict[str, tuple[str, str]] = {}
        self.counts: dict[tuple[str, str], int] = defaultdict(int)
        self.envs: set[str] = set()
        self.plain_used: set[tuple] = set()
        self.shared: dict[tuple, frozenset[str]] = {}
        self.subs: dict[str, tuple[str, str, Navigation, tuple]] = {}
        self.obligations: dict[tuple[str, str], deque[_Obligation]] = defaultdict(deque)
        self.pending: Optional[_Pending] = None
        self.index = 0
        self.violation: Optional[Violation] = None

    def tables(self, component: str) -> Optional[_ComponentTables]:
        if component not in self._tables:
            try:
                comp = self.model.component(component)
            except UnknownComponent:
                return None
            self._tables[component] = _ComponentTables(comp)
        return self._tables[component]

    def feed(self, ev: TraceEvent) -> Optional[Violation]:
        """Process one event. Raises :class:`MalformedEvent`; returns a violation or None."""
        if self.violation is not None:
            return self.violation
        idx = self.index
        self.index += 1
        try:
            self._dispatch(ev, idx)
        except _Fail as f:
            self.violation = Violation(idx, f.rule, f.message)
        return self.violation

    def verdict(self) -> Verdict:
        return Verdict(self.violation is None, self.violation)

    # ------------------------------------------------------------------

    def _dispatch(self, ev: TraceEvent, idx: int) -> None:
        response = isinstance(ev, (Return, ReturnNil))
        if self.pending is not None and not response:
            raise MalformedEvent(idx, f"call at event {self.pending.index} has no response")
        if self.pending is None and response:
            raise MalformedEvent(idx, "response without a preceding call")
        if isinstance(ev, Call):
            self._call(ev, idx)
        elif response:
            self._response(ev, idx)
        elif isinstance(ev, Callback):
            self._callback(ev, idx)
        elif isinstance(ev, Trigger):
            self._trigger(ev)
        elif isinstance(ev, Instantiate):
            self._instantiate(ev, idx)
        else:
            raise MalformedEvent(idx, f"not a trace event: {ev!r}")

    def _instantiate(self, ev: Instantiate, idx: int) -> None:
        if ev.inst in self.instances:
            raise MalformedEvent(idx, f"instance {ev.inst} instantiated twice")
        tables = self.tables(ev.component)
        if tables is None:
            raise MalformedEvent(idx, f"unknown component {ev.component}")
        p = ev.principal
        if is_env_id(p) or is_value_id(p) or p in self.refs:
            raise MalformedEvent(idx, f"principal ref {p} is not a fresh component ref")
        self.instances[ev.inst] = tables
        self.refs[p] = (ev.inst, tables.principal)
        self.counts[(ev.inst, tables.principal)] += 1

    def _call(self, ev: Call, idx: int) -> None:
        tables = self.instances.get(ev.inst)
        if tables is None:
            raise _Fail("R7", f"unknown instance {ev.inst}")
        owner = self.refs.get(ev.on)
        if owner is None or owner[0] != ev.inst:
            raise _Fail("R7", f"{ev.on} is not an interface exported by {ev.inst}")
        for a in ev.args:
            if not (is_env_id(a) or is_value_id(a) or a in self.refs):
                raise _Fail("R7", f"argument {a} used before it was introduced")
        iface = owner[1]
        m = tables.methods[iface].get((ev.method, len(ev.args)))
        if m is None:
            raise _Fail("R1", f"{iface} has no method {ev.method}/{len(ev.args)}")
        for p, a in zip(m.params, ev.args):
            kind = tables.kinds.get(p.type.name)
            if kind is TypeKind.BASIC:
                good = is_value_id(a)
            elif kind is TypeKind.EXTERNAL:
                good = is_env_id(a) or (a in self.refs and self.refs[a][0] != ev.inst)
            else:
                info = self.refs.get(a)
                good = (info is not None and info[0] == ev.inst
                        and p.type.name in tables.ancestors[info[1]])
            if not good:
                raise _Fail("R1", f"argument {a} does not fit parameter {p.name}: {p.type.name}")
        self.envs.update(a for a in ev.args if is_env_id(a))
        nav = m.navigation
        if (nav is not None and nav.mode is NavMode.PLAIN and nav.count.lower > 0
                and (ev.on, m.key) in self.plain_used):
            raise _Fail("R2", f"{iface}.{ev.method} already navigated from {ev.on}; "
                              f"no further {nav.target} refs may be requested")
        self.pending = _Pending(idx, ev.inst, ev.on, m, ev.args)

    @staticmethod
    def _ref_list(refs: tuple[str, ...], idx: int) -> None:
        if len(set(refs)) != len(refs):
            raise MalformedEvent(idx, "duplicate ref ids in one delivery")
        for r in refs:
            if is_env_id(r) or is_value_id(r):
                raise MalformedEvent(idx, f"{r} is not a component ref")

    def _response(self, ev, idx: int) -> None:
        call = self.pending
        self.pending = None
        if isinstance(ev, Return):
            refs, iface, sub = ev.refs, ev.iface, ev.sub
        else:
            refs, iface, sub = (), None, None
        self._ref_list(refs, idx)
        if refs and iface is None:
            raise MalformedEvent(idx, "returned refs without an interface name")
        m = call.method
        nav = m.navigation
        wants_sub = nav is not None and nav.mode is NavMode.FRESH and isinstance(nav.delivery, Param)
        if wants_sub and sub is None:
            raise MalformedEvent(idx, f"{m.name} registers a subscription but no token was returned")
        if not wants_sub and sub is not None:
            raise MalformedEvent(idx, f"{m.name} does not register subscriptions")
        if sub is not None and sub in self.subs:
            raise MalformedEvent(idx, f"subscription token {sub} reused")

        if nav is None:
            if refs:
                raise _Fail("R2", f"{m.name} has no navigation but returned refs")
            return
        key = (call.on, m.key)
        if isinstance(nav.delivery, Param):
            if refs:
                raise _Fail("R2", f"{m.name} delivers to parameter {nav.delivery.name}, not to the caller")
            receiver = call.args[m.param_index(nav.delivery.name)]
            if nav.mode is NavMode.FRESH:
                self.subs[sub] = (call.inst, receiver, nav, key)
            elif nav.mode is NavMode.SHARED or key not in self.plain_used:
                if nav.mode is NavMode.PLAIN:
                    self.plain_used.add(key)
                self.obligations[(receiver, nav.target)].append(_Obligation(call.inst, nav, key))
            return

        if refs and iface != nav.target:
            raise _Fail("R2", f"{m.name} must return {nav.target} refs, got {iface}")
        if nav.mode is NavMode.PLAIN and key in self.plain_used:
            if refs:
                raise _Fail("R2", f"exhausted optional navigation {m.name} must return nil")
            return
        if nav.mode is NavMode.PLAIN:
            self.plain_used.add(key)
        self._deliver(call.inst, nav, key, refs, m.name)

    def _deliver(self, inst: str, nav: Navigation, key: tuple, refs: tuple[str, ...], what: str) -> None:
        if nav.mode is NavMode.SHARED:
            cached = self.shared.get(key)
            if cached is not None:
                if frozenset(refs) != cached:
                    raise _Fail("R3", f"shared navigation {what} delivered {sorted(refs)}, "
                                      f"earlier {sorted(cached)}")
                return
        if not _in_range(nav.count, len(refs)):
            raise _Fail("R2", f"{what} delivered {len(refs)} {nav.target} refs, "
                              f"allowed {nav.count.full()}")
        if nav.mode is NavMode.SHARED:
            self.shared[key] = frozenset(refs)
        elif nav.mode is NavMode.FRESH:
            for r in refs:
                if r in self.refs:
                    raise _Fail("R4", f"fresh navigation {what} delivered already known ref {r}")
        tables = self.instances[inst]
        for r in refs:
            known = self.refs.get(r)
            if known is not None:
                if known != (inst, nav.target):
                    raise _Fail("R2", f"{r} was introduced as {known[1]} of {known[0]}, "
                                      f"not {nav.target} of {inst}")
                continue
            self.refs[r] = (inst, nav.target)
            slot = (inst, nav.target)
            self.counts[slot] += 1
            upper = tables.upper[nav.target]
            if upper is not None and self.counts[slot] > upper:
                raise _Fail("R5", f"{inst} exports {self.counts[slot]} {nav.target} refs, "
                                  f"multiplicity allows {upper}")

    def _callback(self, ev: Callback, idx: int) -> None:
        self._ref_list(ev.refs, idx)
        if ev.inst is not None and ev.inst not in self.instances:
            raise _Fail("R7", f"unknown instance {ev.inst}")
        if ev.to not in self.envs and ev.to not in self.refs:
            raise _Fail("R7", f"callback receiver {ev.to} was never introduced")
        queue = self.obligations.get((ev.to, ev.iface))
        ob = None
        if queue:
            if ev.inst is None:
                ob = queue.popleft()
            else:
                for cand in queue:
                    if cand.inst == ev.inst:
                        ob = cand
                        queue.remove(cand)
                        break
        if ob is None:
            raise _Fail("R6", f"no outstanding {ev.iface} delivery to {ev.to}")
        self._deliver(ob.inst, ob.nav, ob.key, ev.refs, f"callback to {ev.to}")

    def _trigger(self, ev: Trigger) -> None:
        sub = self.subs.get(ev.sub)
        if sub is None:
            raise _Fail("R7", f"unknown subscription {ev.sub}")
        inst, receiver, nav, key = sub
        self.obligations[(receiver, nav.target)].append(_Obligation(inst, nav, key))


def _in_range(count: Multiplicity, n: int) -> bool:
    return count.contains(n)


def check_trace(model: CidModel, events: Iterable[TraceEvent]) -> Verdict:
    """Replay ``events``; raises :class:`MalformedEvent` on structurally invalid input."""
    monitor = TraceMonitor(model)
    for ev in events:
        if monitor.feed(ev) is not None:
            break
    return monitor.verdict()
