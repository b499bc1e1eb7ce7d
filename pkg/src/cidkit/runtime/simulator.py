"""Executable navigation semantics for component instances.

A :class:`Simulator` owns the id counter and the shared event log for one run.
Component instances it creates answer navigation acts the way a conforming
implementation would:

* plain navigations create refs on their first act only; later acts return
  nil when the navigation's lower bound is 0 and are a violation otherwise;
* shared navigations create their ref set lazily and hand the same set to
  every caller afterwards;
* fresh navigations create new refs on every act, or on every trigger of a
  subscription when they deliver to a parameter;
* parameter deliveries are queued and only reach their receiver on
  :meth:`ComponentInstance.flush_callbacks`.

Ids come from deterministic counters, so a fixed script always yields the
same trace.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from cidkit.check import check, errors
from cidkit.model import (
    CidModel,
    Component,
    Method,
    Navigation,
    NavMode,
    Param,
    TypeKind,
    _effective_methods,
    _linearize,
)
from cidkit.runtime.trace import (
    EXT_PREFIX,
    VAL_PREFIX,
    Call,
    Callback,
    Instantiate,
    Return,
    ReturnNil,
    TraceEvent,
    Trigger,
)


class Origin(enum.Enum):
    PRINCIPAL = "principal"
    NAVIGATED = "navigated"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class ObjectRef:
    id: str
    type: str
    kind: TypeKind
    origin: Origin
    inst: Optional[str] = None  # owning instance for component refs
    via: Optional[str] = None  # navigating method for NAVIGATED refs


@dataclass(frozen=True)
class Refs:
    refs: tuple[ObjectRef, ...]


@dataclass(frozen=True)
class Deferred:
    token: str


@dataclass(frozen=True)
class Subscribed:
    token: str


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str


NavOutcome = Union[Refs, Deferred, Subscribed, Nil, Violation]


@dataclass(frozen=True)
class Subscription:
    id: str
    source: ObjectRef
    method: Method
    receiver: ObjectRef

    @property
    def navigation(self) -> Navigation:
        assert self.method.navigation is not None
        return self.method.navigation


@dataclass(frozen=True)
class PendingDelivery:
    token: str
    receiver: ObjectRef
    refs: tuple[ObjectRef, ...]
    iface: str


@dataclass(frozen=True)
class Link:
    source: str
    method: str
    target: str


@dataclass(frozen=True)
class Snapshot:
    counts: dict[str, int]
    links: tuple[Link, ...]


class ModelNotWellFormed(Exception):
    def __init__(self, component: str, diagnostics):
        self.diagnostics = diagnostics
        lines = "\n".join(str(d) for d in diagnostics)
        super().__init__(f"component {component} fails the checker:\n{lines}")


class UnknownSubscription(KeyError):
    pass


class InstanceHalted(RuntimeError):
    pass


class Simulator:
    """One simulation run: shared ids, event log and scenario flags."""

    def __init__(self, model: CidModel):
        self.model = model
        self.events: list[TraceEvent] = []
        self.absent: set[str] = set()
        self.instances: dict[str, ComponentInstance] = {}
        self.component_refs: dict[str, ObjectRef] = {}
        # Component refs that have reached the environment (returned or called back).
        self.introduced: set[str] = set()
        self._next_instance = 0
        self._next_env: dict[str, int] = {}

    def provide(self, iface: str, present: bool = True) -> None:
        """Scenario flag for optional interfaces; absent ones are created 0 at a time."""
        if present:
            self.absent.discard(iface)
        else:
            self.absent.add(iface)

    def instantiate(self, component: str) -> tuple["ComponentInstance", ObjectRef]:
        comp = self.model.component(component)
        problems = errors(check(CidModel((comp,))))
        if problems:
            raise ModelNotWellFormed(component, problems)
        self._next_instance += 1
        inst = ComponentInstance(self, comp, f"i{self._next_instance}")
        self.instances[inst.id] = inst
        self.introduced.add(inst.principal_ref.id)
        self.events.append(Instantiate(comp.name, inst.id, inst.principal_ref.id))
        return inst, inst.principal_ref

    def environment(self, type_name: str) -> ObjectRef:
        """A fresh environment object, e.g. a callback receiver."""
        return ObjectRef(self._env_id(EXT_PREFIX, type_name), type_name, TypeKind.EXTERNAL,
                         Origin.ENVIRONMENT)

    def value(self, type_name: str) -> ObjectRef:
        """A basic value; basic values cross component borders freely."""
        return ObjectRef(self._env_id(VAL_PREFIX, type_name), type_name, TypeKind.BASIC,
                         Origin.ENVIRONMENT)

    def _env_id(self, prefix: str, type_name: str) -> str:
        n = self._next_env.get(prefix + type_name, 0) + 1
        self._next_env[prefix + type_name] = n
        return f"{prefix}{type_name}.{n}"


class ComponentInstance:
    """Runtime state of one component instance; single-threaded."""

    def __init__(self, sim: Simulator, comp: Component, inst_id: str):
        self.sim = sim
        self.component = comp
        self.id = inst_id
        self._counters: dict[str, int] = {}
        principal = comp.principal.name
        self.principal_ref = self._new_ref(principal, Origin.PRINCIPAL)
        self.exported: dict[str, list[ObjectRef]] = {i.name: [] for i in comp.interfaces}
        self.exported[principal].append(self.principal_ref)
        self.shared_cache: dict[tuple[str, tuple[str, int]], tuple[ObjectRef, ...]] = {}
        self.plain_used: set[tuple[str, tuple[str, int]]] = set()
        self.subscriptions: dict[str, Subscription] = {}
        self.pending: deque[PendingDelivery] = deque()
        self.links: list[Link] = []
        self.halted: Optional[Violation] = None
        self._methods = {
            i.name: {m.key: m for _, m in _effective_methods(comp, i.name)} for i in comp.interfaces
        }

    # -- helpers ---------------------------------------------------------

    def _token(self, letter: str) -> str:
        n = self._counters.get(letter, 0) + 1
        self._counters[letter] = n
        return f"{self.id}.{letter}{n}"

    def _new_ref(self, iface: str, origin: Origin, via: Optional[str] = None) -> ObjectRef:
        ref = ObjectRef(self._token("r"), iface, TypeKind.INTERFACE, origin, self.id, via)
        self.sim.component_refs[ref.id] = ref
        return ref

    def _emit(self, ev: TraceEvent) -> None:
        self.sim.events.append(ev)

    def _halt(self, rule: str, message: str) -> Violation:
        self.halted = Violation(rule, message)
        return self.halted

    def _is_exported(self, ref: ObjectRef) -> bool:
        return ref.inst == self.id and ref.id in self.sim.introduced

    def _arg_fits(self, ref: ObjectRef, type_name: str) -> bool:
        kind = self.component.kind_of(type_name)
        if kind is TypeKind.BASIC:
            return ref.kind is TypeKind.BASIC
        if kind is TypeKind.EXTERNAL:
            return ref.kind is TypeKind.EXTERNAL or (
                ref.kind is TypeKind.INTERFACE and ref.inst != self.id
            )
        return (ref.kind is TypeKind.INTERFACE and ref.inst == self.id
                and type_name in _linearize(self.component, ref.type))

    def _count(self, nav: Navigation, requested: Optional[int]) -> int:
        if nav.target in self.sim.absent:
            return nav.count.lower
        if requested is None:
            return nav.count.default_count()
        return nav.count.clamp(requested)

    def _create(self, source: ObjectRef, m: Method, k: int) -> Union[tuple[ObjectRef, ...], Violation]:
        nav = m.navigation
        target = self.component.interface(nav.target)
        upper = target.multiplicity.upper
        have = len(self.exported[target.name])
        if upper is not None and have + k > upper:
            return self._halt("R5", f"creating {k} {target.name} refs would exceed "
                                    f"multiplicity {target.multiplicity} ({have} exist)")
        refs = tuple(self._new_ref(target.name, Origin.NAVIGATED, m.name) for _ in range(k))
        self.exported[target.name].extend(refs)
        self.links.extend(Link(source.id, m.name, r.id) for r in refs)
        return refs

    # -- operations ------------------------------------------------------

    def navigate(self, source: ObjectRef, method: str, args: tuple[ObjectRef, ...] = (),
                 count: Optional[int] = None) -> NavOutcome:
        """Perform one navigation act of ``source.method(args)``."""
        if self.halted is not None:
            raise InstanceHalted(f"{self.id} stopped after {self.halted.rule}")
        args = tuple(args)
        self._emit(Call(self.id, source.id, method, tuple(a.id for a in args)))
        if not self._is_exported(source):
            return self._halt("R7", f"{source.id} is not exported by {self.id}")
        for a in args:
            if a.kind is TypeKind.INTERFACE and a.id not in self.sim.introduced:
                return self._halt("R7", f"argument {a.id} was never introduced")
        m = self._methods[source.type].get((method, len(args)))
        if m is None:
            return self._halt("R1", f"{source.type} has no method {method}/{len(args)}")
        for p, a in zip(m.params, args):
            if not self._arg_fits(a, p.type.name):
                return self._halt("R1", f"argument {a.id} does not fit {p.name}: {p.type.name}")

        nav = m.navigation
        if nav is None:
            self._emit(Return((), None))
            return Refs(())
        key = (source.id, m.key)

        if nav.mode is NavMode.FRESH and isinstance(nav.delivery, Param):
            sub = Subscription(self._token("s"), source, m, args[m.param_index(nav.delivery.name)])
            self.subscriptions[sub.id] = sub
            self._emit(Return((), None, sub.id))
            return Subscribed(sub.id)

        if nav.mode is NavMode.PLAIN and key in self.plain_used:
            if nav.count.lower == 0:
                self._emit(ReturnNil())
                return Nil()
            return self._halt("R2", f"{method} may navigate to {nav.target} only once per source")

        if nav.mode is NavMode.SHARED and key in self.shared_cache:
            refs = self.shared_cache[key]
        else:
            created = self._create(source, m, self._count(nav, count))
            if isinstance(created, Violation):
                return created
            refs = created
            if nav.mode is NavMode.PLAIN:
                self.plain_used.add(key)
            elif nav.mode is NavMode.SHARED:
                self.shared_cache[key] = refs

        if isinstance(nav.delivery, Param):
            receiver = args[m.param_index(nav.delivery.name)]
            token = self._token("d")
            self.pending.append(PendingDelivery(token, receiver, refs, nav.target))
            self._emit(Return((), None))
            return Deferred(token)
        self.sim.introduced.update(r.id for r in refs)
        self._emit(Return(tuple(r.id for r in refs), nav.target))
        return Refs(refs)

    def trigger(self, subscription: str, count: Optional[int] = None) -> Union[Deferred, Violation]:
        """Fire a subscription: create fresh refs and queue them for its receiver."""
        if self.halted is not None:
            raise InstanceHalted(f"{self.id} stopped after {self.halted.rule}")
        sub = self.subscriptions.get(subscription)
        if sub is None:
            raise UnknownSubscription(subscription)
        self._emit(Trigger(sub.id))
        created = self._create(sub.source, sub.method, self._count(sub.navigation, count))
        if isinstance(created, Violation):
            return created
        token = self._token("d")
        self.pending.append(PendingDelivery(token, sub.receiver, created, sub.navigation.target))
        return Deferred(token)

    def flush_callbacks(self) -> list[tuple[ObjectRef, tuple[ObjectRef, ...]]]:
        """Deliver every queued callback in FIFO order."""
        out = []
        while self.pending:
            d = self.pending.popleft()
            self.sim.introduced.update(r.id for r in d.refs)
            self._emit(Callback(d.receiver.id, tuple(r.id for r in d.refs), d.iface, self.id))
            out.append((d.receiver, d.refs))
        return out

    def snapshot(self) -> Snapshot:
        counts = {name: len(refs) for name, refs in self.exported.items() if refs}
        return Snapshot(counts, tuple(self.links))
