"""In-memory representation of Component Interface Diagrams.

A model is a tree of frozen dataclasses. Source locations ride along on every
node but are excluded from equality, so two models are structurally equal when
they describe the same diagram regardless of where the text came from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True, order=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


UNKNOWN_LOCATION = SourceLocation("<model>", 1, 1)


@dataclass(frozen=True)
class Multiplicity:
    """Integer range; ``upper is None`` means unbounded."""

    lower: int
    upper: Optional[int] = None

    @classmethod
    def exactly(cls, n: int) -> "Multiplicity":
        return cls(n, n)

    @property
    def bounded(self) -> bool:
        return self.upper is not None

    def is_valid(self) -> bool:
        return self.lower >= 0 and (self.upper is None or self.lower <= self.upper)

    def contains(self, n: int) -> bool:
        return n >= self.lower and (self.upper is None or n <= self.upper)

    def clamp(self, n: int) -> int:
        n = max(n, self.lower)
        return n if self.upper is None else min(n, self.upper)

    def default_count(self) -> int:
        """Widest legal count: the upper bound when bounded, else the lower bound."""
        return self.lower if self.upper is None else self.upper

    def short(self) -> str:
        """``1`` for 1..1, otherwise ``lower..upper`` with ``*`` for unbounded."""
        if self.upper == self.lower:
            return str(self.lower)
        return self.full()

    def full(self) -> str:
        return f"{self.lower}..{'*' if self.upper is None else self.upper}"

    def __str__(self) -> str:
        return self.short()


class TypeKind(enum.Enum):
    INTERFACE = "interface"
    BASIC = "basic"
    EXTERNAL = "external"


@dataclass(frozen=True)
class TypeRef:
    name: str
    kind: Optional[TypeKind] = None  # None until name resolution
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)


class NavMode(enum.Enum):
    PLAIN = "plain"
    SHARED = "shared"  # drawn as '$'
    FRESH = "fresh"  # drawn as '*'

    @property
    def glyph(self) -> str:
        return {"plain": "", "shared": "$", "fresh": "*"}[self.value]


@dataclass(frozen=True)
class Caller:
    def __str__(self) -> str:
        return "caller"


@dataclass(frozen=True)
class Param:
    name: str

    def __str__(self) -> str:
        return self.name


Delivery = Union[Caller, Param]
CALLER = Caller()


@dataclass(frozen=True)
class Navigation:
    target: str
    mode: NavMode = NavMode.PLAIN
    count: Multiplicity = Multiplicity(1, 1)
    delivery: Delivery = CALLER
    # Name of the method the arrow starts at. None means "the enclosing method";
    # programmatic builders may set it, and the checker flags mismatches.
    origin: Optional[str] = None
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)

    def label(self) -> str:
        """Diagram label in glyph form, e.g. ``$0..1->g``."""
        return f"{self.mode.glyph}{self.count.short()}->{self.delivery}"


@dataclass(frozen=True)
class Parameter:
    name: str
    type: TypeRef
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[Parameter, ...] = ()
    return_type: Optional[TypeRef] = None
    navigation: Optional[Navigation] = None
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, len(self.params))

    def param_index(self, name: str) -> int:
        for i, p in enumerate(self.params):
            if p.name == name:
                return i
        raise KeyError(name)

    def signature(self) -> str:
        params = ", ".join(f"{p.name}: {p.type.name}" for p in self.params)
        ret = f": {self.return_type.name}" if self.return_type else ""
        return f"+{self.name}({params}){ret}"


@dataclass(frozen=True)
class InterfaceType:
    name: str
    multiplicity: Multiplicity = Multiplicity(1, 1)
    principal: bool = False
    supertypes: tuple[str, ...] = ()
    methods: tuple[Method, ...] = ()
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)

    def own_method(self, name: str, arity: int) -> Optional[Method]:
        for m in self.methods:
            if m.name == name and m.arity == arity:
                return m
        return None


@dataclass(frozen=True)
class Component:
    name: str
    basics: tuple[str, ...] = ()
    externals: tuple[str, ...] = ()
    interfaces: tuple[InterfaceType, ...] = ()
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)

    def interface(self, name: str) -> InterfaceType:
        for iface in self.interfaces:
            if iface.name == name:
                return iface
        raise UnknownInterface(f"component {self.name} has no interface {name}")

    def has_interface(self, name: str) -> bool:
        return any(i.name == name for i in self.interfaces)

    def principals(self) -> list[InterfaceType]:
        return [i for i in self.interfaces if i.principal]

    @property
    def principal(self) -> InterfaceType:
        found = self.principals()
        if len(found) != 1:
            raise ModelError(f"component {self.name} has {len(found)} principal interfaces")
        return found[0]

    def kind_of(self, name: str) -> Optional[TypeKind]:
        if self.has_interface(name):
            return TypeKind.INTERFACE
        if name in self.basics:
            return TypeKind.BASIC
        if name in self.externals:
            return TypeKind.EXTERNAL
        return None

    def navigations(self) -> Iterator[tuple[InterfaceType, Method, Navigation]]:
        for iface in self.interfaces:
            for m in iface.methods:
                if m.navigation is not None:
                    yield iface, m, m.navigation


@dataclass(frozen=True)
class CidModel:
    components: tuple[Component, ...] = ()

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise UnknownComponent(name)

    def component_names(self) -> list[str]:
        return [c.name for c in self.components]


class ModelError(Exception):
    pass


class UnknownComponent(ModelError):
    pass


class UnknownInterface(ModelError):
    pass


class InheritanceCycle(ModelError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("inheritance cycle: " + " -> ".join(cycle))


class SignatureConflict(ModelError):
    def __init__(self, iface: str, method: str, arity: int, owners: tuple[str, str]):
        self.iface = iface
        self.method = method
        self.arity = arity
        self.owners = owners
        super().__init__(
            f"{iface} inherits conflicting definitions of {method}/{arity} "
            f"from {owners[0]} and {owners[1]}"
        )


def linearize_supertypes(model: CidModel, component: str, iface: str) -> list[str]:
    """Return ``iface`` followed by its supertypes, depth-first, first occurrence kept."""
    comp = model.component(component)
    return _linearize(comp, iface)


def _linearize(comp: Component, iface: str) -> list[str]:
    comp.interface(iface)
    order: list[str] = []
    seen: set[str] = set()
    stack_path: list[str] = []

    def visit(name: str) -> None:
        if name in stack_path:
            cycle = stack_path[stack_path.index(name):] + [name]
            raise InheritanceCycle(cycle)
        if name in seen:
            return
        seen.add(name)
        order.append(name)
        stack_path.append(name)
        for sup in comp.interface(name).supertypes:
            visit(sup)
        stack_path.pop()

    visit(iface)
    return order


def is_subtype(comp: Component, sub: str, sup: str) -> bool:
    return sup in _linearize(comp, sub)


def effective_methods(model: CidModel, component: str, iface: str) -> list[tuple[str, Method]]:
    """Methods visible on ``iface`` as ``(owner, method)`` pairs.

    Overriding is keyed on (name, arity): the most specific declaration wins
    and keeps the position of the first occurrence. Same-key methods from
    unrelated supertypes must agree on return type and navigation.
    """
    comp = model.component(component)
    return _effective_methods(comp, iface)


def _effective_methods(comp: Component, iface: str) -> list[tuple[str, Method]]:
    result: list[tuple[str, Method]] = []
    index: dict[tuple[str, int], int] = {}
    for owner in _linearize(comp, iface):
        for m in comp.interface(owner).methods:
            slot = index.get(m.key)
            if slot is None:
                index[m.key] = len(result)
                result.append((owner, m))
                continue
            prev_owner, prev = result[slot]
            if prev_owner == owner or is_subtype(comp, prev_owner, owner):
                continue
            if is_subtype(comp, owner, prev_owner):
                result[slot] = (owner, m)
                continue
            if prev.return_type != m.return_type or prev.navigation != m.navigation:
                raise SignatureConflict(iface, m.name, m.arity, (prev_owner, owner))
    return result


def find_method(comp: Component, iface: str, name: str, arity: int) -> Optional[Method]:
    for _, m in _effective_methods(comp, iface):
        if m.name == name and m.arity == arity:
            return m
    return None
