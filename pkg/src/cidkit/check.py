"""Static well-formedness rules for CID models.

Rule catalog (all errors except W11):

    W1   exactly one principal interface per component
    W2   acyclic interface inheritance
    W3   a navigation hangs off the method that declares it
    W4   navigation targets an interface of the same component
    W5   parameter delivery names a declared external- or interface-typed parameter
    W6   fresh navigation targets an interface with unbounded multiplicity
    W7   plain/shared navigation count fits the target multiplicity
    W8   no duplicate (name, arity) per interface; no inherited signature conflicts
    W9   multiplicities satisfy lower <= upper
    W10  the principal interface has multiplicity exactly 1
    W11  (warning) every non-principal interface is reachable by some navigation
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from cidkit.model import (
    UNKNOWN_LOCATION,
    CidModel,
    Component,
    InheritanceCycle,
    ModelError,
    Multiplicity,
    NavMode,
    Param,
    SignatureConflict,
    SourceLocation,
    TypeKind,
    _effective_methods,
    _linearize,
)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    severity: Severity
    location: SourceLocation
    message: str

    def sort_key(self) -> tuple:
        loc = self.location
        return (loc.file, loc.line, loc.column, self.rule[:1], int(self.rule[1:] or 0))

    def __str__(self) -> str:
        return f"{self.location}: {self.severity.value} [{self.rule}] {self.message}"


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity is Severity.ERROR]


def check(model: CidModel) -> list[Diagnostic]:
    """Run every rule on every component; findings sorted by location then rule."""
    out: list[Diagnostic] = []
    for comp in model.components:
        out.extend(_check_component(comp))
    return sorted(out, key=Diagnostic.sort_key)


def _check_component(comp: Component) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    def report(rule: str, loc: Optional[SourceLocation], message: str,
               severity: Severity = Severity.ERROR) -> None:
        out.append(Diagnostic(rule, severity, loc or comp.loc or UNKNOWN_LOCATION, message))

    principals = comp.principals()
    if len(principals) != 1:
        names = ", ".join(p.name for p in principals) or "none"
        report("W1", comp.loc, f"component {comp.name} needs exactly one principal interface, found {names}")

    cyclic = _report_cycles(comp, report)

    for iface in comp.interfaces:
        _check_mult("W9", iface.multiplicity, iface.loc, f"interface {iface.name}", report)
        if iface.principal and iface.multiplicity != Multiplicity(1, 1):
            report("W10", iface.loc,
                   f"principal interface {iface.name} must have multiplicity 1, not {iface.multiplicity}")

        seen: set[tuple[str, int]] = set()
        for m in iface.methods:
            if m.key in seen:
                report("W8", m.loc, f"{iface.name} declares {m.name}/{m.arity} more than once")
            seen.add(m.key)

        if iface.name not in cyclic:
            try:
                _effective_methods(comp, iface.name)
            except SignatureConflict as exc:
                report("W8", iface.loc, str(exc))
            except ModelError:
                pass

        for m in iface.methods:
            nav = m.navigation
            if nav is None:
                continue
            where = f"{iface.name}.{m.name}"
            if nav.origin is not None and nav.origin != m.name:
                report("W3", nav.loc, f"navigation on {where} claims to start at missing method {nav.origin!r}")
            _check_mult("W9", nav.count, nav.loc, f"navigation count of {where}", report)

            if comp.kind_of(nav.target) is not TypeKind.INTERFACE:
                report("W4", nav.loc, f"navigation from {where} targets {nav.target!r}, "
                                      f"which is not an interface of {comp.name}")
                target = None
            else:
                target = comp.interface(nav.target)

            if isinstance(nav.delivery, Param):
                pname = nav.delivery.name
                param = next((p for p in m.params if p.name == pname), None)
                if param is None:
                    report("W5", nav.loc, f"navigation from {where} delivers to undeclared parameter {pname!r}")
                elif comp.kind_of(param.type.name) not in (TypeKind.EXTERNAL, TypeKind.INTERFACE):
                    report("W5", nav.loc, f"callback parameter {pname!r} of {where} has type "
                                          f"{param.type.name}, which cannot receive interfaces")

            if target is None:
                continue
            upper = target.multiplicity.upper
            if nav.mode is NavMode.FRESH and upper is not None:
                report("W6", nav.loc, f"fresh navigation from {where} targets {target.name} "
                                      f"with bounded multiplicity {target.multiplicity}")
            if (nav.mode is not NavMode.FRESH and nav.count.upper is not None
                    and upper is not None and nav.count.upper > upper):
                report("W7", nav.loc, f"navigation from {where} may deliver {nav.count.upper} "
                                      f"{target.name} refs but at most {upper} may exist")

    _report_unreachable(comp, report)
    return out


def _check_mult(rule, mult: Multiplicity, loc, what: str, report) -> None:
    if not mult.is_valid():
        report(rule, loc, f"{what} has invalid multiplicity {mult.full()}")


def _report_cycles(comp: Component, report) -> set[str]:
    cyclic: set[str] = set()
    reported: set[frozenset[str]] = set()
    for iface in comp.interfaces:
        try:
            _linearize(comp, iface.name)
        except InheritanceCycle as exc:
            members = frozenset(exc.cycle)
            cyclic.add(iface.name)
            if members not in reported:
                reported.add(members)
                report("W2", iface.loc, str(exc))
        except ModelError:
            pass
    return cyclic


def _report_unreachable(comp: Component, report) -> None:
    targets = {nav.target for _, _, nav in comp.navigations()}
    reachable = set()
    for name in targets:
        if not comp.has_interface(name):
            continue
        try:
            reachable.update(_linearize(comp, name))
        except ModelError:
            reachable.add(name)
    for iface in comp.interfaces:
        if not iface.principal and iface.name not in reachable:
            report("W11", iface.loc,
                   f"interface {iface.name} is not the target of any navigation and cannot be reached",
                   Severity.WARNING)
