"""Interface-definition generators for Java Beans, CORBA IDL and ActiveX MIDL.

None of the targets can express navigation semantics, so every navigating
method carries a structured ``@cid.navigation`` comment instead of losing it.
Basic types pass through by name; external types are referenced by name and
declared as forward interfaces where the target requires a declaration.
"""

from __future__ import annotations

import enum
import uuid
from pathlib import Path
from typing import Optional

from cidkit.check import Diagnostic, Severity
from cidkit.model import (
    UNKNOWN_LOCATION,
    CidModel,
    Component,
    InterfaceType,
    Method,
    Navigation,
    TypeKind,
    TypeRef,
    _effective_methods,
)


class GenProfile(enum.Enum):
    BEANS = "beans"
    CORBA_IDL = "corba"
    ACTIVEX = "activex"

    @property
    def extension(self) -> str:
        return {"beans": "java", "corba": "idl", "activex": "midl"}[self.value]


class CodegenError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


_RESERVED = {
    GenProfile.BEANS: frozenset(
        "abstract assert break case catch class const continue default do else enum "
        "extends final finally for goto if implements import instanceof interface native new "
        "package private protected public return static strictfp super switch synchronized "
        "this throw throws transient try void volatile while true false null".split()
    ),
    GenProfile.CORBA_IDL: frozenset(
        "abstract attribute case const context custom default enum exception factory FALSE "
        "fixed in inout interface local module native oneway out private public raises "
        "readonly sequence struct supports switch TRUE truncatable typedef union valuetype "
        "void".split()
    ),
    GenProfile.ACTIVEX: frozenset(
        "coclass cpp_quote default dispinterface enum import importlib in interface library "
        "module out retval struct typedef union uuid void".split()
    ),
}

CORBA_SERVANT_NOTE = (
    "A CORBA object implements exactly one interface, so an implementation\n"
    "needs one servant per interface below; the module only groups their names."
)


def nav_tag(nav: Navigation) -> str:
    return (
        f"@cid.navigation target={nav.target} mode={nav.mode.value} "
        f"count={nav.count.full()} delivery={nav.delivery} label={nav.label()}"
    )


def _check_names(comp: Component, profile: GenProfile, methods_of) -> list[Diagnostic]:
    reserved = _RESERVED[profile]
    diags = []

    def bad(rule: str, loc, msg: str) -> None:
        diags.append(Diagnostic(rule, Severity.ERROR, loc or comp.loc or UNKNOWN_LOCATION, msg))

    def typeref(ref: TypeRef, where: str) -> None:
        kind = ref.kind or comp.kind_of(ref.name)
        if kind is None:
            bad("UnmappableType", ref.loc, f"type {ref.name} of {where} has no {profile.value} rendering")
        elif ref.name in reserved:
            bad("UnmappableType", ref.loc, f"type {ref.name} of {where} is reserved in {profile.value}")

    for iface in comp.interfaces:
        if iface.name in reserved:
            bad("UnmappableType", iface.loc, f"interface name {iface.name} is reserved in {profile.value}")
        for _, m in methods_of(iface):
            where = f"{iface.name}.{m.name}"
            if m.name in reserved:
                bad("UnmappableType", m.loc, f"method name {m.name} is reserved in {profile.value}")
            for p in m.params:
                typeref(p.type, where)
                if p.name in reserved:
                    bad("UnmappableType", p.loc, f"parameter name {p.name} is reserved in {profile.value}")
            if m.return_type is not None:
                typeref(m.return_type, where)
    return diags


def emit_idl(model: CidModel, component: str, profile: GenProfile,
             flatten: bool = False) -> dict[str, str]:
    """Generate ``{file name: content}`` for one component; raises :class:`CodegenError`."""
    comp = model.component(component)
    flat = profile is GenProfile.ACTIVEX and flatten

    def methods_of(iface: InterfaceType) -> list[tuple[str, Method]]:
        if flat:
            return _effective_methods(comp, iface.name)
        return [(iface.name, m) for m in iface.methods]

    diags = []
    if profile is GenProfile.ACTIVEX and not flatten:
        for iface in comp.interfaces:
            if iface.supertypes:
                diags.append(Diagnostic(
                    "ActiveXSubtyping", Severity.ERROR, iface.loc or comp.loc or UNKNOWN_LOCATION,
                    f"interface {iface.name} declares supertypes {', '.join(iface.supertypes)}; "
                    "ActiveX has no interface subtyping (use --flatten to copy inherited methods)",
                ))
    diags += _check_names(comp, profile, methods_of)
    if diags:
        raise CodegenError(sorted(diags, key=lambda d: (d.location, d.rule)))

    if profile is GenProfile.BEANS:
        return _beans(comp)
    if profile is GenProfile.CORBA_IDL:
        return _corba(comp)
    return _activex(comp, methods_of, flat)


def write_outputs(files: dict[str, str], outdir, component: str, profile: GenProfile) -> list[Path]:
    """Write generated files to ``<outdir>/<component>/<profile>/``."""
    target = Path(outdir) / component / profile.value
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in files.items():
        path = target / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    return written


# -- Java Beans -------------------------------------------------------------


def _java_type(ref: Optional[TypeRef]) -> str:
    return "void" if ref is None else ref.name


def _beans(comp: Component) -> dict[str, str]:
    package = f"{comp.name}Bean"
    files: dict[str, str] = {}
    for iface in comp.interfaces:
        lines = [
            f"// Generated from CID component {comp.name}.",
            f"package {package};",
            "",
            "/**",
            f" * CID interface {iface.name}.",
            " *",
        ]
        if iface.principal:
            lines.append(" * @cid.stereotype principal")
        lines += [f" * @cid.multiplicity {iface.multiplicity.full()}", " */"]
        extends = f" extends {', '.join(iface.supertypes)}" if iface.supertypes else ""
        lines.append(f"public interface {iface.name}{extends} {{")
        for m in iface.methods:
            lines.append("")
            if m.navigation is not None:
                lines += ["    /**", f"     * {nav_tag(m.navigation)}", "     */"]
            params = ", ".join(f"{p.type.name} {p.name}" for p in m.params)
            lines.append(f"    {_java_type(m.return_type)} {m.name}({params});")
        lines.append("}")
        files[f"{iface.name}.java"] = "\n".join(lines) + "\n"

    manifest = [
        "Manifest-Version: 1.0",
        f"Bean-Package: {package}",
        f"CID-Component: {comp.name}",
        f"Principal-Interface: {comp.principal.name}",
    ]
    for name in files:
        manifest += ["", f"Name: {package}/{name}", "Java-Bean: False"]
    files["MANIFEST.txt"] = "\n".join(manifest) + "\n"
    return files


# -- CORBA IDL --------------------------------------------------------------


def _supertypes_first(comp: Component) -> list[InterfaceType]:
    done: list[str] = []

    def visit(name: str) -> None:
        if name in done:
            return
        for sup in comp.interface(name).supertypes:
            visit(sup)
        done.append(name)

    for iface in comp.interfaces:
        visit(iface.name)
    return [comp.interface(n) for n in done]


def _corba(comp: Component) -> dict[str, str]:
    lines = [f"// Generated from CID component {comp.name}.", ""]
    lines += [f"// {line}" for line in CORBA_SERVANT_NOTE.splitlines()]
    lines.append(f"module {comp.name} {{")
    if comp.externals:
        lines.append("")
        lines.append("  // environment types, defined outside this component")
        lines += [f"  interface {e};" for e in comp.externals]
    lines.append("")
    lines += [f"  interface {i.name};" for i in comp.interfaces]
    for iface in _supertypes_first(comp):
        lines.append("")
        stereo = " (principal)" if iface.principal else ""
        lines.append(f"  /** CID interface {iface.name}{stereo}, multiplicity {iface.multiplicity.full()}. */")
        inherit = f" : {', '.join(iface.supertypes)}" if iface.supertypes else ""
        lines.append(f"  interface {iface.name}{inherit} {{")
        for m in iface.methods:
            if m.navigation is not None:
                lines.append(f"    /** {nav_tag(m.navigation)} */")
            params = ", ".join(f"in {p.type.name} {p.name}" for p in m.params)
            lines.append(f"    {_java_type(m.return_type)} {m.name}({params});")
        lines.append("  };")
    lines.append("};")
    return {f"{comp.name}.idl": "\n".join(lines) + "\n"}


# -- ActiveX MIDL -----------------------------------------------------------


def _midl_type(comp: Component, ref: TypeRef, out: bool = False) -> str:
    kind = ref.kind or comp.kind_of(ref.name)
    stars = "*" if kind is not TypeKind.BASIC else ""
    return ref.name + stars + ("*" if out else "")


def _activex(comp: Component, methods_of, flat: bool) -> dict[str, str]:
    files = {}
    for iface in comp.interfaces:
        methods = methods_of(iface)
        used = sorted({
            t.name
            for _, m in methods
            for t in [*(p.type for p in m.params), *([m.return_type] if m.return_type else [])]
            if (t.kind or comp.kind_of(t.name)) is not TypeKind.BASIC and t.name != iface.name
        })
        iid = uuid.uuid5(uuid.NAMESPACE_URL, f"cid:{comp.name}/{iface.name}")
        lines = [f"// Generated from CID component {comp.name}.", 'import "unknwn.idl";', ""]
        lines += [f"interface {name};" for name in used]
        if used:
            lines.append("")
        stereo = ", principal" if iface.principal else ""
        lines += [
            "[",
            "  object,",
            f"  uuid({iid}),",
            f'  helpstring("CID interface {iface.name}{stereo}, multiplicity {iface.multiplicity.full()}")',
            "]",
            f"interface {iface.name} : IUnknown",
            "{",
        ]
        for owner, m in methods:
            if flat and owner != iface.name:
                lines.append(f"  // inherited from {owner}")
            if m.navigation is not None:
                lines.append(f"  // {nav_tag(m.navigation)}")
            params = [f"[in] {_midl_type(comp, p.type)} {p.name}" for p in m.params]
            if m.return_type is not None:
                result = "result"
                while result in {p.name for p in m.params}:
                    result += "_"
                params.append(f"[out, retval] {_midl_type(comp, m.return_type, out=True)} {result}")
            lines.append(f"  HRESULT {m.name}({', '.join(params)});")
        lines.append("};")
        files[f"{iface.name}.midl"] = "\n".join(lines) + "\n"
    return files
