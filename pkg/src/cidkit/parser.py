"""Parser for the textual ``.cid`` notation.

Grammar::

    model      = { component } ;
    component  = "component" IDENT "{" { decl } "}" ;
    decl       = "basic" IDENT ";" | "external" IDENT ";" | interface ;
    interface  = [ "principal" ] "interface" IDENT [ ":" IDENT { "," IDENT } ]
                 "[" mult "]" "{" { method } "}" ;
    mult       = NAT [ ".." ( NAT | "*" ) ] ;
    method     = "+" IDENT "(" [ param { "," param } ] ")" [ ":" IDENT ] [ nav ] ";" ;
    param      = IDENT ":" IDENT ;
    nav        = "nav" IDENT "[" [ "shared" | "fresh" ] mult "->" target "]" ;
    target     = "caller" | IDENT ;

Parsing runs in two passes: a recursive-descent pass builds the tree with
unresolved type references, then a resolution pass binds every name inside
its component. Syntax errors stop the first pass; resolution collects every
problem it finds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from cidkit.model import (
    CALLER,
    CidModel,
    Component,
    Delivery,
    InterfaceType,
    Method,
    Multiplicity,
    Navigation,
    NavMode,
    Param,
    Parameter,
    SourceLocation,
    TypeKind,
    TypeRef,
)

KEYWORDS = frozenset(
    {"component", "basic", "external", "principal", "interface", "nav", "shared", "fresh", "caller"}
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<nat>[0-9]+)
  | (?P<punct>\.\.|->|[{}\[\]():;,+*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class ParseDiagnostic:
    location: SourceLocation
    message: str
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        text = f"{self.location}: error: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text


class ParseError(Exception):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        assert diagnostics
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'keyword', 'nat', 'punct', 'eof'
    text: str
    loc: SourceLocation

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return f"'{self.text}'"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, pos, line_start = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            loc = SourceLocation(file, line, col)
            raise ParseError([ParseDiagnostic(loc, f"illegal character {text[pos]!r}")])
        kind = m.lastgroup
        value = m.group()
        if kind == "ident" and value in KEYWORDS:
            kind = "keyword"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, SourceLocation(file, line, col)))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", SourceLocation(file, line, pos - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        # (name, location) of bare-name declarations, keyed by id() of the owning node.
        self.name_locs: dict[int, list[tuple[str, SourceLocation]]] = {}

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("keyword", "punct") and self.tok.text == text

    def fail(self, *expected: str) -> ParseError:
        return ParseError(
            [ParseDiagnostic(self.tok.loc, f"unexpected {self.tok.describe()}", tuple(expected))]
        )

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def accept(self, text: str) -> Optional[Token]:
        return self.advance() if self.at(text) else None

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.fail(what)
        return self.advance()

    # -- grammar ---------------------------------------------------------

    def model(self) -> list[Component]:
        comps = []
        while self.tok.kind != "eof":
            if not self.at("component"):
                raise self.fail("'component'", "end of input")
            comps.append(self.component())
        return comps

    def component(self) -> Component:
        start = self.expect("component")
        name = self.ident("component name").text
        self.expect("{")
        basics: list[str] = []
        externals: list[str] = []
        interfaces: list[InterfaceType] = []
        decl_locs: list[tuple[str, SourceLocation]] = []
        while not self.at("}"):
            if self.at("basic") or self.at("external"):
                kw = self.advance().text
                tok = self.ident(f"{kw} type name")
                self.expect(";")
                (basics if kw == "basic" else externals).append(tok.text)
                decl_locs.append((tok.text, tok.loc))
            elif self.at("principal") or self.at("interface"):
                iface = self.interface()
                interfaces.append(iface)
                decl_locs.append((iface.name, iface.loc))
            else:
                raise self.fail("'basic'", "'external'", "'principal'", "'interface'", "'}'")
        self.expect("}")
        comp = Component(name, tuple(basics), tuple(externals), tuple(interfaces), loc=start.loc)
        self.name_locs[id(comp)] = decl_locs
        return comp

    def interface(self) -> InterfaceType:
        start = self.tok
        principal = self.accept("principal") is not None
        self.expect("interface")
        name = self.ident("interface name").text
        supers: list[Token] = []
        if self.accept(":"):
            supers.append(self.ident("supertype name"))
            while self.accept(","):
                supers.append(self.ident("supertype name"))
        self.expect("[")
        mult = self.mult()
        self.expect("]")
        self.expect("{")
        methods = []
        while not self.at("}"):
            if not self.at("+"):
                raise self.fail("'+'", "'}'")
            methods.append(self.method())
        self.expect("}")
        iface = InterfaceType(
            name, mult, principal, tuple(t.text for t in supers), tuple(methods), loc=start.loc
        )
        self.name_locs[id(iface)] = [(t.text, t.loc) for t in supers]
        return iface

    def mult(self) -> Multiplicity:
        start = self.tok
        if start.kind != "nat":
            raise self.fail("natural number")
        lower = int(self.advance().text)
        upper: Optional[int] = lower
        if self.accept(".."):
            if self.accept("*"):
                upper = None
            elif self.tok.kind == "nat":
                upper = int(self.advance().text)
            else:
                raise self.fail("natural number", "'*'")
        m = Multiplicity(lower, upper)
        if not m.is_valid():
            raise ParseError(
                [ParseDiagnostic(start.loc, f"multiplicity lower bound exceeds upper bound in {m.full()}")]
            )
        return m

    def method(self) -> Method:
        start = self.expect("+")
        name = self.ident("method name").text
        self.expect("(")
        params: list[Parameter] = []
        if not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        ret = None
        if self.accept(":"):
            tok = self.ident("return type")
            ret = TypeRef(tok.text, loc=tok.loc)
        nav = self.nav() if self.at("nav") else None
        self.expect(";")
        seen: set[str] = set()
        for p in params:
            if p.name in seen:
                raise ParseError(
                    [ParseDiagnostic(p.loc, f"duplicate parameter {p.name!r} in method {name}")]
                )
            seen.add(p.name)
        return Method(name, tuple(params), ret, nav, loc=start.loc)

    def param(self) -> Parameter:
        tok = self.ident("parameter name")
        self.expect(":")
        ty = self.ident("parameter type")
        return Parameter(tok.text, TypeRef(ty.text, loc=ty.loc), loc=tok.loc)

    def nav(self) -> Navigation:
        start = self.expect("nav")
        target = self.ident("navigation target").text
        self.expect("[")
        mode = NavMode.PLAIN
        if self.accept("shared"):
            mode = NavMode.SHARED
        elif self.accept("fresh"):
            mode = NavMode.FRESH
        count = self.mult()
        self.expect("->")
        delivery: Delivery
        if self.accept("caller"):
            delivery = CALLER
        else:
            delivery = Param(self.ident("'caller' or parameter name").text)
        self.expect("]")
        return Navigation(target, mode, count, delivery, loc=start.loc)


def _resolve(
    comps: list[Component], name_locs: dict[int, list[tuple[str, SourceLocation]]]
) -> list[Component]:
    errors: list[ParseDiagnostic] = []

    def err(loc: Optional[SourceLocation], msg: str) -> None:
        assert loc is not None
        errors.append(ParseDiagnostic(loc, msg))

    seen_comps: set[str] = set()
    resolved: list[Component] = []
    for comp in comps:
        if comp.name in seen_comps:
            err(comp.loc, f"duplicate component {comp.name!r}")
        seen_comps.add(comp.name)

        declared: set[str] = set()
        for name, loc in name_locs[id(comp)]:
            if name in declared:
                err(loc, f"{name!r} declared more than once in {comp.name}")
            declared.add(name)

        def typeref(ref: TypeRef) -> TypeRef:
            kind = comp.kind_of(ref.name)
            if kind is None:
                err(ref.loc, f"unresolved type {ref.name!r} in component {comp.name}")
            return replace(ref, kind=kind)

        new_ifaces = []
        for iface in comp.interfaces:
            for sup, loc in name_locs[id(iface)]:
                kind = comp.kind_of(sup)
                if kind is None:
                    err(loc, f"unresolved supertype {sup!r} of {iface.name}")
                elif kind is not TypeKind.INTERFACE:
                    err(loc, f"supertype {sup!r} of {iface.name} is not an interface")
            methods = []
            for m in iface.methods:
                params = tuple(replace(p, type=typeref(p.type)) for p in m.params)
                ret = typeref(m.return_type) if m.return_type else None
                nav = m.navigation
                if nav is not None:
                    if comp.kind_of(nav.target) is None:
                        err(nav.loc, f"unresolved navigation target {nav.target!r}")
                    if isinstance(nav.delivery, Param) and nav.delivery.name not in {
                        p.name for p in m.params
                    }:
                        err(nav.loc, f"navigation delivers to unknown parameter {nav.delivery.name!r}")
                methods.append(replace(m, params=params, return_type=ret))
            new_ifaces.append(replace(iface, methods=tuple(methods)))
        resolved.append(replace(comp, interfaces=tuple(new_ifaces)))
    if errors:
        raise ParseError(errors)
    return resolved


def parse(text: str, file: str = "<input>") -> CidModel:
    """Parse ``.cid`` text into a name-resolved model; raises :class:`ParseError`."""
    parser = _Parser(tokenize(text, file))
    comps = parser.model()
    return CidModel(tuple(_resolve(comps, parser.name_locs)))


def parse_file(path) -> CidModel:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))
