"""Toolchain for Component Interface Diagrams: model, DSL, checker, runtime and code generators."""

from __future__ import annotations

from cidkit.check import Diagnostic, Severity, check
from cidkit.formatter import format_model
from cidkit.model import CidModel, Component, InterfaceType
from cidkit.parser import ParseError, parse, parse_file

__all__ = [
    "CidModel",
    "Component",
    "Diagnostic",
    "InterfaceType",
    "ParseError",
    "Severity",
    "check",
    "format_model",
    "parse",
    "parse_file",
]
