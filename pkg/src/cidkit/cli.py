"""``cid`` command-line tool.

Exit codes: 0 success, 1 parse failure or malformed trace/script, 2 checker
errors, generation errors or a conformance violation, 64 usage error, 66
missing input file. Payloads go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO

from cidkit.check import Severity, check, errors
from cidkit.codegen import CodegenError, GenProfile, emit_dot, emit_idl, write_outputs
from cidkit.formatter import format_model
from cidkit.model import CidModel, UnknownComponent
from cidkit.parser import ParseError, parse
from cidkit.runtime.monitor import check_trace
from cidkit.runtime.trace import MalformedEvent, dump_trace, parse_trace
from cidkit.script import ScriptError, run_script

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FINDINGS = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66


@dataclass
class CliConfig:
    command: str
    input_path: str
    component: Optional[str] = None
    out_dir: Optional[str] = None
    profile: Optional[GenProfile] = None
    flatten: bool = False
    script_path: Optional[str] = None
    trace_path: Optional[str] = None


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cid", description="Component Interface Diagram toolchain")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, help_text: str, component: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="model file (.cid)")
        if component:
            p.add_argument("--component", help="restrict to one component")
        return p

    command("check", "report well-formedness diagnostics")
    command("fmt", "print the canonical form of a model", component=False)
    command("dot", "render a model as a Graphviz digraph")
    gen = command("gen", "generate interface definitions")
    gen.add_argument("--profile", required=True, choices=[p.value for p in GenProfile])
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--flatten", action="store_true",
                     help="ActiveX: copy inherited methods instead of rejecting subtyping")
    sim = command("simulate", "run a simulation script and print its trace")
    sim.add_argument("--script", required=True)
    mon = command("monitor", "judge a recorded trace", component=False)
    mon.add_argument("--trace", required=True)
    return parser


def parse_args(argv: Sequence[str]) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(
        command=ns.command,
        input_path=ns.input,
        component=getattr(ns, "component", None),
        out_dir=getattr(ns, "out", None),
        profile=GenProfile(ns.profile) if getattr(ns, "profile", None) else None,
        flatten=getattr(ns, "flatten", False),
        script_path=getattr(ns, "script", None),
        trace_path=getattr(ns, "trace", None),
    )


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def run(config: CliConfig, stdout: TextIO, stderr: TextIO) -> int:
    for path in (config.input_path, config.script_path, config.trace_path):
        if path is not None and not Path(path).is_file():
            print(f"cid: {path}: no such file", file=stderr)
            return EXIT_NOINPUT
    try:
        model = parse(_read(config.input_path), config.input_path)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(d, file=stderr)
        return EXIT_INPUT

    if config.component is not None:
        try:
            model = CidModel((model.component(config.component),))
        except UnknownComponent:
            print(f"cid: no component named {config.component}", file=stderr)
            return EXIT_USAGE

    if config.command == "fmt":
        stdout.write(format_model(model))
        return EXIT_OK
    if config.command == "dot":
        stdout.write(emit_dot(model, config.component))
        return EXIT_OK

    diags = check(model)
    if config.command == "check":
        for d in diags:
            print(d, file=stderr)
        return EXIT_FINDINGS if errors(diags) else EXIT_OK
    if errors(diags):
        for d in diags:
            if d.severity is Severity.ERROR:
                print(d, file=stderr)
        return EXIT_FINDINGS

    if config.command == "gen":
        return _gen(model, config, stdout, stderr)
    if config.command == "simulate":
        return _simulate(model, config, stdout, stderr)
    if config.command == "monitor":
        return _monitor(model, config, stdout, stderr)
    raise AssertionError(config.command)


def _gen(model: CidModel, config: CliConfig, stdout: TextIO, stderr: TextIO) -> int:
    outputs = []
    failed = []
    for comp in model.components:
        try:
            files = emit_idl(model, comp.name, config.profile, config.flatten)
        except CodegenError as exc:
            failed += exc.diagnostics
            continue
        outputs.append((comp.name, files))
    if failed:
        for d in failed:
            print(d, file=stderr)
        return EXIT_FINDINGS
    for name, files in outputs:
        for path in write_outputs(files, config.out_dir, name, config.profile):
            print(path, file=stdout)
    return EXIT_OK


def _simulate(model: CidModel, config: CliConfig, stdout: TextIO, stderr: TextIO) -> int:
    component = config.component or model.components[0].name
    try:
        result = run_script(model, component, _read(config.script_path))
    except ScriptError as exc:
        print(f"cid: {config.script_path}: {exc}", file=stderr)
        return EXIT_INPUT
    stdout.write(dump_trace(result.sim.events))
    if result.violation is not None:
        v = result.violation
        print(f"VIOLATION {v.rule} at event {len(result.sim.events) - 1}: {v.message}", file=stderr)
        return EXIT_FINDINGS
    return EXIT_OK


def _monitor(model: CidModel, config: CliConfig, stdout: TextIO, stderr: TextIO) -> int:
    with open(config.trace_path, encoding="utf-8") as fh:
        try:
            verdict = check_trace(model, parse_trace(fh))
        except MalformedEvent as exc:
            print(f"cid: {config.trace_path}: {exc}", file=stderr)
            return EXIT_INPUT
    print(verdict, file=stdout)
    return EXIT_OK if verdict.ok else EXIT_FINDINGS


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config = parse_args(list(sys.argv[1:] if argv is None else argv))
    except _UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    return run(config, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
