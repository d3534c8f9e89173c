"""Command-line driver for the whole pipeline.

One executable, six subcommands:

* ``check``         parse, flatten, and type-check every module
* ``flatten``       print the flattened form of one module
* ``satisfaction``  check declared modeling relations
* ``test``          compile a satisfaction's axioms to oracles and run them
* ``build``         transpile a program to a host-language directory
* ``run``           build a program and execute one entry point on a fixture

Diagnostics go to standard error, data dumps to standard output, and all
output is deterministic given flags and inputs.  Exit codes: 0 success,
1 diagnostics or failed oracles, 2 usage errors, 3 host faults.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from .diagnostics import CompileError, Diagnostic, sort_key
from .modsys import ModuleEnv, check_satisfaction, dump_flat, flatten
from .parser import parse
from .semantics import check_module

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_HOST_FAULT = 3


class UsageError(Exception):
    """A bad invocation: unknown name, missing flag, ambiguous entry."""


class HostFault(Exception):
    """The host side failed while executing emitted code."""


# ---------------------------------------------------------------------------
# source loading


def _source_files(files: list[str], path_dirs: list[str]) -> list[Path]:
    found: list[Path] = []
    for name in files:
        p = Path(name)
        if not p.is_file():
            raise UsageError(f"no such file: {name}")
        found.append(p)
    for name in path_dirs:
        d = Path(name)
        if not d.is_dir():
            raise UsageError(f"--path {name}: not a directory")
        found.extend(sorted(d.glob("*.mg")))
    unique: list[Path] = []
    seen: set[Path] = set()
    for p in found:
        key = p.resolve()
        if key not in seen:
            seen.add(key)
            unique.append(p)
    if not unique:
        raise UsageError("no input files (pass .mg files and/or --path DIR)")
    return unique


def _load_env(args) -> tuple[ModuleEnv, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    units = []
    for path in _source_files(args.files, args.path or []):
        unit, ds = parse(path.read_text(), str(path))
        diags.extend(ds)
        units.append(unit)
    env, ds = ModuleEnv.from_units(units)
    diags.extend(ds)
    return env, diags


def _emit_diags(diags: list[Diagnostic], deny_warnings: bool = False) -> bool:
    """Print diagnostics to stderr; return True when they are fatal."""
    for d in sorted(diags, key=sort_key):
        print(d.render(), file=sys.stderr)
    fatal = any(d.severity == "error" for d in diags)
    if deny_warnings:
        fatal = fatal or bool(diags)
    return fatal


def _named_module(env: ModuleEnv, name: str, kinds: tuple[str, ...]):
    module = env.modules.get(name)
    if module is None:
        known = ", ".join(sorted(n for n, m in env.modules.items() if m.kind in kinds))
        raise UsageError(f"no module named {name!r} (known: {known})")
    if module.kind not in kinds:
        raise UsageError(f"{name!r} is a {module.kind}, expected {' or '.join(kinds)}")
    return module


# ---------------------------------------------------------------------------
# subcommands


def _cmd_check(args) -> int:
    env, diags = _load_env(args)
    for name in env.modules:
        if env.modules[name].kind == "satisfaction":
            continue
        try:
            flat = flatten(env, name)
        except CompileError as exc:
            diags.extend(exc.diagnostics)
            continue
        _, ds = check_module(flat)
        diags.extend(ds)
    if _emit_diags(diags, args.deny_warnings):
        return EXIT_DIAGNOSTICS
    checked = sum(1 for m in env.modules.values() if m.kind != "satisfaction")
    print(f"checked {checked} module(s): OK")
    return EXIT_OK


def _cmd_flatten(args) -> int:
    env, diags = _load_env(args)
    if _emit_diags(diags):
        return EXIT_DIAGNOSTICS
    _named_module(env, args.module, ("signature", "concept", "implementation", "program"))
    flat = flatten(env, args.module)
    print(dump_flat(flat), end="")
    return EXIT_OK


def _cmd_satisfaction(args) -> int:
    env, diags = _load_env(args)
    if _emit_diags(diags):
        return EXIT_DIAGNOSTICS
    if args.satisfaction is not None:
        sats = [_named_module(env, args.satisfaction, ("satisfaction",))]
    else:
        sats = sorted(env.satisfactions(), key=lambda m: m.name)
        if not sats:
            raise UsageError("no satisfaction declarations in the inputs")
    failures = 0
    for sat in sats:
        ds = check_satisfaction(sat, env)
        if any(d.severity == "error" for d in ds):
            failures += 1
            _emit_diags(ds)
            print(f"satisfaction {sat.name}: FAILED")
        else:
            _emit_diags(ds)
            print(f"satisfaction {sat.name}: OK")
    return EXIT_DIAGNOSTICS if failures else EXIT_OK


def _cmd_test(args) -> int:
    from .oraclegen import default_generators, generate_oracles, run_oracles

    env, diags = _load_env(args)
    if _emit_diags(diags):
        return EXIT_DIAGNOSTICS
    sat = _named_module(env, args.satisfaction, ("satisfaction",))
    oracles, checked, ds = generate_oracles(sat, env)
    if _emit_diags(ds):
        return EXIT_DIAGNOSTICS
    generators = default_generators(checked.flat)
    report = run_oracles(
        oracles, generators, budget=args.budget, seed=args.seed, checked=checked
    )
    print(report.render_text())
    if args.report is not None:
        Path(args.report).write_text(report.to_json())
    return EXIT_OK if report.ok else EXIT_DIAGNOSTICS


def _checked_program(env: ModuleEnv, name: str):
    _named_module(env, name, ("program",))
    flat = flatten(env, name)
    checked, ds = check_module(flat)
    return checked, ds


def _backend_spec(name: str):
    from .codegen import PYTHON_BACKEND, BackendSpec

    if name == PYTHON_BACKEND.name:
        return PYTHON_BACKEND
    return BackendSpec(name=name)


def _cmd_build(args) -> int:
    from .codegen import transpile

    env, diags = _load_env(args)
    if _emit_diags(diags):
        return EXIT_DIAGNOSTICS
    checked, ds = _checked_program(env, args.program)
    if _emit_diags(ds):
        return EXIT_DIAGNOSTICS
    emitted = transpile(
        checked, _backend_spec(args.backend), guard_checks=not args.no_guard_checks
    )
    if _emit_diags(emitted.diagnostics):
        return EXIT_DIAGNOSTICS
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(emitted.files):
        (out_dir / name).write_text(emitted.files[name])
        print(f"wrote {out_dir / name}")
    return EXIT_OK


# run: argument synthesis per parameter type ---------------------------------


def _entry_candidates(flat, entry_table: dict[str, str]) -> dict[str, object]:
    ops = {}
    for plain in entry_table:
        matching = flat.ops_named(plain)
        if len(matching) == 1:
            ops[plain] = matching[0]
    return ops


def _synthesize_args(op, args) -> list:
    import lib.graph_impl

    ints = list(args.arg or [])
    values = []
    for p in op.params:
        if p.mode == "out":
            continue
        if p.type_name == "Graph":
            if args.fixture is None:
                raise UsageError(
                    f"entry {op.name!r} takes a Graph; pass --fixture FILE"
                )
            fixture = Path(args.fixture)
            if not fixture.is_file():
                raise UsageError(f"no such fixture: {args.fixture}")
            values.append(lib.graph_impl.makeGraph(fixture.read_text()))
        elif p.type_name == "VertexDescriptor":
            values.append(args.start)
        elif p.type_name == "int":
            if not ints:
                raise UsageError(
                    f"entry {op.name!r} takes int parameter {p.name!r}; pass --arg N"
                )
            values.append(ints.pop(0))
        else:
            raise UsageError(
                f"cannot synthesize a {p.type_name} for parameter {p.name!r} "
                f"of entry {op.name!r}"
            )
    if ints:
        raise UsageError(f"{len(ints)} unused --arg value(s) for entry {op.name!r}")
    return values


def _pick_entry(candidates: dict, args) -> object:
    if args.entry is not None:
        op = candidates.get(args.entry)
        if op is None:
            raise UsageError(
                f"no unambiguous entry named {args.entry!r} "
                f"(available: {', '.join(sorted(candidates))})"
            )
        return op

    def runnable(op) -> bool:
        # Auto-pick only considers ops the program defines itself; external
        # bindings (zero(), vertices(), ...) are reachable via --entry.
        if op.binding is not None:
            return False
        synthesizable = {"Graph", "VertexDescriptor", "int"}
        needed = [p for p in op.params if p.mode != "out"]
        if any(p.type_name not in synthesizable for p in needed):
            return False
        if any(p.type_name == "Graph" for p in needed) and args.fixture is None:
            return False
        n_ints = sum(1 for p in needed if p.type_name == "int")
        return n_ints == len(args.arg or [])

    viable = sorted(name for name, op in candidates.items() if runnable(op))
    if len(viable) != 1:
        listing = ", ".join(viable) if viable else "none"
        raise UsageError(
            f"cannot pick an entry point (viable with these flags: {listing}); "
            f"use --entry NAME"
        )
    return candidates[viable[0]]


def _canon(value) -> str:
    from collections import deque

    if isinstance(value, dict):
        inner = ", ".join(
            f"{_canon(k)}: {_canon(v)}" for k, v in sorted(value.items(), key=repr)
        )
        return "{" + inner + "}"
    if isinstance(value, deque):
        return _canon(list(value))
    if isinstance(value, tuple):
        inner = ", ".join(_canon(v) for v in value)
        return "(" + inner + ")" if len(value) != 1 else "(" + inner + ",)"
    if isinstance(value, list):
        return "[" + ", ".join(_canon(v) for v in value) + "]"
    return repr(value)


def _cmd_run(args) -> int:
    from lib.runtime import GuardViolation

    from .codegen import load_emitted, transpile

    env, diags = _load_env(args)
    if _emit_diags(diags):
        return EXIT_DIAGNOSTICS
    checked, ds = _checked_program(env, args.program)
    if _emit_diags(ds):
        return EXIT_DIAGNOSTICS

    with tempfile.TemporaryDirectory(prefix="mglite-run-") as tmp:
        out_dir = Path(args.out) if args.out is not None else Path(tmp)
        out_dir.mkdir(parents=True, exist_ok=True)
        emitted = transpile(
            checked,
            _backend_spec(args.backend),
            out_dir,
            guard_checks=not args.no_guard_checks,
        )
        if _emit_diags(emitted.diagnostics):
            return EXIT_DIAGNOSTICS
        module = load_emitted(out_dir, checked.flat.name)
        candidates = _entry_candidates(checked.flat, emitted.entry_table)
        op = _pick_entry(candidates, args)
        values = _synthesize_args(op, args)
        fn = module.ENTRY_POINTS[op.name]
        try:
            result = fn(*values)
        except GuardViolation as exc:
            raise HostFault(f"guard violation in {exc.args[0]!r}") from exc
        except Exception as exc:  # anything the host raises is a host fault
            raise HostFault(f"{type(exc).__name__}: {exc}") from exc
    print(f"{op.name} = {_canon(result)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_source_flags(sub) -> None:
    sub.add_argument("files", nargs="*", help=".mg source files")
    sub.add_argument(
        "--path",
        action="append",
        metavar="DIR",
        help="directory to scan for .mg files (repeatable)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mglite", description="module-flattening compiler and test driver"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check", help="parse, flatten, and type-check all modules")
    _add_source_flags(p)
    p.add_argument("--deny-warnings", action="store_true", help="warnings are fatal")
    p.set_defaults(fn=_cmd_check)

    p = subs.add_parser("flatten", help="print one module's flattened form")
    _add_source_flags(p)
    p.add_argument("-m", "--module", required=True, help="module to flatten")
    p.set_defaults(fn=_cmd_flatten)

    p = subs.add_parser("satisfaction", help="check declared modeling relations")
    _add_source_flags(p)
    p.add_argument("-s", "--satisfaction", help="check one declaration (default all)")
    p.set_defaults(fn=_cmd_satisfaction)

    p = subs.add_parser("test", help="compile axioms to oracles and run them")
    _add_source_flags(p)
    p.add_argument("-s", "--satisfaction", required=True)
    p.add_argument("--budget", type=int, default=5000, help="inputs per oracle")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--report", metavar="FILE", help="also write a JSON report")
    p.set_defaults(fn=_cmd_test)

    p = subs.add_parser("build", help="transpile a program")
    _add_source_flags(p)
    p.add_argument("-p", "--program", required=True)
    p.add_argument("--backend", default="Python", help="host backend (default Python)")
    p.add_argument("--out", required=True, metavar="DIR", help="output directory")
    p.add_argument("--no-guard-checks", action="store_true", help="omit guard checks")
    p.set_defaults(fn=_cmd_build)

    p = subs.add_parser("run", help="build and execute one entry point")
    _add_source_flags(p)
    p.add_argument("-p", "--program", required=True)
    p.add_argument("--backend", default="Python", help="host backend (default Python)")
    p.add_argument("--out", metavar="DIR", help="keep the build here (default: temp)")
    p.add_argument("--no-guard-checks", action="store_true", help="omit guard checks")
    p.add_argument("--fixture", metavar="FILE", help="graph fixture for Graph params")
    p.add_argument("--start", type=int, default=0, help="VertexDescriptor argument")
    p.add_argument(
        "--arg",
        action="append",
        type=int,
        metavar="N",
        help="int argument, in parameter order (repeatable)",
    )
    p.add_argument("--entry", help="entry point when more than one is viable")
    p.set_defaults(fn=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"mglite: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CompileError as exc:
        _emit_diags(exc.diagnostics)
        return EXIT_DIAGNOSTICS
    except HostFault as exc:
        print(f"mglite: host fault: {exc}", file=sys.stderr)
        return EXIT_HOST_FAULT


if __name__ == "__main__":
    sys.exit(main())
