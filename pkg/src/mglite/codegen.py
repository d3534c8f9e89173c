"""Transpilation of complete programs to host-language source.

One host module is emitted per program, next to a shared runtime shim
and a manifest.  Every operation of the flattened program is emitted
exactly once under a mangled name:

* a function or predicate becomes a host function returning its value;
* a procedure becomes a host function taking obs and upd values in
  declaration order and returning the tuple of its upd and out finals,
  with call sites rebinding the caller's variables from that tuple;
* an externally bound operation becomes a direct reference to the host
  function (or a thin wrapper when it has a guard to check or callback
  requirements to pass);
* ``var x = y`` from a bare variable copies through the type's copy
  hook, as does an observed argument aliasing an updated one at a call;
* a guard compiles to a check that raises GuardViolation naming the
  operation; `guard_checks=False` drops the checks and turns every
  plain external back into a direct alias.

Output is deterministic: same input, same bytes.
"""

from __future__ import annotations

import keyword
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .ast_nodes import PREDICATE
from .diagnostics import CompileError, Diagnostic, error
from .modsys import FlatModule, OpInfo
from .semantics import (
    CheckedModule,
    LAnd,
    LAssert,
    LAssign,
    LCall,
    LCallStmt,
    LEq,
    LExpr,
    LIf,
    LNot,
    LStmt,
    LValue,
    LVar,
    LVarDecl,
    TypedBody,
)


@dataclass(frozen=True)
class BackendSpec:
    """Conventions of one host backend; the name must match the
    `external <Name> ...` tag for a binding to be honored."""

    name: str = "Python"
    file_suffix: str = ".py"
    shim_module: str = "_runtime"


PYTHON_BACKEND = BackendSpec()


@dataclass
class EmittedProgram:
    program: str
    files: dict[str, str]
    # mangled name -> (origin signature, "emitted" or backend:host.path)
    manifest: dict[str, tuple[str, str]]
    # plain op name -> mangled name, for unambiguous names only
    entry_table: dict[str, str]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    out_dir: Path | None = None


def mangle(name: str, param_types: tuple[str, ...], return_type: str | None) -> str:
    """Deterministic host identifier for one concrete signature."""
    return f"{name}__{'_'.join(param_types)}__{return_type or PREDICATE}"


def build_mangle_table(flat: FlatModule) -> dict[tuple, str]:
    """Assign every op a unique emitted name.  The scheme is injective
    unless type names themselves embed the separator; the rare clash
    gets a deterministic numeric suffix."""
    table: dict[tuple, str] = {}
    taken: set[str] = set()
    for key in sorted(flat.ops, key=repr):
        base = mangle(*key)
        candidate = base
        n = 2
        while candidate in taken:
            candidate = f"{base}_{n}"
            n += 1
        table[key] = candidate
        taken.add(candidate)
    return table


_RESERVED = {"lib", "GuardViolation", "ENTRY_POINTS"}


def _safe(name: str) -> str:
    if keyword.iskeyword(name) or name in _RESERVED:
        return name + "_v"
    return name


class _Emitter:
    def __init__(self, checked, spec, guard_checks, binding_overrides):
        self.checked = checked
        self.flat: FlatModule = checked.flat
        self.spec = spec
        self.guard_checks = guard_checks
        self.overrides = dict(binding_overrides or {})
        unmatched = sorted(set(self.overrides) - self.flat.host_bindings())
        if unmatched:
            raise CompileError(
                "UnknownOverride: "
                + ", ".join(f"'{p}.{n}'" for p, n in unmatched)
                + f" redirects no external binding of '{self.flat.name}'"
            )
        self.mangled = build_mangle_table(self.flat)
        self.imports: set[str] = set()
        self.hooks: dict[str, str] = {}  # alias -> host reference text
        self.diags: list[Diagnostic] = []

    # ── references ──────────────────────────────────────────────────

    def ref(self, op: OpInfo) -> str:
        return self.mangled[op.sig_key]

    def host_ref(self, binding) -> str:
        path, name = self.overrides.get(
            (binding.host_path, binding.host_name),
            (binding.host_path, binding.host_name),
        )
        self.imports.add(path)
        return f"{path}.{name}"

    def hook_ref(self, prefix: str, type_name: str) -> str:
        alias = f"_{prefix}_{type_name}"
        if alias not in self.hooks:
            info = self.flat.types.get(type_name)
            if info is None or info.binding is None:
                self.diags.append(
                    error(
                        "MissingHook",
                        f"type '{type_name}' needs a {prefix} hook but has no "
                        f"{self.spec.name} binding",
                    )
                )
                self.hooks[alias] = "None"
            else:
                b = info.binding
                self.imports.add(b.host_path)
                self.hooks[alias] = f"{b.host_path}.{prefix}_{b.host_name}"
        return alias

    # ── expressions ─────────────────────────────────────────────────

    def expr(self, e: LExpr, names: dict[str, str]) -> str:
        if isinstance(e, LVar):
            return names[e.name]
        if isinstance(e, LCall):
            args = ", ".join(self.expr(a, names) for a in e.args)
            return f"{self.ref(e.op)}({args})"
        if isinstance(e, LEq):
            lhs, rhs = self.expr(e.lhs, names), self.expr(e.rhs, names)
            if e.operand_type == PREDICATE:
                return f"(bool({lhs}) == bool({rhs}))"
            return f"{self.hook_ref('eq', e.operand_type)}({lhs}, {rhs})"
        if isinstance(e, LNot):
            return f"(not {self.expr(e.operand, names)})"
        if isinstance(e, LAnd):
            return f"({self.expr(e.lhs, names)} and {self.expr(e.rhs, names)})"
        raise CompileError(f"cannot emit expression {type(e).__name__}")

    # ── statements ──────────────────────────────────────────────────

    def stmts(self, block: list[LStmt], names: dict[str, str], out: list[str], depth: int) -> None:
        pad = "    " * depth
        if not block:
            out.append(pad + "pass")
            return
        for s in block:
            self.stmt(s, names, out, depth)

    def stmt(self, s: LStmt, names: dict[str, str], out: list[str], depth: int) -> None:
        pad = "    " * depth
        if isinstance(s, LVarDecl):
            names[s.name] = _safe(s.name)
            if s.init is not None:
                rhs = self.expr(s.init, names)
                if isinstance(s.init, LVar):
                    rhs = f"{self.hook_ref('copy', s.type)}({rhs})"
                out.append(f"{pad}{names[s.name]} = {rhs}")
        elif isinstance(s, LAssign):
            rhs = self.expr(s.expr, names)
            if isinstance(s.expr, LVar):
                rhs = f"{self.hook_ref('copy', s.expr.type)}({rhs})"
            out.append(f"{pad}{names[s.name]} = {rhs}")
        elif isinstance(s, LCallStmt):
            self.call_stmt(s, names, out, depth)
        elif isinstance(s, LIf):
            out.append(f"{pad}if {self.expr(s.cond, names)}:")
            self.stmts(s.then_block, names, out, depth + 1)
            if s.else_block:
                out.append(f"{pad}else:")
                self.stmts(s.else_block, names, out, depth + 1)
        elif isinstance(s, LAssert):
            out.append(f"{pad}if not {self.expr(s.expr, names)}:")
            out.append(f"{pad}    raise AssertionError('assertion failed')")
        elif isinstance(s, LValue):
            out.append(f"{pad}return {self.expr(s.expr, names)}")
        else:  # pragma: no cover
            raise CompileError(f"cannot emit statement {type(s).__name__}")

    def call_stmt(self, s: LCallStmt, names: dict[str, str], out: list[str], depth: int) -> None:
        pad = "    " * depth
        op = s.op
        mutated = {
            arg.name
            for p, arg in zip(op.params, s.args)
            if p.mode in ("upd", "out") and isinstance(arg, LVar)
        }
        values = []
        seen_mutable: set[str] = set()
        for p, arg in zip(op.params, s.args):
            if p.mode == "out":
                continue
            txt = self.expr(arg, names)
            if isinstance(arg, LVar):
                if p.mode == "obs" and arg.name in mutated:
                    txt = f"{self.hook_ref('copy', p.type_name)}({txt})"
                elif p.mode == "upd":
                    if arg.name in seen_mutable:
                        txt = f"{self.hook_ref('copy', p.type_name)}({txt})"
                    seen_mutable.add(arg.name)
            values.append(txt)
        call = f"{self.ref(op)}({', '.join(values)})"
        if op.kind != "procedure":
            out.append(pad + call)
            return
        targets = [
            names.setdefault(arg.name, _safe(arg.name))
            for p, arg in zip(op.params, s.args)
            if p.mode in ("upd", "out")
        ]
        if targets:
            out.append(f"{pad}({', '.join(targets)},) = {call}")
        else:
            out.append(pad + call)

    # ── operations ──────────────────────────────────────────────────

    def guard_lines(self, op: OpInfo, names: dict[str, str], out: list[str]) -> None:
        if not self.guard_checks or op.guard is None:
            return
        guard = self.checked.guards.get(op.sig_key)
        if guard is None:
            return
        out.append(f"    if not {self.expr(guard, names)}:")
        out.append(f"        raise GuardViolation({op.name!r})")

    def emit_op(self, op: OpInfo, out: list[str]) -> None:
        name = self.ref(op)
        in_params = [p for p in op.params if p.mode != "out"]
        names = {p.name: _safe(p.name) for p in op.params}
        sig = ", ".join(names[p.name] for p in in_params)
        if op.binding is not None:
            self.emit_external(op, name, sig, names, out)
            return
        body = self.checked.bodies.get(op.sig_key)
        if body is None:
            out.append(f"def {name}({sig}):")
            out.append(
                f"    raise RuntimeError('operation {op.name!r} has no body or binding')"
            )
            self.diags.append(
                error("MissingBody", f"operation '{op.name}' has neither body nor binding")
            )
            return
        out.append(f"def {name}({sig}):")
        self.guard_lines(op, names, out)
        lines: list[str] = []
        self.stmts(body.stmts, names, lines, 1)
        out.extend(lines)
        if op.kind == "procedure":
            finals = [names[p.name] for p in op.params if p.mode in ("upd", "out")]
            out.append(f"    return ({', '.join(finals)},)" if finals else "    return ()")

    def emit_external(self, op: OpInfo, name: str, sig: str, names, out: list[str]) -> None:
        b = op.binding
        if b.backend != self.spec.name:
            self.diags.append(
                error(
                    "BackendMismatch",
                    f"operation '{op.name}' is bound for backend '{b.backend}', "
                    f"not '{self.spec.name}'; binding skipped",
                )
            )
            out.append(f"def {name}({sig}):")
            out.append(
                f"    raise RuntimeError('operation {op.name!r} has no {self.spec.name} binding')"
            )
            return
        callback_refs = []
        for ref in b.callbacks:
            cb = self.flat.ops.get((ref.name, ref.param_types, ref.return_type))
            if cb is None:
                self.diags.append(
                    error(
                        "CallbackMissing",
                        f"callback '{ref.name}' required by '{op.name}' is not in scope",
                    )
                )
                continue
            callback_refs.append(self.ref(cb))
        host = self.host_ref(b)
        guarded = self.guard_checks and op.guard is not None
        if not callback_refs and not guarded:
            out.append(f"{name} = {host}")
            return
        out.append(f"def {name}({sig}):")
        self.guard_lines(op, names, out)
        in_names = [names[p.name] for p in op.params if p.mode != "out"]
        args = ", ".join(callback_refs + in_names)
        out.append(f"    return {host}({args})")

    # ── whole module ────────────────────────────────────────────────

    def emit_module(self) -> str:
        defs: list[str] = []
        ordered = sorted(self.flat.ops.values(), key=lambda op: self.mangled[op.sig_key])
        for op in ordered:
            self.emit_op(op, defs)
            defs.append("")
        entry = self.entry_table()
        head = [
            f'"""Code generated from program {self.flat.name}.',
            "",
            "Deterministic output; regenerate rather than edit.",
            '"""',
            "",
        ]
        for path in sorted(self.imports):
            head.append(f"import {path}")
        if self.imports:
            head.append("")
        head.append(f"from {self.spec.shim_module} import GuardViolation")
        head.append("")
        head.append("")
        for alias in sorted(self.hooks):
            head.append(f"{alias} = {self.hooks[alias]}")
        if self.hooks:
            head.append("")
        tail = ["ENTRY_POINTS = {"]
        for plain in sorted(entry):
            tail.append(f"    {plain!r}: {entry[plain]},")
        tail.append("}")
        tail.append("")
        return "\n".join(head + [""] + defs + tail)

    def entry_table(self) -> dict[str, str]:
        table = {}
        by_name: dict[str, list[OpInfo]] = {}
        for op in self.flat.ops.values():
            by_name.setdefault(op.name, []).append(op)
        for plain, ops in sorted(by_name.items()):
            if len(ops) == 1:
                table[plain] = self.ref(ops[0])
        return table

    def manifest(self) -> dict[str, tuple[str, str]]:
        entries = {}
        for op in self.flat.ops.values():
            if op.binding is not None and op.binding.backend == self.spec.name:
                path, name = self.overrides.get(
                    (op.binding.host_path, op.binding.host_name),
                    (op.binding.host_path, op.binding.host_name),
                )
                bound = f"{self.spec.name}:{path}.{name}"
            else:
                bound = "emitted"
            entries[self.ref(op)] = (op.signature_text(), bound)
        return dict(sorted(entries.items()))


SHIM_TEXT = '''"""Shared runtime for generated modules: guard errors and the
oracle report protocol, re-exported from the host base library."""

from lib.runtime import GuardViolation, drive_oracle, record
'''


def _manifest_text(manifest: dict[str, tuple[str, str]]) -> str:
    lines = [f"{name}\t{origin}\t{bound}" for name, (origin, bound) in sorted(manifest.items())]
    return "\n".join(lines) + "\n"


def _write_files(files: dict[str, str], out_dir) -> None:
    try:
        root = Path(out_dir)
        root.mkdir(parents=True, exist_ok=True)
        for rel, text in files.items():
            (root / rel).write_text(text)
    except OSError as exc:
        raise CompileError(f"EmitIOFailure: cannot write to '{out_dir}': {exc}") from exc


def transpile(
    checked: CheckedModule,
    spec: BackendSpec = PYTHON_BACKEND,
    out_dir=None,
    *,
    guard_checks: bool = True,
    binding_overrides: dict[tuple[str, str], tuple[str, str]] | None = None,
) -> EmittedProgram:
    """Emit one host module (plus shim and manifest) for a checked program."""
    if spec.name != "Python":
        raise CompileError(f"UnsupportedBackend: no '{spec.name}' backend is available")
    flat = checked.flat
    if flat.kind != "program":
        raise CompileError(f"'{flat.name}' is a {flat.kind}; only programs are emitted")
    emitter = _Emitter(checked, spec, guard_checks, binding_overrides)
    module_text = emitter.emit_module()
    manifest = emitter.manifest()
    files = {
        f"{flat.name}{spec.file_suffix}": module_text,
        f"{spec.shim_module}{spec.file_suffix}": SHIM_TEXT,
        "manifest.txt": _manifest_text(manifest),
    }
    emitted = EmittedProgram(
        program=flat.name,
        files=files,
        manifest=manifest,
        entry_table=emitter.entry_table(),
        diagnostics=emitter.diags,
        out_dir=Path(out_dir) if out_dir is not None else None,
    )
    if out_dir is not None:
        _write_files(files, out_dir)
    return emitted


def emit_oracle_harness(
    oracles,
    checked: CheckedModule,
    spec: BackendSpec = PYTHON_BACKEND,
    out_dir=None,
    *,
    guard_checks: bool = True,
    binding_overrides: dict[tuple[str, str], tuple[str, str]] | None = None,
) -> EmittedProgram:
    """Emit a runnable oracle module next to an already-emitted program.

    Each oracle (name, params, typed body) becomes one law function that
    raises AssertionError on violation, registered in ORACLES together
    with its per-parameter generator hooks; the shim's `drive_oracle`
    does the running and reporting.  Raises on a parameter type that has
    neither an enumerate nor a sample hook.
    """
    if spec.name != "Python":
        raise CompileError(f"UnsupportedBackend: no '{spec.name}' backend is available")
    flat = checked.flat
    emitter = _Emitter(checked, spec, guard_checks, binding_overrides)
    defs: list[str] = []
    table: list[str] = []
    needed: set[str] = set()
    gen_aliases: dict[str, str] = {}

    def gen_pair(type_name: str, oracle_name: str) -> str:
        pair = []
        info = flat.types.get(type_name)
        if info is None or info.binding is None:
            raise CompileError(
                f"MissingGenerator: type '{type_name}' used by oracle "
                f"'{oracle_name}' has no {spec.name} binding"
            )
        b = info.binding
        import importlib

        mod = importlib.import_module(b.host_path)
        for prefix in ("enumerate", "sample"):
            attr = f"{prefix}_{b.host_name}"
            if hasattr(mod, attr):
                alias = f"_{prefix}_{type_name}"
                if alias not in gen_aliases:
                    emitter.imports.add(b.host_path)
                    gen_aliases[alias] = f"{b.host_path}.{attr}"
                pair.append(alias)
            else:
                pair.append("None")
        if pair == ["None", "None"]:
            raise CompileError(
                f"MissingGenerator: type '{type_name}' used by oracle "
                f"'{oracle_name}' has neither an enumerate nor a sample hook"
            )
        return f"({pair[0]}, {pair[1]})"

    for oracle in oracles:
        names = {p.name: _safe(p.name) for p in oracle.params}
        sig = ", ".join(names[p.name] for p in oracle.params)
        fn = f"_law_{oracle.name}"
        defs.append(f"def {fn}({sig}):")
        lines: list[str] = []
        emitter.stmts(oracle.body.stmts, names, lines, 1)
        defs.extend(lines or ["    pass"])
        defs.append("")
        pairs = ", ".join(gen_pair(p.type_name, oracle.name) for p in oracle.params)
        trailing = "," if len(oracle.params) == 1 else ""
        table.append(f"    ({oracle.name!r}, {fn}, ({pairs}{trailing})),")

        for key in _collect_called(oracle.body.stmts):
            needed.add(emitter.mangled[key])

    head = [
        f'"""Oracle harness for program {flat.name}.',
        "",
        "Deterministic output; regenerate rather than edit.",
        '"""',
        "",
    ]
    for path in sorted(emitter.imports):
        head.append(f"import {path}")
    if emitter.imports:
        head.append("")
    head.append(f"from {spec.shim_module} import GuardViolation, drive_oracle, record")
    if needed:
        names_list = ", ".join(sorted(needed))
        head.append(f"from {flat.name} import {names_list}")
    head.append("")
    head.append("")
    for alias in sorted(emitter.hooks):
        head.append(f"{alias} = {emitter.hooks[alias]}")
    for alias in sorted(gen_aliases):
        head.append(f"{alias} = {gen_aliases[alias]}")
    if emitter.hooks or gen_aliases:
        head.append("")
    tail = [
        "ORACLES = [",
        *table,
        "]",
        "",
        "",
        "def run_all(budget=5000, seed=0, timeout=5.0):",
        "    return [",
        "        drive_oracle(name, law, gens, budget=budget, seed=seed, timeout=timeout)",
        "        for name, law, gens in ORACLES",
        "    ]",
        "",
    ]
    module_name = f"{flat.name}_oracles"
    files = {f"{module_name}{spec.file_suffix}": "\n".join(head + [""] + defs + tail)}
    emitted = EmittedProgram(
        program=module_name,
        files=files,
        manifest={},
        entry_table={},
        diagnostics=emitter.diags,
        out_dir=Path(out_dir) if out_dir is not None else None,
    )
    if out_dir is not None:
        _write_files(files, out_dir)
    return emitted


def _collect_called(stmts: list[LStmt]) -> set[tuple]:
    """Signature keys of every op a statement block calls."""
    keys: set[tuple] = set()

    def walk_expr(e: LExpr) -> None:
        if isinstance(e, LCall):
            keys.add(e.op.sig_key)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, LEq):
            walk_expr(e.lhs)
            walk_expr(e.rhs)
        elif isinstance(e, LNot):
            walk_expr(e.operand)
        elif isinstance(e, LAnd):
            walk_expr(e.lhs)
            walk_expr(e.rhs)

    def walk(block: list[LStmt]) -> None:
        for s in block:
            if isinstance(s, LVarDecl) and s.init is not None:
                walk_expr(s.init)
            elif isinstance(s, LAssign):
                walk_expr(s.expr)
            elif isinstance(s, LCallStmt):
                keys.add(s.op.sig_key)
                for a in s.args:
                    walk_expr(a)
            elif isinstance(s, LIf):
                walk_expr(s.cond)
                walk(s.then_block)
                walk(s.else_block)
            elif isinstance(s, (LAssert, LValue)):
                walk_expr(s.expr)

    walk(stmts)
    return keys


def load_emitted(out_dir, module_name: str):
    """Import one generated module from a build directory."""
    import importlib.util

    out_dir = Path(out_dir)
    path = out_dir / f"{module_name}.py"
    if not path.exists():
        raise CompileError(f"no generated module at {path}")
    key = f"_mglite_gen_{abs(hash(str(path.resolve())))}_{module_name}"
    spec_ = importlib.util.spec_from_file_location(key, path)
    module = importlib.util.module_from_spec(spec_)
    inserted = str(out_dir) not in sys.path
    if inserted:
        sys.path.insert(0, str(out_dir))
    try:
        sys.modules[key] = module
        spec_.loader.exec_module(module)
    finally:
        if inserted:
            sys.path.remove(str(out_dir))
    return module
