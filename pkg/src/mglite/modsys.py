"""Module system: renaming, scope merging, flattening, satisfaction.

A flattened module is a closed scope of types, operations and axioms.
Renaming is simultaneous substitution over type and operation names (swaps
are legal); merging is commutative, associative and idempotent up to element
order.  FlatModule values are treated as immutable once built: every
transformation returns a fresh value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import pretty
from .ast_nodes import (
    AndExpr,
    AnnotExpr,
    AssertStmt,
    AssignStmt,
    AxiomDecl,
    CallExpr,
    CallStmt,
    EqExpr,
    Expr,
    IfStmt,
    Module,
    ModuleExpr,
    NotExpr,
    OpDecl,
    Param,
    SourceUnit,
    Stmt,
    TypeDecl,
    UseDecl,
    ValueStmt,
    VarDeclStmt,
    VarRef,
    PREDICATE,
)
from .diagnostics import CompileError, Diagnostic, Span, error

# Provenance chains record how an element reached a scope: a tuple of
# `use <module-expr>` step strings, outermost use first.
Chain = tuple[str, ...]


@dataclass(frozen=True)
class OpRef:
    """Reference to an operation by signature; names rename along with content."""

    name: str
    param_types: tuple[str, ...]
    return_type: str | None

    def renamed(self, mapping: dict[str, str]) -> "OpRef":
        return OpRef(
            mapping.get(self.name, self.name),
            tuple(mapping.get(t, t) for t in self.param_types),
            mapping.get(self.return_type, self.return_type) if self.return_type else self.return_type,
        )


@dataclass(frozen=True)
class ExternalBinding:
    """Host binding fixed at the external block; later renamings do not move it.

    `callbacks` lists the operations that remained required inside the external
    block: the backend passes them to the host function as leading arguments.
    """

    backend: str
    host_path: str
    host_name: str
    callbacks: tuple[OpRef, ...] = ()


@dataclass
class TypeInfo:
    name: str
    status: str  # "declared" | "required" | "external"
    binding: ExternalBinding | None = None
    provenance: tuple[Chain, ...] = ((),)


@dataclass
class OpInfo:
    kind: str  # "function" | "procedure" | "predicate"
    name: str
    params: tuple[Param, ...]
    return_type: str | None
    guard: Expr | None
    body: list[Stmt] | None
    required_flag: bool  # written with `require`; survives external binding
    binding: ExternalBinding | None = None
    # Bodiless member of a concept or signature: a requirement by nature,
    # but one an enclosing external block is allowed to bind.
    abstract_flag: bool = False
    provenance: tuple[Chain, ...] = ((),)

    @property
    def param_types(self) -> tuple[str, ...]:
        return tuple(p.type_name for p in self.params)

    @property
    def sig_key(self) -> tuple[str, tuple[str, ...], str | None]:
        return (self.name, self.param_types, self.return_type)

    @property
    def is_declared(self) -> bool:
        return self.body is not None or self.binding is not None

    @property
    def status(self) -> str:
        return "declared" if self.is_declared else "required"

    def signature_text(self) -> str:
        return pretty.op_signature_text(self.kind, self.name, list(self.params), self.return_type)


@dataclass
class AxiomInfo:
    name: str
    params: tuple[Param, ...]
    body: list[Stmt]
    provenance: tuple[Chain, ...] = ((),)


@dataclass
class FlatModule:
    """A flattened scope.  Do not mutate after construction."""

    kind: str
    name: str
    types: dict[str, TypeInfo] = field(default_factory=dict)
    ops: dict[tuple, OpInfo] = field(default_factory=dict)  # sig_key -> OpInfo
    axioms: list[AxiomInfo] = field(default_factory=list)

    def op_names(self) -> set[str]:
        return {op.name for op in self.ops.values()}

    def all_names(self) -> set[str]:
        return set(self.types) | self.op_names()

    def ops_named(self, name: str) -> list[OpInfo]:
        return [op for op in self.ops.values() if op.name == name]

    def host_bindings(self) -> set[tuple[str, str]]:
        """(host_path, host_name) pairs of every externally bound operation."""
        return {
            (op.binding.host_path, op.binding.host_name)
            for op in self.ops.values()
            if op.binding is not None
        }

    def structural_key(self):
        """Provenance-insensitive shape, used by the algebraic-law tests."""
        types = tuple(sorted(((t.name, t.status, t.binding) for t in self.types.values()), key=repr))
        ops = tuple(
            sorted(
                (
                    (
                        op.kind,
                        op.name,
                        tuple((p.mode, p.name, p.type_name) for p in op.params),
                        op.return_type,
                        pretty.expr_text(op.guard) if op.guard is not None else None,
                        _body_text(op.body),
                        op.binding,
                        op.required_flag,
                        op.abstract_flag,
                    )
                    for op in self.ops.values()
                ),
                key=repr,
            )
        )
        axioms = tuple(
            (ax.name, tuple((p.name, p.type_name) for p in ax.params), _body_text(ax.body))
            for ax in self.axioms
        )
        return (self.kind, types, ops, axioms)


@dataclass(frozen=True)
class Renaming:
    """Simultaneous name substitution.  Pair order is display-only."""

    pairs: tuple[tuple[str, str], ...]

    @property
    def mapping(self) -> dict[str, str]:
        return dict(self.pairs)

    def text(self) -> str:
        return ", ".join(f"{a} => {b}" for a, b in self.pairs)

    @staticmethod
    def compose(first: "Renaming", second: "Renaming", names: set[str]) -> "Renaming":
        """The renaming equivalent to applying `first` then `second` over `names`."""
        m1, m2 = first.mapping, second.mapping
        pairs = []
        for n in sorted(names):
            out = m2.get(m1.get(n, n), m1.get(n, n))
            if out != n:
                pairs.append((n, out))
        return Renaming(tuple(pairs))


IDENTITY_RENAMING = Renaming(())


# ── expression / statement rewriting ─────────────────────────────────────────


def rename_expr(e: Expr, names: dict[str, str], variables: dict[str, str] | None = None) -> Expr:
    """Rebuild `e` with op/type names substituted; `variables` optionally
    substitutes variable references (used for alpha-normalization only)."""
    v = variables or {}
    if isinstance(e, VarRef):
        return VarRef(v.get(e.name, e.name), e.loc)
    if isinstance(e, CallExpr):
        return CallExpr(
            names.get(e.name, e.name),
            [rename_expr(a, names, v) for a in e.args],
            names.get(e.annotation, e.annotation) if e.annotation else None,
            e.loc,
        )
    if isinstance(e, AnnotExpr):
        return AnnotExpr(rename_expr(e.operand, names, v), names.get(e.type_name, e.type_name), e.loc)
    if isinstance(e, NotExpr):
        return NotExpr(rename_expr(e.operand, names, v), e.loc)
    if isinstance(e, EqExpr):
        return EqExpr(rename_expr(e.lhs, names, v), rename_expr(e.rhs, names, v), e.loc)
    if isinstance(e, AndExpr):
        return AndExpr(rename_expr(e.lhs, names, v), rename_expr(e.rhs, names, v), e.loc)
    raise TypeError(f"not an expression: {e!r}")


def rename_stmt(s: Stmt, names: dict[str, str], variables: dict[str, str] | None = None) -> Stmt:
    v = variables or {}
    if isinstance(s, VarDeclStmt):
        ty = names.get(s.type_name, s.type_name) if s.type_name else None
        init = rename_expr(s.init, names, v) if s.init is not None else None
        return VarDeclStmt(v.get(s.name, s.name), ty, init, s.loc)
    if isinstance(s, AssignStmt):
        return AssignStmt(v.get(s.name, s.name), rename_expr(s.expr, names, v), s.loc)
    if isinstance(s, CallStmt):
        return CallStmt(names.get(s.name, s.name), [rename_expr(a, names, v) for a in s.args], s.loc)
    if isinstance(s, IfStmt):
        return IfStmt(
            rename_expr(s.cond, names, v),
            [rename_stmt(x, names, v) for x in s.then_block],
            [rename_stmt(x, names, v) for x in s.else_block] if s.else_block is not None else None,
            s.loc,
        )
    if isinstance(s, AssertStmt):
        return AssertStmt(rename_expr(s.expr, names, v), s.loc)
    if isinstance(s, ValueStmt):
        return ValueStmt(rename_expr(s.expr, names, v), s.loc)
    raise TypeError(f"not a statement: {s!r}")


def rename_body(body: list[Stmt] | None, names: dict[str, str]) -> list[Stmt] | None:
    if body is None:
        return None
    return [rename_stmt(s, names) for s in body]


def _body_text(body: list[Stmt] | None) -> str | None:
    if body is None:
        return None
    lines: list[str] = []
    for s in body:
        lines.extend(pretty._stmt_lines(s, 0))
    return "\n".join(lines)


def _alpha_variables(params: tuple[Param, ...]) -> dict[str, str]:
    return {p.name: f"_param{i}" for i, p in enumerate(params)}


def guard_alpha_text(params: tuple[Param, ...], guard: Expr | None) -> str | None:
    """Guard rendering with parameters alpha-normalized positionally."""
    if guard is None:
        return None
    return pretty.expr_text(rename_expr(guard, {}, _alpha_variables(params)))


def body_alpha_text(params: tuple[Param, ...], body: list[Stmt] | None) -> str | None:
    if body is None:
        return None
    v = _alpha_variables(params)
    return _body_text([rename_stmt(s, {}, v) for s in body])


def _op_canonical_text(op: OpInfo) -> str:
    parts = [op.kind, op.signature_text()]
    if op.guard is not None:
        parts.append(f"guard {pretty.expr_text(op.guard)}")
    bt = _body_text(op.body)
    if bt is not None:
        parts.append(bt)
    return "\n".join(parts)


# ── merging ──────────────────────────────────────────────────────────────────

_TYPE_STATUS_RANK = {"required": 0, "declared": 1, "external": 2}


def _merge_provenance(a: tuple[Chain, ...], b: tuple[Chain, ...]) -> tuple[Chain, ...]:
    return tuple(sorted(set(a) | set(b)))


def _merge_types(a: TypeInfo, b: TypeInfo, diags: list[Diagnostic]) -> TypeInfo:
    if a.binding is not None and b.binding is not None and a.binding != b.binding:
        diags.append(
            error(
                "ConflictingDefinition",
                f"type {a.name!r} is externally bound twice with different bindings "
                f"({a.binding.host_path} vs {b.binding.host_path})",
            )
        )
    status = a.status if _TYPE_STATUS_RANK[a.status] >= _TYPE_STATUS_RANK[b.status] else b.status
    return TypeInfo(a.name, status, a.binding or b.binding, _merge_provenance(a.provenance, b.provenance))


def _mergeable_ops(a: OpInfo, b: OpInfo) -> str | None:
    """None when the two ops (same sig_key) can merge; else a conflict reason."""
    if a.kind != b.kind:
        return f"operation {a.name!r} is declared both as a {a.kind} and a {b.kind}"
    if tuple(p.mode for p in a.params) != tuple(p.mode for p in b.params):
        return f"operation {a.name!r} is declared with differing parameter modes"
    if guard_alpha_text(a.params, a.guard) != guard_alpha_text(b.params, b.guard):
        return f"operation {a.name!r} is declared with differing guards"
    ta, tb = body_alpha_text(a.params, a.body), body_alpha_text(b.params, b.body)
    if ta is not None and tb is not None and ta != tb:
        return f"operation {a.name!r} has two differing bodies"
    if a.binding is not None and b.binding is not None and a.binding != b.binding:
        return f"operation {a.name!r} is externally bound twice with different bindings"
    if (a.body is not None and b.binding is not None) or (b.body is not None and a.binding is not None):
        return f"operation {a.name!r} has both a body and an external binding"
    return None


def _merge_ops(a: OpInfo, b: OpInfo, diags: list[Diagnostic], code: str) -> OpInfo:
    reason = _mergeable_ops(a, b)
    if reason is not None:
        diags.append(error(code, reason))
        return a
    # Canonical representative: the body owner wins (its body references its
    # own parameter names); between equals, the lexicographically smallest
    # rendering, so the result is independent of merge order.
    if (a.body is not None) != (b.body is not None):
        keep = a if a.body is not None else b
    else:
        keep = a if _op_canonical_text(a) <= _op_canonical_text(b) else b
    other = b if keep is a else a
    guard = keep.guard
    if guard is None and other.guard is not None:
        # Guards reference parameters only, so a positional remap is safe.
        remap = {po.name: pk.name for po, pk in zip(other.params, keep.params)}
        guard = rename_expr(other.guard, {}, remap)
    return OpInfo(
        keep.kind,
        keep.name,
        keep.params,
        keep.return_type,
        guard,
        keep.body,
        keep.required_flag or other.required_flag,
        keep.binding or other.binding,
        keep.abstract_flag or other.abstract_flag,
        _merge_provenance(a.provenance, b.provenance),
    )


def _axiom_key(ax: AxiomInfo):
    return (ax.name, tuple(p.type_name for p in ax.params), body_alpha_text(ax.params, ax.body))


def _check_namespaces(flat: FlatModule, diags: list[Diagnostic], code: str) -> None:
    clash = set(flat.types) & flat.op_names()
    for name in sorted(clash):
        diags.append(error(code, f"{name!r} names both a type and an operation"))


def merge_scopes(a: FlatModule, b: FlatModule, diags: list[Diagnostic], code: str = "ConflictingDefinition") -> FlatModule:
    """Merge two flat scopes.  Conflicts are reported into `diags`."""
    out = FlatModule(a.kind, a.name)
    out.types = dict(a.types)
    for name, info in b.types.items():
        out.types[name] = _merge_types(out.types[name], info, diags) if name in out.types else info
    out.ops = dict(a.ops)
    for key, op in b.ops.items():
        out.ops[key] = _merge_ops(out.ops[key], op, diags, code) if key in out.ops else op
    seen = {_axiom_key(ax): ax for ax in a.axioms}
    out.axioms = list(a.axioms)
    for ax in b.axioms:
        k = _axiom_key(ax)
        if k in seen:
            merged = replace(seen[k], provenance=_merge_provenance(seen[k].provenance, ax.provenance))
            out.axioms[out.axioms.index(seen[k])] = merged
            seen[k] = merged
        else:
            out.axioms.append(ax)
            seen[k] = ax
    _check_namespaces(out, diags, code)
    return out


# ── renaming application ─────────────────────────────────────────────────────


def apply_renaming(flat: FlatModule, renaming: Renaming, span: Span | None = None) -> FlatModule:
    """Apply a simultaneous renaming; raises CompileError on bad renamings."""
    diags: list[Diagnostic] = []
    mapping = renaming.mapping
    known = flat.all_names()
    for src, _tgt in renaming.pairs:
        if src not in known:
            diags.append(
                error("UnknownRenameSource", f"{src!r} does not name a type or operation of {flat.name!r}", span)
            )
    if diags:
        raise CompileError(diags)
    if not mapping:
        return flat

    out = FlatModule(flat.kind, flat.name)
    for info in flat.types.values():
        new_name = mapping.get(info.name, info.name)
        renamed = TypeInfo(new_name, info.status, info.binding, info.provenance)
        if new_name in out.types:
            out.types[new_name] = _merge_types(out.types[new_name], renamed, diags)
        else:
            out.types[new_name] = renamed
    for op in flat.ops.values():
        new_op = OpInfo(
            op.kind,
            mapping.get(op.name, op.name),
            tuple(Param(p.name, p.mode, mapping.get(p.type_name, p.type_name), p.loc) for p in op.params),
            mapping.get(op.return_type, op.return_type) if op.return_type else op.return_type,
            rename_expr(op.guard, mapping) if op.guard is not None else None,
            rename_body(op.body, mapping),
            op.required_flag,
            replace(op.binding, callbacks=tuple(cb.renamed(mapping) for cb in op.binding.callbacks))
            if op.binding is not None
            else None,
            op.abstract_flag,
            op.provenance,
        )
        key = new_op.sig_key
        if key in out.ops:
            out.ops[key] = _merge_ops(out.ops[key], new_op, diags, "RenameCollision")
        else:
            out.ops[key] = new_op
    for ax in flat.axioms:
        out.axioms.append(
            AxiomInfo(
                ax.name,
                tuple(Param(p.name, p.mode, mapping.get(p.type_name, p.type_name), p.loc) for p in ax.params),
                [rename_stmt(s, mapping) for s in ax.body],
                ax.provenance,
            )
        )
    deduped: list[AxiomInfo] = []
    seen: dict = {}
    for ax in out.axioms:
        k = _axiom_key(ax)
        if k in seen:
            idx = deduped.index(seen[k])
            deduped[idx] = replace(seen[k], provenance=_merge_provenance(seen[k].provenance, ax.provenance))
            seen[k] = deduped[idx]
        else:
            deduped.append(ax)
            seen[k] = ax
    out.axioms = deduped
    _check_namespaces(out, diags, "KindMismatch")
    if diags:
        raise CompileError([replace(d, span=d.span or span) for d in diags])
    return out


# ── module environment and flattening ────────────────────────────────────────


class ModuleEnv:
    """Name -> AST module map with a flatten cache."""

    def __init__(self):
        self.modules: dict[str, Module] = {}
        self._flat_cache: dict[str, FlatModule] = {}

    @staticmethod
    def from_units(units: list[SourceUnit]) -> tuple["ModuleEnv", list[Diagnostic]]:
        env = ModuleEnv()
        diags: list[Diagnostic] = []
        for unit in units:
            for m in unit.modules:
                if m.name in env.modules:
                    diags.append(error("DuplicateModule", f"module {m.name!r} is defined twice", m.loc))
                else:
                    env.modules[m.name] = m
        return env, diags

    def add(self, module: Module) -> None:
        self.modules[module.name] = module
        self._flat_cache.clear()

    def satisfactions(self) -> list[Module]:
        return [m for m in self.modules.values() if m.kind == "satisfaction"]


def _prefix_provenance(flat: FlatModule, step: str) -> FlatModule:
    def bump(ch: tuple[Chain, ...]) -> tuple[Chain, ...]:
        return tuple((step,) + c for c in ch)

    out = FlatModule(flat.kind, flat.name)
    out.types = {n: replace(t, provenance=bump(t.provenance)) for n, t in flat.types.items()}
    out.ops = {k: replace(o, provenance=bump(o.provenance)) for k, o in flat.ops.items()}
    out.axioms = [replace(a, provenance=bump(a.provenance)) for a in flat.axioms]
    return out


def renaming_from_expr(target: ModuleExpr, diags: list[Diagnostic]) -> Renaming:
    seen: set[str] = set()
    for src, _ in target.renaming:
        if src in seen:
            diags.append(error("DuplicateRenameSource", f"{src!r} is renamed twice in one bracket", target.loc))
        seen.add(src)
    return Renaming(tuple(target.renaming))


def flatten(env: ModuleEnv, name: str, _stack: tuple[str, ...] = ()) -> FlatModule:
    """Flatten module `name`: resolve uses recursively, merge, add own decls.

    Raises CompileError on unknown modules, cycles, rename or merge conflicts.
    """
    if name in env._flat_cache:
        return env._flat_cache[name]
    if name in _stack:
        chain = " -> ".join(_stack + (name,))
        raise CompileError([error("CyclicUse", f"module use cycle: {chain}")])
    module = env.modules.get(name)
    if module is None:
        raise CompileError([error("UnknownModule", f"no module named {name!r}")])
    if module.kind == "satisfaction":
        raise CompileError([error("NotFlattenable", f"{name!r} is a satisfaction, not a flattenable module", module.loc)])

    diags: list[Diagnostic] = []
    acc = FlatModule(module.kind, module.name)
    own = FlatModule(module.kind, module.name)
    for decl in module.decls:
        if isinstance(decl, UseDecl):
            sub = flatten(env, decl.target.name, _stack + (name,))
            renaming = renaming_from_expr(decl.target, diags)
            renamed = apply_renaming(sub, renaming, decl.target.loc) if renaming.pairs else sub
            step = f"use {pretty.module_expr_text(decl.target)}"
            acc = merge_scopes(acc, _prefix_provenance(renamed, step), diags)
        elif isinstance(decl, TypeDecl):
            info = TypeInfo(decl.name, "required" if decl.required else "declared")
            own.types[decl.name] = _merge_types(own.types[decl.name], info, diags) if decl.name in own.types else info
        elif isinstance(decl, OpDecl):
            op = OpInfo(
                decl.kind,
                decl.name,
                tuple(decl.params),
                decl.return_type,
                decl.guard,
                decl.body,
                decl.required,
                abstract_flag=(
                    module.kind in ("concept", "signature") and decl.body is None and not decl.required
                ),
            )
            if op.sig_key in own.ops:
                own.ops[op.sig_key] = _merge_ops(own.ops[op.sig_key], op, diags, "ConflictingDefinition")
            else:
                own.ops[op.sig_key] = op
        elif isinstance(decl, AxiomDecl):
            own.axioms.append(AxiomInfo(decl.name, tuple(decl.params), decl.body))

    acc = merge_scopes(acc, own, diags)
    if module.kind == "signature":
        acc.axioms = []

    if module.external is not None:
        backend, host_path = module.external
        callbacks = tuple(
            OpRef(op.name, op.param_types, op.return_type)
            for op in acc.ops.values()
            if op.required_flag and op.body is None and op.binding is None
        )
        new_types = {}
        for tname, tinfo in acc.types.items():
            if tinfo.status == "declared":
                new_types[tname] = replace(
                    tinfo, status="external", binding=ExternalBinding(backend, host_path, tname)
                )
            else:
                new_types[tname] = tinfo
        acc.types = new_types
        new_ops = {}
        for key, op in acc.ops.items():
            if not op.required_flag and op.body is None and op.binding is None:
                new_ops[key] = replace(
                    op, binding=ExternalBinding(backend, host_path, op.name, callbacks)
                )
            else:
                new_ops[key] = op
        acc.ops = new_ops

    _check_namespaces(acc, diags, "KindMismatch")
    if diags:
        raise CompileError([replace(d, span=d.span or module.loc) for d in diags])
    env._flat_cache[name] = acc
    return acc


# ── references collected from a scope (used by completeness) ─────────────────


def _expr_refs(e: Expr, calls: set[str], types: set[str]) -> None:
    if isinstance(e, CallExpr):
        calls.add(e.name)
        if e.annotation:
            types.add(e.annotation)
        for a in e.args:
            _expr_refs(a, calls, types)
    elif isinstance(e, AnnotExpr):
        types.add(e.type_name)
        _expr_refs(e.operand, calls, types)
    elif isinstance(e, NotExpr):
        _expr_refs(e.operand, calls, types)
    elif isinstance(e, (EqExpr, AndExpr)):
        _expr_refs(e.lhs, calls, types)
        _expr_refs(e.rhs, calls, types)


def _stmt_refs(s: Stmt, calls: set[str], types: set[str]) -> None:
    if isinstance(s, VarDeclStmt):
        if s.type_name:
            types.add(s.type_name)
        if s.init is not None:
            _expr_refs(s.init, calls, types)
    elif isinstance(s, (AssignStmt, AssertStmt, ValueStmt)):
        _expr_refs(s.expr, calls, types)
    elif isinstance(s, CallStmt):
        calls.add(s.name)
        for a in s.args:
            _expr_refs(a, calls, types)
    elif isinstance(s, IfStmt):
        _expr_refs(s.cond, calls, types)
        for x in s.then_block:
            _stmt_refs(x, calls, types)
        for x in s.else_block or []:
            _stmt_refs(x, calls, types)


def scope_references(flat: FlatModule) -> tuple[set[str], set[str]]:
    """All call names and type names referenced anywhere in the scope."""
    calls: set[str] = set()
    types: set[str] = set()
    for op in flat.ops.values():
        for p in op.params:
            types.add(p.type_name)
        if op.return_type and op.return_type != PREDICATE:
            types.add(op.return_type)
        if op.guard is not None:
            _expr_refs(op.guard, calls, types)
        for s in op.body or []:
            _stmt_refs(s, calls, types)
    for ax in flat.axioms:
        for p in ax.params:
            types.add(p.type_name)
        for s in ax.body:
            _stmt_refs(s, calls, types)
    types.discard(PREDICATE)
    return calls, types


# ── program completeness ─────────────────────────────────────────────────────


def check_program_complete(flat: FlatModule) -> list[Diagnostic]:
    """A program is complete when nothing remains required and every name resolves."""
    diags: list[Diagnostic] = []
    if flat.kind != "program":
        diags.append(error("NotAProgram", f"{flat.name!r} is a {flat.kind}, not a program"))
    for tinfo in sorted(flat.types.values(), key=lambda t: t.name):
        if tinfo.status == "required":
            diags.append(error("UnfulfilledRequirement", f"type {tinfo.name!r} is required but never provided"))
    for op in sorted(flat.ops.values(), key=lambda o: (o.name, o.signature_text())):
        if op.is_declared:
            continue
        if op.required_flag or op.abstract_flag:
            diags.append(
                error("UnfulfilledRequirement", f"operation {op.signature_text()} is required but never provided")
            )
        else:
            diags.append(error("MissingBody", f"operation {op.signature_text()} has no body or external binding"))
    calls, types = scope_references(flat)
    op_names = flat.op_names()
    for n in sorted(calls - op_names):
        diags.append(error("UnfulfilledRequirement", f"operation {n!r} is referenced but not present (body references it)"))
    for n in sorted(types - set(flat.types)):
        diags.append(error("UnfulfilledRequirement", f"type {n!r} is referenced but not present"))
    return diags


# ── satisfaction ─────────────────────────────────────────────────────────────

_LHS_KINDS = {"implementation", "program", "concept"}


def check_satisfaction(sat: Module, env: ModuleEnv) -> list[Diagnostic]:
    """`lhs models rhs[renaming]`: every rhs type and op must exist identically in lhs."""
    diags: list[Diagnostic] = []
    assert sat.kind == "satisfaction" and sat.sat_lhs is not None and sat.sat_rhs is not None
    try:
        lhs = flatten(env, sat.sat_lhs.name)
        rhs_base = flatten(env, sat.sat_rhs.name)
    except CompileError as exc:
        return exc.diagnostics
    if lhs.kind not in _LHS_KINDS:
        diags.append(
            error("InvalidSatisfactionLhs", f"left side must be an implementation, program or concept, got {lhs.kind}", sat.loc)
        )
    if rhs_base.kind != "concept":
        diags.append(error("RhsNotConcept", f"right side of 'models' must be a concept, got {rhs_base.kind}", sat.loc))
        return diags
    renaming = renaming_from_expr(sat.sat_rhs, diags)
    try:
        rhs = apply_renaming(rhs_base, renaming, sat.sat_rhs.loc) if renaming.pairs else rhs_base
    except CompileError as exc:
        return diags + exc.diagnostics

    for tname in sorted(rhs.types):
        if tname not in lhs.types:
            diags.append(error("MissingType", f"{lhs.name!r} provides no type named {tname!r}", sat.loc))
    for op in sorted(rhs.ops.values(), key=lambda o: o.signature_text()):
        candidates = lhs.ops_named(op.name)
        if not candidates:
            diags.append(error("MissingOperation", f"{lhs.name!r} provides no operation named {op.name!r}", sat.loc))
            continue
        match = None
        for cand in candidates:
            if (
                cand.kind == op.kind
                and cand.param_types == op.param_types
                and tuple(p.mode for p in cand.params) == tuple(p.mode for p in op.params)
                and cand.return_type == op.return_type
            ):
                match = cand
                break
        if match is None:
            diags.append(
                error(
                    "SignatureMismatch",
                    f"{lhs.name!r} has no operation matching {op.signature_text()}",
                    sat.loc,
                )
            )
            continue
        if op.guard is not None:
            if guard_alpha_text(op.params, op.guard) != guard_alpha_text(match.params, match.guard):
                diags.append(
                    error(
                        "GuardMismatch",
                        f"guard of {op.signature_text()} is not matched syntactically by {lhs.name!r}",
                        sat.loc,
                    )
                )
    return diags


# ── dump ─────────────────────────────────────────────────────────────────────


def _chain_lines(provenance: tuple[Chain, ...]) -> list[str]:
    lines: list[str] = []
    for chain in sorted(provenance):
        for depth, step in enumerate(chain):
            lines.append("  " * (depth + 1) + f"via {step}")
    return lines


def dump_flat(flat: FlatModule) -> str:
    """Byte-stable rendering of a flattened scope."""
    lines = [f"flat {flat.kind} {flat.name}"]
    for tinfo in sorted(flat.types.values(), key=lambda t: t.name):
        suffix = ""
        if tinfo.status == "required":
            suffix = " required"
        elif tinfo.status == "external":
            b = tinfo.binding
            suffix = f" external({b.backend} {b.host_path})" if b else " external"
        lines.append(f"type {tinfo.name}{suffix}")
        lines.extend(_chain_lines(tinfo.provenance))
    for op in sorted(flat.ops.values(), key=lambda o: (o.name, o.signature_text())):
        text = f"op {op.kind} {op.signature_text()}"
        if op.guard is not None:
            text += f" guard {pretty.expr_text(op.guard)}"
        if op.binding is not None:
            b = op.binding
            text += f" external({b.backend} {b.host_path}.{b.host_name})"
        elif op.body is None:
            text += " required"
        lines.append(text)
        lines.extend(_chain_lines(op.provenance))
    for ax in sorted(flat.axioms, key=lambda a: (a.name, _body_text(a.body) or "")):
        params = ", ".join(pretty.param_text(p) for p in ax.params)
        lines.append(f"axiom {ax.name}({params})")
        lines.extend(_chain_lines(ax.provenance))
    return "\n".join(lines) + "\n"
