"""Compilation of concept axioms into runnable test oracles.

A satisfaction `P models C[renaming]` turns every axiom of the flattened,
renamed concept C into an oracle: the axiom body, re-checked and lowered
against P's own flattened scope, so oracle calls behave exactly like
ordinary program calls.  The runner feeds each oracle generated inputs
and reports per-oracle accounting:

* an assert that evaluates false is a fail, recording the input vector;
* a violated callee guard discards the input (guarded algebras make
  such inputs meaningless), and heavy discarding turns the verdict
  inconclusive instead of silently green;
* runs are deterministic in (generators, seed, budget) and capped by a
  per-oracle wall-clock timeout.

Input generation uses the per-type host hooks: `enumerate_<T>(limit)`
for exhaustive small domains (preferred whenever the full product fits
the budget) or `sample_<T>(seed, i)` for seeded streams.
"""

from __future__ import annotations

import importlib
import json
from dataclasses import dataclass, field

from .ast_nodes import Module, Param, PREDICATE
from .diagnostics import CompileError, Diagnostic, error
from .interp import Interpreter
from .modsys import (
    FlatModule,
    ModuleEnv,
    apply_renaming,
    check_program_complete,
    check_satisfaction,
    flatten,
    renaming_from_expr,
)
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
    check_body,
    check_modes,
    check_module,
)

# per concrete type: (enumerate_fn or None, sample_fn or None)
GeneratorBinding = dict[str, tuple]


@dataclass
class Oracle:
    """One runnable law: an axiom lowered against a program's scope."""

    name: str
    params: tuple[Param, ...]
    body: TypedBody
    source_satisfaction: str
    concept: str

    @property
    def param_types(self) -> tuple[str, ...]:
        return tuple(p.type_name for p in self.params)


@dataclass
class OracleReport:
    """Outcome of one runner invocation, one record per oracle."""

    program: str
    budget: int
    seed: int
    records: list[dict] = field(default_factory=list)

    def _total(self, key: str) -> int:
        return sum(r[key] for r in self.records)

    @property
    def ok(self) -> bool:
        return all(r["status"] == "pass" for r in self.records)

    def render_text(self) -> str:
        lines = []
        for r in self.records:
            lines.append(
                f"oracle {r['name']}: {r['status'].upper()} "
                f"(passed {r['passed']}, failed {r['failed']}, "
                f"discarded {r['discarded']} of {r['attempted']} attempted)"
            )
            if r["witness"] is not None:
                lines.append(f"  witness: {r['witness']!r}")
            if r["error"] is not None:
                lines.append(f"  error: {r['error']}")
        lines.append(
            f"{self.program}: {len(self.records)} oracle(s), "
            f"{self._total('passed')} passed, {self._total('failed')} failed, "
            f"{self._total('discarded')} discarded "
            f"(budget {self.budget}, seed {self.seed}): "
            + ("OK" if self.ok else "PROBLEMS")
        )
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = {
            "program": self.program,
            "budget": self.budget,
            "seed": self.seed,
            "ok": self.ok,
            "oracles": [
                {**r, "witness": None if r["witness"] is None else repr(r["witness"])}
                for r in self.records
            ],
        }
        return json.dumps(payload, indent=2)


def list_axioms(concept_name: str, env: ModuleEnv) -> list[tuple[str, tuple[str, ...]]]:
    """Axiom names and parameter types of a flattened module, in flatten
    order.  Signatures and implementations simply list no axioms."""
    flat = flatten(env, concept_name)
    return [(ax.name, tuple(p.type_name for p in ax.params)) for ax in flat.axioms]


def _copy_eq_types(body: TypedBody) -> tuple[set[str], set[str]]:
    """Types an oracle compares with == and types it copies at bare-var
    initialization; both need host hooks before the oracle can run."""
    eq_types: set[str] = set()
    copy_types: set[str] = set()

    def walk_expr(e: LExpr) -> None:
        if isinstance(e, LCall):
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, LEq):
            if e.operand_type != PREDICATE:
                eq_types.add(e.operand_type)
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
                if isinstance(s.init, LVar):
                    copy_types.add(s.type)
                walk_expr(s.init)
            elif isinstance(s, LAssign):
                if isinstance(s.expr, LVar):
                    copy_types.add(s.expr.type)
                walk_expr(s.expr)
            elif isinstance(s, LCallStmt):
                for a in s.args:
                    walk_expr(a)
            elif isinstance(s, LIf):
                walk_expr(s.cond)
                walk(s.then_block)
                walk(s.else_block)
            elif isinstance(s, (LAssert, LValue)):
                walk_expr(s.expr)

    walk(body.stmts)
    return eq_types, copy_types


def _flag_missing_hooks(
    flat: FlatModule, body: TypedBody, oracle_name: str, diags: list[Diagnostic]
) -> None:
    eq_types, copy_types = _copy_eq_types(body)
    for prefix, names in (("eq", eq_types), ("copy", copy_types)):
        for tname in sorted(names):
            info = flat.types.get(tname)
            if info is None or info.binding is None:
                diags.append(
                    error(
                        "MissingHook",
                        f"oracle '{oracle_name}' needs an {prefix} hook for type "
                        f"'{tname}', which has no host binding",
                    )
                )
                continue
            b = info.binding
            try:
                mod = importlib.import_module(b.host_path)
            except ImportError as exc:
                diags.append(
                    error("MissingHook", f"cannot import host module '{b.host_path}': {exc}")
                )
                continue
            if not hasattr(mod, f"{prefix}_{b.host_name}"):
                diags.append(
                    error(
                        "MissingHook",
                        f"oracle '{oracle_name}' needs '{prefix}_{b.host_name}' in "
                        f"'{b.host_path}' for type '{tname}'",
                    )
                )


def generate_oracles(
    sat: Module, env: ModuleEnv
) -> tuple[list[Oracle], CheckedModule | None, list[Diagnostic]]:
    """Oracles for one satisfaction, with the checked left-hand program.

    The left side must flatten to a complete program (TargetNotExecutable
    otherwise); the right-side concept's axioms are renamed by the
    satisfaction's bracket and lowered against the program's scope.
    Missing equality/copy hooks are flagged here, not at run time.
    """
    diags = check_satisfaction(sat, env)
    if any(d.severity == "error" for d in diags):
        return [], None, diags
    lhs = flatten(env, sat.sat_lhs.name)
    if lhs.kind != "program":
        diags.append(
            error(
                "TargetNotExecutable",
                f"'{sat.name}' holds, but its left side '{lhs.name}' is a "
                f"{lhs.kind}, not a runnable program",
            )
        )
        return [], None, diags
    completeness = check_program_complete(lhs)
    if any(d.severity == "error" for d in completeness):
        diags.extend(completeness)
        diags.append(
            error(
                "TargetNotExecutable",
                f"left side '{lhs.name}' of '{sat.name}' is not a complete program",
            )
        )
        return [], None, diags
    checked, sem_diags = check_module(lhs)
    diags.extend(d for d in sem_diags if d.severity == "error")
    rhs = flatten(env, sat.sat_rhs.name)
    renaming = renaming_from_expr(sat.sat_rhs, diags)
    if renaming.pairs:
        rhs = apply_renaming(rhs, renaming, sat.sat_rhs.loc)
    oracles: list[Oracle] = []
    for ax in rhs.axioms:
        body = check_body("axiom", ax.params, None, ax.body, lhs, diags, sat.loc)
        if body is None:
            continue
        check_modes(ax.params, body, diags)
        _flag_missing_hooks(lhs, body, ax.name, diags)
        oracles.append(
            Oracle(
                name=ax.name,
                params=ax.params,
                body=body,
                source_satisfaction=sat.name,
                concept=sat.sat_rhs.name,
            )
        )
    if any(d.severity == "error" for d in diags):
        return [], checked, diags
    return oracles, checked, diags


def default_generators(flat: FlatModule) -> GeneratorBinding:
    """Generator hooks for every host-bound type of a flattened scope."""
    gens: GeneratorBinding = {}
    for tname in sorted(flat.types):
        info = flat.types[tname]
        if info.binding is None:
            continue
        try:
            mod = importlib.import_module(info.binding.host_path)
        except ImportError:
            continue
        enum = getattr(mod, f"enumerate_{info.binding.host_name}", None)
        sample = getattr(mod, f"sample_{info.binding.host_name}", None)
        if enum is not None or sample is not None:
            gens[tname] = (enum, sample)
    return gens


def run_oracles(
    oracles: list[Oracle],
    generators: GeneratorBinding,
    budget: int = 5000,
    seed: int = 0,
    *,
    checked: CheckedModule,
    guard_checks: bool = True,
    binding_overrides: dict[tuple[str, str], tuple[str, str]] | None = None,
    timeout: float = 5.0,
) -> OracleReport:
    """Run oracles over generated inputs through the reference evaluator.

    Deterministic in (generators, seed, budget).  Raises on a parameter
    type without a generator; everything else lands in the report."""
    from lib.runtime import drive_oracle

    interp = Interpreter(
        checked, guard_checks=guard_checks, binding_overrides=binding_overrides
    )
    report = OracleReport(program=checked.flat.name, budget=budget, seed=seed)
    for oracle in oracles:
        gens = []
        for p in oracle.params:
            pair = generators.get(p.type_name)
            if pair is None or pair == (None, None):
                raise CompileError(
                    f"MissingGenerator: no generator for type '{p.type_name}' "
                    f"(oracle '{oracle.name}')"
                )
            gens.append(pair)

        def law(*args, _body=oracle.body):
            interp.run_typed_body(_body, list(args))

        try:
            rec = drive_oracle(
                oracle.name, law, gens, budget=budget, seed=seed, timeout=timeout
            )
        except ValueError as exc:
            raise CompileError(str(exc)) from exc
        report.records.append(rec)
    return report
