"""Reference evaluator for checked modules.

Runs typed bodies directly, resolving external operations to host
functions by their recorded binding.  The code generator follows the
same conventions, so this evaluator is the executable definition the
emitted code is tested against:

* callees receive obs and upd argument values in declaration order (out
  parameters are outputs only) and a procedure returns the tuple of its
  upd and out finals, in declaration order;
* external operations receive their callback requirements as leading
  callables, in the order the requirements were declared;
* ``var x = y`` and ``x = y`` with a bare variable on the right copy the
  value through the type's copy hook, and at a call site an observed
  argument that aliases an updated one is copied first, so distinct
  bindings never share mutable state;
* a guard that evaluates false raises GuardViolation before the body or
  host function runs.

Host types plug in per-type hooks, looked up in the module that binds
the type: ``eq_<host name>``, ``copy_<host name>``, and for test-input
generation ``enumerate_<host name>`` / ``sample_<host name>``.
"""

from __future__ import annotations

import importlib
from typing import Any, Callable

from .ast_nodes import PREDICATE
from .modsys import ExternalBinding, OpInfo
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


class InterpError(Exception):
    """The module cannot be executed as configured (missing hook, body
    or host function); distinct from a failing computation."""


class AssertionFailure(AssertionError):
    """An assert statement evaluated to false."""


class _Return(Exception):
    def __init__(self, value):
        self.value = value


_UNSET = object()


def _guard_violation(op_name: str) -> Exception:
    from lib.runtime import GuardViolation

    return GuardViolation(op_name)


class Interpreter:
    """Evaluator over one checked module.

    `binding_overrides` redirects individual host operations, keyed by
    ``(host_path, host_name)`` to a replacement ``(path, name)``; the
    mutation tests use it to wire in deliberately wrong hosts.  Guard
    checking can be disabled to mirror the emitter's unguarded builds.
    """

    def __init__(
        self,
        checked: CheckedModule,
        guard_checks: bool = True,
        binding_overrides: dict[tuple[str, str], tuple[str, str]] | None = None,
    ):
        self.checked = checked
        self.flat = checked.flat
        self.guard_checks = guard_checks
        self.overrides = dict(binding_overrides or {})
        unmatched = sorted(set(self.overrides) - self.flat.host_bindings())
        if unmatched:
            raise InterpError(
                "override "
                + ", ".join(f"'{p}.{n}'" for p, n in unmatched)
                + f" redirects no external binding of '{self.flat.name}'"
            )
        self._host_cache: dict[tuple[str, str], Callable] = {}
        self._hook_cache: dict[tuple[str, str], Callable] = {}

    # ── host resolution ─────────────────────────────────────────────

    def _host_fn(self, binding: ExternalBinding) -> Callable:
        key = (binding.host_path, binding.host_name)
        target = self.overrides.get(key, key)
        if target not in self._host_cache:
            path, name = target
            try:
                mod = importlib.import_module(path)
            except ImportError as exc:
                raise InterpError(f"cannot import host module '{path}': {exc}") from exc
            fn = getattr(mod, name, None)
            if fn is None:
                raise InterpError(f"host module '{path}' has no attribute '{name}'")
            self._host_cache[target] = fn
        return self._host_cache[target]

    def hook(self, prefix: str, type_name: str) -> Callable:
        """Per-type value service: prefix is eq, copy, enumerate or sample."""
        key = (prefix, type_name)
        if key not in self._hook_cache:
            info = self.flat.types.get(type_name)
            if info is None or info.binding is None:
                raise InterpError(f"type '{type_name}' has no host binding")
            b = info.binding
            mod = importlib.import_module(b.host_path)
            fn = getattr(mod, f"{prefix}_{b.host_name}", None)
            if fn is None:
                raise InterpError(
                    f"host module '{b.host_path}' provides no hook "
                    f"'{prefix}_{b.host_name}' for type '{type_name}'"
                )
            self._hook_cache[key] = fn
        return self._hook_cache[key]

    def copy_value(self, type_name: str, value):
        if type_name == PREDICATE:
            return value
        return self.hook("copy", type_name)(value)

    def values_equal(self, type_name: str, a, b) -> bool:
        if type_name == PREDICATE:
            return bool(a) == bool(b)
        return bool(self.hook("eq", type_name)(a, b))

    # ── operation calls ─────────────────────────────────────────────

    def call_named(self, name: str, args: list) -> Any:
        ops = self.flat.ops_named(name)
        if not ops:
            raise InterpError(f"no operation named '{name}'")
        if len(ops) > 1:
            raise InterpError(f"operation name '{name}' is overloaded")
        return self.call_op(ops[0], args)

    def call_op(self, op: OpInfo, args: list) -> Any:
        """Invoke one operation with obs/upd argument values in
        declaration order; returns per the shared convention."""
        in_params = [p for p in op.params if p.mode != "out"]
        if len(args) != len(in_params):
            raise InterpError(
                f"'{op.name}' expects {len(in_params)} input values, got {len(args)}"
            )
        if self.guard_checks and op.guard is not None:
            env = {p.name: _UNSET for p in op.params}
            env.update({p.name: v for p, v in zip(in_params, args)})
            if not self._eval(self.checked.guards[op.sig_key], env):
                raise _guard_violation(op.name)
        if op.binding is not None:
            return self._call_host(op, args)
        body = self.checked.bodies.get(op.sig_key)
        if body is None:
            raise InterpError(f"operation '{op.name}' has neither body nor binding")
        return self._exec_op_body(op, body, args)

    def _call_host(self, op: OpInfo, args: list) -> Any:
        fn = self._host_fn(op.binding)
        callbacks = []
        for ref in op.binding.callbacks:
            cb_op = self.flat.ops.get((ref.name, ref.param_types, ref.return_type))
            if cb_op is None:
                raise InterpError(
                    f"callback '{ref.name}' required by '{op.name}' is missing"
                )
            callbacks.append(lambda *cb_args, _op=cb_op: self.call_op(_op, list(cb_args)))
        return fn(*callbacks, *args)

    def _exec_op_body(self, op: OpInfo, body: TypedBody, args: list) -> Any:
        env: dict[str, Any] = {p.name: _UNSET for p in op.params}
        env.update({p.name: v for p, v in zip([p for p in op.params if p.mode != "out"], args)})
        ret = self._run_stmts(body, env)
        if op.kind == "procedure":
            return tuple(env[p.name] for p in op.params if p.mode in ("upd", "out"))
        return ret

    def run_typed_body(self, body: TypedBody, args: list) -> Any:
        """Run a free-standing lowered body (an oracle) with `args` bound
        to its parameters in order."""
        env = {p.name: v for p, v in zip(body.params, args)}
        return self._run_stmts(body, env)

    def run_axiom(self, name: str, args: list) -> None:
        """Run one axiom body; raises AssertionFailure on a failed law,
        GuardViolation when an argument violates a precondition."""
        for info, body in self.checked.axioms:
            if info.name == name:
                env = {p.name: v for p, v in zip(info.params, args)}
                self._run_stmts(body, env)
                return
        raise InterpError(f"no axiom named '{name}'")

    # ── statement execution ─────────────────────────────────────────

    def _run_stmts(self, body: TypedBody, env: dict[str, Any]) -> Any:
        try:
            self._exec_block(body.stmts, env)
        except _Return as r:
            return r.value
        return None

    def _exec_block(self, stmts: list[LStmt], env: dict[str, Any]) -> None:
        for s in stmts:
            self._exec_stmt(s, env)

    def _exec_stmt(self, s: LStmt, env: dict[str, Any]) -> None:
        if isinstance(s, LVarDecl):
            if s.init is None:
                env[s.name] = _UNSET
            else:
                v = self._eval(s.init, env)
                env[s.name] = self.copy_value(s.type, v) if isinstance(s.init, LVar) else v
        elif isinstance(s, LAssign):
            v = self._eval(s.expr, env)
            env[s.name] = self.copy_value(s.expr.type, v) if isinstance(s.expr, LVar) else v
        elif isinstance(s, LCallStmt):
            self._exec_call_stmt(s, env)
        elif isinstance(s, LIf):
            if self._eval(s.cond, env):
                self._exec_block(s.then_block, env)
            else:
                self._exec_block(s.else_block, env)
        elif isinstance(s, LAssert):
            if not self._eval(s.expr, env):
                raise AssertionFailure("assertion failed")
        elif isinstance(s, LValue):
            raise _Return(self._eval(s.expr, env))
        else:  # pragma: no cover
            raise InterpError(f"unknown statement {type(s).__name__}")

    def _exec_call_stmt(self, s: LCallStmt, env: dict[str, Any]) -> None:
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
            v = self._eval(arg, env)
            if isinstance(arg, LVar):
                if p.mode == "obs" and arg.name in mutated:
                    v = self.copy_value(p.type_name, v)
                elif p.mode == "upd":
                    if arg.name in seen_mutable:
                        v = self.copy_value(p.type_name, v)
                    seen_mutable.add(arg.name)
            values.append(v)
        result = self.call_op(op, values)
        if op.kind == "procedure":
            outs = [p for p in op.params if p.mode in ("upd", "out")]
            for p, arg, v in zip(outs, self._out_args(op, s), result):
                env[arg.name] = v

    @staticmethod
    def _out_args(op: OpInfo, s: LCallStmt) -> list[LVar]:
        return [arg for p, arg in zip(op.params, s.args) if p.mode in ("upd", "out")]

    # ── expression evaluation ───────────────────────────────────────

    def _eval(self, e: LExpr, env: dict[str, Any]) -> Any:
        if isinstance(e, LVar):
            v = env.get(e.name, _UNSET)
            if v is _UNSET:
                raise InterpError(f"variable '{e.name}' read before assignment")
            return v
        if isinstance(e, LCall):
            args = [self._eval(a, env) for a in e.args]
            return self.call_op(e.op, args)
        if isinstance(e, LEq):
            return self.values_equal(
                e.operand_type, self._eval(e.lhs, env), self._eval(e.rhs, env)
            )
        if isinstance(e, LNot):
            return not self._eval(e.operand, env)
        if isinstance(e, LAnd):
            return bool(self._eval(e.lhs, env)) and bool(self._eval(e.rhs, env))
        raise InterpError(f"unknown expression {type(e).__name__}")  # pragma: no cover
