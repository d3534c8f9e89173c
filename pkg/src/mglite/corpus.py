"""The checked-in source corpus: loading, validation, end-to-end execution.

The ``corpus/`` directory holds the language sources this artifact treats
as both fixtures and documentation — container concepts, arithmetic
examples, graph-search schedules, and the external bindings they run on.
Every ``.mg`` entry has an adjacent ``.expected.json`` summary recording,
for each module the file declares, the flattened type/op/axiom counts and
the satisfaction names it contributes.  `validate_corpus` recomputes those
summaries from scratch and reports any drift; `run_end_to_end` transpiles
one corpus program and executes its graph entry point on a fixture.
"""

from __future__ import annotations

import functools
import json
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import CompileError, Diagnostic, error
from .modsys import FlatModule, ModuleEnv, check_satisfaction, flatten
from .parser import parse
from .semantics import check_module

CORPUS_DIR = Path(__file__).resolve().parents[2] / "corpus"
FIXTURE_DIR = CORPUS_DIR / "fixtures"


@dataclass(frozen=True)
class CorpusEntry:
    """One ``.mg`` file plus its expected flatten summary."""

    path: Path
    module_names: tuple[str, ...]
    satisfaction_names: tuple[str, ...]
    expected: dict  # {"modules": {name: {kind, types, ops, axioms}}, "satisfactions": [...]}
    tags: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return self.path.stem

    @property
    def negative(self) -> bool:
        return "negative" in self.tags


def _entry_tags(stem: str) -> tuple[str, ...]:
    groups = {
        "semigroup": ("algebra",),
        "absorption": ("algebra", "cross-satisfaction"),
        "containers": ("containers",),
        "loops": ("loops",),
        "countdown": ("loops",),
        "graph_concept": ("graph",),
        "bfs_utils": ("graph", "search"),
        "graph_search": ("graph", "search"),
        "search_programs": ("graph", "search", "runnable"),
        "dijkstra": ("graph", "shortest-paths", "runnable"),
        "externals": ("bindings",),
    }
    return groups.get(stem, ())


def load_corpus(corpus_dir: Path | None = None) -> list[CorpusEntry]:
    """Read every corpus entry and its expected summary, in name order."""
    corpus_dir = Path(corpus_dir) if corpus_dir is not None else CORPUS_DIR
    entries = []
    for path in sorted(corpus_dir.glob("*.mg")):
        expected_path = path.with_suffix(".expected.json")
        if not expected_path.exists():
            raise FileNotFoundError(f"missing expected summary: {expected_path}")
        expected = json.loads(expected_path.read_text())
        unit, diags = parse(path.read_text(), str(path))
        if any(d.severity == "error" for d in diags):
            raise CompileError(diags)
        entries.append(
            CorpusEntry(
                path=path,
                module_names=tuple(
                    m.name for m in unit.modules if m.kind != "satisfaction"
                ),
                satisfaction_names=tuple(
                    m.name for m in unit.modules if m.kind == "satisfaction"
                ),
                expected=expected,
                tags=_entry_tags(path.stem),
            )
        )
    if not entries:
        raise FileNotFoundError(f"no .mg entries under {corpus_dir}")
    return entries


@functools.lru_cache(maxsize=None)
def _env_for(corpus_dir: str) -> ModuleEnv:
    units = []
    all_diags: list[Diagnostic] = []
    for path in sorted(Path(corpus_dir).glob("*.mg")):
        unit, diags = parse(path.read_text(), str(path))
        all_diags.extend(diags)
        units.append(unit)
    env, diags = ModuleEnv.from_units(units)
    all_diags.extend(diags)
    if any(d.severity == "error" for d in all_diags):
        raise CompileError(all_diags)
    return env


def corpus_env(corpus_dir: Path | None = None) -> ModuleEnv:
    """One shared module environment over the whole corpus (cached)."""
    corpus_dir = Path(corpus_dir) if corpus_dir is not None else CORPUS_DIR
    return _env_for(str(corpus_dir.resolve()))


def _flat_summary(flat: FlatModule) -> dict:
    return {
        "kind": flat.kind,
        "types": len(flat.types),
        "ops": len(flat.ops),
        "axioms": len(flat.axioms),
    }


def validate_corpus(corpus_dir: Path | None = None) -> list[str]:
    """Re-derive every entry's summary and compare; return mismatch lines.

    An empty result means the corpus is healthy: every entry parses,
    flattens, and type-checks clean (unless tagged negative), every
    declared satisfaction holds, and the recorded summaries match.
    """
    problems: list[str] = []
    entries = load_corpus(corpus_dir)
    try:
        env = corpus_env(corpus_dir)
    except CompileError as exc:
        return [d.render() for d in exc.diagnostics]

    for entry in entries:
        actual_modules: dict[str, dict] = {}
        for name in entry.module_names:
            try:
                flat = flatten(env, name)
            except CompileError as exc:
                if not entry.negative:
                    problems.extend(
                        f"{entry.name}: {d.render()}" for d in exc.diagnostics
                    )
                continue
            _, diags = check_module(flat)
            bad = [d for d in diags if d.severity == "error"]
            if bad and not entry.negative:
                problems.extend(f"{entry.name}: {d.render()}" for d in bad)
            actual_modules[name] = _flat_summary(flat)
        for sat_name in entry.satisfaction_names:
            diags = check_satisfaction(env.modules[sat_name], env)
            bad = [d for d in diags if d.severity == "error"]
            if bad and not entry.negative:
                problems.extend(f"{entry.name}: {d.render()}" for d in bad)

        actual = {
            "modules": actual_modules,
            "satisfactions": sorted(entry.satisfaction_names),
        }
        expected = {
            "modules": entry.expected.get("modules", {}),
            "satisfactions": sorted(entry.expected.get("satisfactions", [])),
        }
        if actual != expected:
            for name in sorted(set(actual["modules"]) | set(expected["modules"])):
                got, want = actual["modules"].get(name), expected["modules"].get(name)
                if got != want:
                    problems.append(
                        f"{entry.name}: module {name}: expected {want}, got {got}"
                    )
            if actual["satisfactions"] != expected["satisfactions"]:
                problems.append(
                    f"{entry.name}: satisfactions: expected "
                    f"{expected['satisfactions']}, got {actual['satisfactions']}"
                )
    return problems


def _graph_entry(flat: FlatModule, entry_table: dict[str, str], entry: str | None):
    if entry is not None:
        ops = flat.ops_named(entry)
        if len(ops) != 1:
            raise CompileError(f"AmbiguousEntry: {entry!r} names {len(ops)} ops")
        return ops[0]
    candidates = []
    for plain in entry_table:
        ops = flat.ops_named(plain)
        if len(ops) != 1 or ops[0].binding is not None:
            continue
        inputs = tuple(p.type_name for p in ops[0].params if p.mode != "out")
        if inputs == ("Graph", "VertexDescriptor"):
            candidates.append(ops[0])
    if len(candidates) != 1:
        raise CompileError(
            f"AmbiguousEntry: {len(candidates)} ops take (Graph, VertexDescriptor)"
        )
    return candidates[0]


def run_end_to_end(
    program_name: str,
    fixture: str,
    start: int = 0,
    *,
    entry: str | None = None,
    corpus_dir: Path | None = None,
    guard_checks: bool = True,
    binding_overrides: dict | None = None,
):
    """Transpile one corpus program and run its (Graph, start) entry point.

    `fixture` is the fixture text itself, or a file name under
    ``corpus/fixtures/``.  Host faults propagate to the caller.
    """
    import lib.graph_impl

    from .codegen import load_emitted, transpile

    env = corpus_env(corpus_dir)
    flat = flatten(env, program_name)
    checked, diags = check_module(flat)
    bad = [d for d in diags if d.severity == "error"]
    if bad:
        raise CompileError(bad)

    if "\n" not in fixture:
        fixture = ((Path(corpus_dir) / "fixtures" if corpus_dir else FIXTURE_DIR) / fixture).read_text()
    graph = lib.graph_impl.makeGraph(fixture)

    with tempfile.TemporaryDirectory(prefix="mglite-e2e-") as tmp:
        emitted = transpile(
            checked,
            out_dir=tmp,
            guard_checks=guard_checks,
            binding_overrides=binding_overrides,
        )
        bad = [d for d in emitted.diagnostics if d.severity == "error"]
        if bad:
            raise CompileError(bad)
        module = load_emitted(tmp, program_name)
        op = _graph_entry(checked.flat, emitted.entry_table, entry)
        return module.ENTRY_POINTS[op.name](graph, start)
