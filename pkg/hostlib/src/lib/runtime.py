"""Shared runtime pieces for emitted programs and their test harnesses."""

import copy as _copy
import itertools
import time
import zlib


class GuardViolation(Exception):
    """A guarded operation was called outside its precondition.

    Carries the operation name so harnesses can report which guard
    fired; oracle runners treat it as "discard this sample", everything
    else treats it as a crash.
    """

    def __init__(self, op_name):
        super().__init__(op_name)
        self.op_name = op_name


_ATOMS = (int, float, bool, str, bytes, frozenset, type(None))


def copy_value(value):
    """Copy helper behind the per-type copy hooks.

    Atoms and tuples of atoms are immutable, so identity already gives
    an observationally independent value; everything else is deep
    copied.
    """
    if isinstance(value, _ATOMS):
        return value
    if isinstance(value, tuple) and all(isinstance(v, _ATOMS) for v in value):
        return value
    return _copy.deepcopy(value)


def record(name, attempted, passed, failed, discarded, witness=None, error=None, status=None):
    """One oracle outcome, as test harnesses report it.

    Keys: name, attempted, passed, failed, discarded, witness, error,
    status.  attempted == passed + failed + discarded always holds;
    witness is the first failing argument tuple, error a crash
    description, status one of pass/fail/inconclusive/timeout.
    """
    if status is None:
        if failed > 0:
            status = "fail"
        elif attempted == 0 or discarded / attempted >= 0.9:
            status = "inconclusive"
        else:
            status = "pass"
    return {
        "name": name,
        "attempted": attempted,
        "passed": passed,
        "failed": failed,
        "discarded": discarded,
        "witness": witness,
        "error": error,
        "status": status,
    }


def drive_oracle(name, law, gens, budget=5000, seed=0, timeout=5.0):
    """Run one law over generated inputs and report a `record`.

    `law` raises AssertionError when the law fails and GuardViolation
    when an input misses a precondition (counted as a discard).  `gens`
    holds one ``(enumerate_fn, sample_fn)`` pair per parameter; when
    every parameter enumerates and the domain product fits the budget
    the run is exhaustive, otherwise `budget` deterministic samples are
    drawn via ``sample_fn(stream_seed, i)``.  A run past `timeout`
    seconds stops with status "timeout".  Exhaustive runs that never
    fire a guard are definitive; heavy discarding turns a run
    inconclusive rather than silently green.
    """
    started = time.monotonic()
    stream = None
    if all(e is not None for e, _ in gens):
        domains = [list(e(budget + 1)) for e, _ in gens]
        size = 1
        for d in domains:
            size *= len(d)
        if size <= budget:
            stream = itertools.product(*domains)
    if stream is None:
        for j, (_, sample) in enumerate(gens):
            if sample is None:
                raise ValueError(
                    f"MissingGenerator: parameter {j} of oracle '{name}' has "
                    "neither an enumerate nor a sample hook"
                )
        base = (seed * 1000003 + zlib.crc32(name.encode())) & 0x7FFFFFFF
        stream = (
            tuple(sample(base + j, i) for j, (_, sample) in enumerate(gens))
            for i in range(budget)
        )
    attempted = passed = failed = discarded = 0
    witness = None
    error = None
    status = None
    for args in stream:
        attempted += 1
        try:
            law(*args)
            passed += 1
        except GuardViolation:
            discarded += 1
        except AssertionError:
            failed += 1
            if witness is None:
                witness = args
        except Exception as exc:  # crash in the law or a host op
            failed += 1
            if witness is None:
                witness = args
            error = f"{type(exc).__name__}: {exc}"
            break
        if time.monotonic() - started > timeout:
            status = "timeout"
            break
    return record(name, attempted, passed, failed, discarded, witness, error, status)
