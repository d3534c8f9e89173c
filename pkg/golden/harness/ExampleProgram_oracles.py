"""Oracle harness for program ExampleProgram.

Deterministic output; regenerate rather than edit.
"""

import lib.int_impl

from _runtime import GuardViolation, drive_oracle, record
from ExampleProgram import add__int_int__int


_eq_int = lib.int_impl.eq_int
_enumerate_int = lib.int_impl.enumerate_int
_sample_int = lib.int_impl.sample_int


def _law_bopIsAssociative(t1, t2, t3):
    if not _eq_int(add__int_int__int(t1, add__int_int__int(t2, t3)), add__int_int__int(add__int_int__int(t1, t2), t3)):
        raise AssertionError('assertion failed')

ORACLES = [
    ('bopIsAssociative', _law_bopIsAssociative, ((_enumerate_int, _sample_int), (_enumerate_int, _sample_int), (_enumerate_int, _sample_int))),
]


def run_all(budget=5000, seed=0, timeout=5.0):
    return [
        drive_oracle(name, law, gens, budget=budget, seed=seed, timeout=timeout)
        for name, law, gens in ORACLES
    ]
