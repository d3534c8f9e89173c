"""Code generated from program ExampleProgram.

Deterministic output; regenerate rather than edit.
"""

import lib.int_impl

from _runtime import GuardViolation


_copy_int = lib.int_impl.copy_int


add__int_int__int = lib.int_impl.add

mul__int_int__int = lib.int_impl.mul

def timesThreeUpdateRef__int__Predicate(i):
    i = add__int_int__int(add__int_int__int(i, i), i)
    return (i,)

def timesThree__int__int(i):
    mutable_i = _copy_int(i)
    (mutable_i,) = timesThreeUpdateRef__int__Predicate(mutable_i)
    return mutable_i

ENTRY_POINTS = {
    'add': add__int_int__int,
    'mul': mul__int_int__int,
    'timesThree': timesThree__int__int,
    'timesThreeUpdateRef': timesThreeUpdateRef__int__Predicate,
}
