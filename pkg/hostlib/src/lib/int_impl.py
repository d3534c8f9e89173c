"""Machine integers as a host type, plus its hooks."""

import random

ENUM_LO = -8
ENUM_HI = 8


def zero():
    return 0


def one():
    return 1


def add(a, b):
    return a + b


def sub(a, b):
    return a - b


def mul(a, b):
    return a * b


def isZero(a):
    return a == 0


def lt(a, b):
    return a < b


def eq_int(a, b):
    return a == b


def copy_int(a):
    # ints are immutable, identity is already an independent value
    return a


def enumerate_int(limit):
    return list(range(ENUM_LO, ENUM_HI + 1))[:limit]


def sample_int(seed, i):
    return random.Random(f"{seed}:{i}").randint(ENUM_LO, ENUM_HI)
