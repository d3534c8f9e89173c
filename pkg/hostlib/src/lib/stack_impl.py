"""LIFO stack on a Python list; the top lives at the end."""

import itertools
import random

from .runtime import GuardViolation, copy_value

ELEMENTS = (0, 1)
MAX_SIZE = 3


def empty():
    return []


def isEmpty(s):
    return len(s) == 0


def push(a, s):
    s.append(copy_value(a))
    return (s,)


def pop(s):
    if not s:
        raise GuardViolation("pop")
    s.pop()
    return (s,)


def top(s):
    if not s:
        raise GuardViolation("top")
    return copy_value(s[-1])


def eq_Stack(a, b):
    return a == b


def copy_Stack(s):
    return list(s)


def _small_lists():
    out = []
    for size in range(MAX_SIZE + 1):
        out.extend(list(t) for t in itertools.product(ELEMENTS, repeat=size))
    return out


def enumerate_Stack(limit):
    return _small_lists()[:limit]


def sample_Stack(seed, i):
    rng = random.Random(f"{seed}:{i}")
    return [rng.choice(ELEMENTS) for _ in range(rng.randint(0, MAX_SIZE))]
