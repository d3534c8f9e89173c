"""FIFO queue on collections.deque; the front lives at the left."""

import collections
import itertools
import random

from .runtime import GuardViolation, copy_value

ELEMENTS = (0, 1)
MAX_SIZE = 3


def empty():
    return collections.deque()


def isEmpty(q):
    return len(q) == 0


def push(a, q):
    q.append(copy_value(a))
    return (q,)


def pop(q):
    if not q:
        raise GuardViolation("pop")
    q.popleft()
    return (q,)


def front(q):
    if not q:
        raise GuardViolation("front")
    return copy_value(q[0])


def eq_FIFOQueue(a, b):
    return list(a) == list(b)


def copy_FIFOQueue(q):
    return collections.deque(q)


def enumerate_FIFOQueue(limit):
    out = []
    for size in range(MAX_SIZE + 1):
        out.extend(collections.deque(t) for t in itertools.product(ELEMENTS, repeat=size))
    return out[:limit]


def sample_FIFOQueue(seed, i):
    rng = random.Random(f"{seed}:{i}")
    return collections.deque(rng.choice(ELEMENTS) for _ in range(rng.randint(0, MAX_SIZE)))
