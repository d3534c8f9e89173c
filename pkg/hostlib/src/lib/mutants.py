"""Deliberately wrong drop-in replacements for single host operations.

Each function matches the calling convention of the operation it
replaces.  Test suites rebind one operation at a time to check that the
compiled law oracles and end-to-end comparisons actually catch the bug.
"""

import heapq

from .runtime import GuardViolation, copy_value


def add_subtracts(a, b):
    """Replaces int_impl.add: subtracts instead."""
    return a - b


def stack_pop_bottom(s):
    """Replaces stack_impl.pop: removes the oldest element, not the top."""
    if not s:
        raise GuardViolation("pop")
    del s[0]
    return (s,)


def queue_front_newest(q):
    """Replaces queue_impl.front: peeks the newest element, not the oldest."""
    if not q:
        raise GuardViolation("front")
    return copy_value(q[-1])


def queue_pop_newest(q):
    """Replaces queue_impl.pop: removes the newest element, not the oldest."""
    if not q:
        raise GuardViolation("pop")
    q.pop()
    return (q,)


def while_extra_step(cond, step, s, c):
    """Replaces loop_impl.repeat: runs the step once more after the
    condition has gone false."""
    while cond(s, c):
        (s,) = step(s, c)
    (s,) = step(s, c)
    return (s,)


def tgt_returns_src(e, g):
    """Replaces graph_impl.tgt: answers the source endpoint."""
    return g.edges[e][0]


def pqueue_front_max(pq):
    """Replaces pqueue_impl.frontHeap: answers the entry with the largest
    priority instead of the smallest."""
    pq._settle()
    if not pq.heap:
        raise GuardViolation("frontHeap")
    return max(pq.heap)[1]


def pqueue_pop_max(pq):
    """Replaces pqueue_impl.popHeap: drops the entry with the largest
    priority instead of the smallest."""
    pq._settle()
    if not pq.heap:
        raise GuardViolation("popHeap")
    pq.heap.remove(max(pq.heap))
    heapq.heapify(pq.heap)
    return (pq,)
