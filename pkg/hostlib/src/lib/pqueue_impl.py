"""Min-priority queue over an external distance table, with lazy deletion.

The queue owns a copy of the distance map it was created from.  A push
records (current distance, vertex); lowering a vertex's distance and
re-pushing leaves the old heap entry behind as garbage, which settling
drops whenever the head is inspected.  An entry priced above its
vertex's current distance counts as deleted, so equality compares the
distance table plus the live entries only.  Distance updates are meant
to lower (Dijkstra's usage); raising one can revive a not-yet-settled
entry.
"""

import heapq

from .runtime import GuardViolation


class PriorityQueue:
    __slots__ = ("dist", "heap")

    def __init__(self, dist, heap):
        self.dist = dist
        self.heap = heap

    def _settle(self):
        while self.heap and self.heap[0][0] > self.dist[self.heap[0][1]]:
            heapq.heappop(self.heap)

    def _live(self):
        return sorted(entry for entry in self.heap if entry[0] <= self.dist[entry[1]])

    def __eq__(self, other):
        return (
            isinstance(other, PriorityQueue)
            and self.dist == other.dist
            and self._live() == other._live()
        )

    def __repr__(self):
        return f"PriorityQueue(dist={self.dist}, heap={self._live()})"


def emptyWithDistances(d):
    return PriorityQueue(dict(d), [])


def isEmptyHeap(pq):
    pq._settle()
    return not pq.heap


def pushHeap(v, pq):
    heapq.heappush(pq.heap, (pq.dist[v], v))
    return (pq,)


def popHeap(pq):
    pq._settle()
    if not pq.heap:
        raise GuardViolation("popHeap")
    heapq.heappop(pq.heap)
    return (pq,)


def frontHeap(pq):
    pq._settle()
    if not pq.heap:
        raise GuardViolation("frontHeap")
    return pq.heap[0][1]


def updateDist(v, d, pq):
    pq.dist[v] = d
    return (pq,)


def currentDist(v, pq):
    return pq.dist[v]


def distances(pq):
    return dict(pq.dist)


def eq_PriorityQueue(a, b):
    return a == b


def copy_PriorityQueue(pq):
    return PriorityQueue(dict(pq.dist), list(pq.heap))
