"""Directed graphs with weighted edges.

A graph is immutable once built.  Vertices are ints 0..n-1, an edge
descriptor is an index into the edge table, and iterators are plain
``(values_tuple, index)`` pairs, so they copy for free.  Out-edge lists
are pre-sorted by target vertex ascending, which fixes the visit order
of every traversal.
"""

import random

from .runtime import GuardViolation


class Graph:
    __slots__ = ("n", "edges", "out")

    def __init__(self, n, edges):
        self.n = n
        self.edges = tuple((int(u), int(v), int(w)) for (u, v, w) in edges)
        for u, v, _ in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
        buckets = [[] for _ in range(n)]
        for idx, (u, _, _) in enumerate(self.edges):
            buckets[u].append(idx)
        self.out = tuple(
            tuple(sorted(b, key=lambda i: (self.edges[i][1], i))) for b in buckets
        )

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"


def makeGraph(text):
    """Build a graph from fixture text: a "V E" header line, then one
    "u v" or "u v w" line per edge (weight defaults to 1)."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty graph fixture")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad fixture header: {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    edges = []
    for ln in lines[1 : m + 1]:
        parts = ln.split()
        if len(parts) == 2:
            u, v = parts
            edges.append((int(u), int(v), 1))
        elif len(parts) == 3:
            u, v, w = parts
            edges.append((int(u), int(v), int(w)))
        else:
            raise ValueError(f"bad fixture edge line: {ln!r}")
    if len(edges) != m:
        raise ValueError(f"fixture promises {m} edges, found {len(edges)}")
    return Graph(n, edges)


def vertices(g):
    return ((tuple(range(g.n)), 0),)


def outEdges(u, g):
    if not 0 <= u < g.n:
        raise IndexError(f"vertex {u} out of range for graph with {g.n} vertices")
    return ((g.out[u], 0),)


def src(e, g):
    return g.edges[e][0]


def tgt(e, g):
    return g.edges[e][1]


def weight(e, g):
    return g.edges[e][2]


def edgeIterEnd(it):
    return it[1] >= len(it[0])


def edgeIterNext(it):
    if it[1] >= len(it[0]):
        raise GuardViolation("edgeIterNext")
    return ((it[0], it[1] + 1),)


def edgeIterUnpack(it):
    if it[1] >= len(it[0]):
        raise GuardViolation("edgeIterUnpack")
    return it[0][it[1]]


def iter_values(it):
    """Remaining values of a ``(values_tuple, index)`` iterator."""
    values, idx = it
    return values[idx:]


def eq_Graph(a, b):
    return a == b


def copy_Graph(g):
    # graphs are immutable once built
    return g


def eq_VertexDescriptor(a, b):
    return a == b


def copy_VertexDescriptor(v):
    return v


def enumerate_VertexDescriptor(limit):
    return list(range(-8, 9))[:limit]


def sample_VertexDescriptor(seed, i):
    return random.Random(f"{seed}:{i}").randint(-8, 8)


def eq_EdgeDescriptor(a, b):
    return a == b


def copy_EdgeDescriptor(e):
    return e


def eq_EdgeIterator(a, b):
    return a == b


def copy_EdgeIterator(it):
    # (tuple, index) pairs are immutable
    return it


def eq_VertexIterator(a, b):
    return a == b


def copy_VertexIterator(it):
    return it
