"""Vertex-to-distance map; unreachable is a large finite sentinel."""

INFINITY = 2**30


def infinity():
    return INFINITY


def initDistances(itr, d):
    values, idx = itr
    return {v: d for v in values[idx:]}


def putDist(m, v, d):
    m[v] = d
    return (m,)


def eq_DistanceMap(a, b):
    return a == b


def copy_DistanceMap(m):
    return dict(m)
