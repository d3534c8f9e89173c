"""Append-only vertex list collecting traversal output."""

from .runtime import copy_value


def emptyVertexList():
    return []


def appendVertex(v, l):
    l.append(copy_value(v))
    return (l,)


def eq_VertexList(a, b):
    return a == b


def copy_VertexList(l):
    return list(l)
