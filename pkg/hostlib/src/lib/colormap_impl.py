"""Three-state vertex coloring over a dict property map."""

WHITE = 0
GRAY = 1
BLACK = 2


def white():
    return WHITE


def gray():
    return GRAY


def black():
    return BLACK


def get(c, v):
    return c[v]


def put(c, v, col):
    c[v] = col
    return (c,)


def initMap(itr, col):
    values, idx = itr
    return {v: col for v in values[idx:]}


def eq_Color(a, b):
    return a == b


def copy_Color(c):
    return c


def enumerate_Color(limit):
    return [WHITE, GRAY, BLACK][:limit]


def eq_ColorPropertyMap(a, b):
    return a == b


def copy_ColorPropertyMap(c):
    return dict(c)
