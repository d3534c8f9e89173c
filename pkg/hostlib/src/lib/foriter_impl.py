"""Iterator-driven loop combinator: one state, one context."""


def repeat(iterEnd, iterNext, step, it, s, c):
    while not iterEnd(it):
        (s,) = step(it, s, c)
        (it,) = iterNext(it)
    return (s,)
