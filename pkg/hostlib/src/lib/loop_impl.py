"""While-loop combinator: one state, one context."""


def repeat(cond, step, s, c):
    while cond(s, c):
        (s,) = step(s, c)
    return (s,)
