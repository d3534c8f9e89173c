"""While-loop combinator: three states, one context."""


def repeat(cond, step, s1, s2, s3, c):
    while cond(s1, s2, s3, c):
        (s1, s2, s3) = step(s1, s2, s3, c)
    return (s1, s2, s3)
