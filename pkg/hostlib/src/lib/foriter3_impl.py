"""Iterator-driven loop combinator: three states, two contexts."""


def repeat(iterEnd, iterNext, step, it, s1, s2, s3, c1, c2):
    while not iterEnd(it):
        (s1, s2, s3) = step(it, s1, s2, s3, c1, c2)
        (it,) = iterNext(it)
    return (s1, s2, s3)
