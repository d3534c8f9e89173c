"""mglite: a batch compiler for a small algebraic specification language.

Pipeline: parse .mg sources, flatten module expressions (renaming + merge),
check satisfaction relations, type-check bodies, compile concept axioms into
runnable test oracles, and transpile monomorphic programs to a host language.
"""

__version__ = "0.1.0"
