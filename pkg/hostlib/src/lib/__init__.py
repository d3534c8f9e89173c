"""Host base library for emitted programs.

Every module here follows one calling convention, shared with the code
emitter and the reference interpreter:

* A function returns its value.  A predicate returns a host ``bool``.
* A procedure returns the tuple of its ``upd`` and ``out`` parameters in
  declaration order, a one-tuple included.  The caller rebinds.
* An operation with required callbacks receives them as leading callable
  arguments, in the order the requirements are declared.  Each callback
  follows the same convention.

Value discipline: no function mutates a value bound to an ``obs``
parameter of the emitted code, containers store copies of pushed
elements, and accessors return copies, so no result aliases container
internals.  Updates arrive through the tuple-return convention, which
leaves the implementations free to mutate their own representations in
place.
"""
