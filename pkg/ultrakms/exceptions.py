"""
Errors raised by ultragraph-kms.

Everything derives from UltraKMSError so the CLI can turn any domain problem
into exit code 1 with a readable message. Outcomes that are legitimately
"nothing" (an undefined concatenation, an empty cylinder, no KMS state at
this beta) are returned as values, not raised.
"""

from typing import Any, Optional


class UltraKMSError(Exception):
    """Base class for every domain error."""


class ParseError(UltraKMSError):
    """Input text does not follow the documented grammar."""

    def __init__(self, message: str, line: Optional[int] = None, text: str = ""):
        self.line = line
        self.text = text
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}" + (f" ({text!r})" if text else ""))


class UnknownName(UltraKMSError):
    """A vertex, edge or emitter name that the ultragraph does not know."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown name {name!r}")


class SinkDetected(UltraKMSError):
    """A vertex emits no edge."""

    def __init__(self, vertex: Any):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} is a sink")


class EmptyRange(UltraKMSError):
    """An edge has an empty range."""

    def __init__(self, edge: Any):
        self.edge = edge
        super().__init__(f"edge {edge} has an empty range")


class UndecidableAtDepth(UltraKMSError):
    """A presented family could not certify a property within the enumeration bound."""

    def __init__(self, edge: Any, depth: int):
        self.edge = edge
        self.depth = depth
        super().__init__(f"cannot decide range of {edge} within depth {depth}")


class EmptySetError(UltraKMSError):
    """A lattice expression evaluated to the empty set where a vertex set was required."""


class NotSubset(UltraKMSError):
    """cyl_diff was asked for C minus C1 with C1 not contained in C."""


class DomainViolation(UltraKMSError):
    """A partial-action generator was applied outside its domain."""


class MissingAtom(UltraKMSError):
    """An m-function has no value for an atom it is asked to evaluate."""

    def __init__(self, atom: Any):
        self.atom = atom
        super().__init__(f"no value assigned to atom {atom}")


class MissingWeight(UltraKMSError):
    """An edge has no weight N(e)."""

    def __init__(self, edge: Any):
        self.edge = edge
        super().__init__(f"no weight N({edge}) given")


class NoExhaustingSequence(UltraKMSError):
    """m1 needs a maximal element or a declared exhausting sequence."""


class NotDisjoint(UltraKMSError):
    """Pieces claimed disjoint share a point."""

    def __init__(self, first: Any, second: Any):
        self.first = first
        self.second = second
        super().__init__(f"{first} and {second} intersect")


class NotFound(UltraKMSError):
    """The critical beta search has no sign change in its bracket."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class DivergentAtZero(UltraKMSError):
    """d_beta is undefined at beta = 0."""


class MwOutOfRange(UltraKMSError):
    """Requested m({w}) lies outside the admissible interval."""

    def __init__(self, value: Any, low: Any, high: Any):
        self.value = value
        self.low = low
        self.high = high
        super().__init__(f"m(w)={value} outside admissible range [{low}, {high}]")


class InexactValue(UltraKMSError):
    """Exact mode was requested but a value is irrational."""


class InvalidWeight(UltraKMSError):
    """N(e) must lie in (1, infinity)."""

    def __init__(self, edge: Any, value: Any):
        self.edge = edge
        self.value = value
        super().__init__(f"N({edge})={value} is not greater than 1")
