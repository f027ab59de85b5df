"""Exception types raised across the lab."""
from __future__ import annotations


class LabError(ValueError):
    """Base class for all lab errors."""


class BadVertexIndex(LabError):
    pass


class DegreeBoundViolated(LabError):
    def __init__(self, vertex: int, degree: int, bound: int, direction: str = "out"):
        self.vertex = vertex
        self.degree = degree
        self.bound = bound
        super().__init__(
            f"vertex {vertex} has {direction}-degree {degree} > bound {bound}"
        )


class ModelViolation(LabError):
    """An in-neighbor query was issued in the unidirectional model."""


class PatternTooLarge(LabError):
    pass


class NotWeaklyConnected(LabError):
    pass


class TooFewSources(LabError):
    pass


class EmptySequence(LabError):
    pass


class ZeroMoment(LabError):
    pass


class Unrealizable(LabError):
    def __init__(self, n: int, below: int | None = None, above: int | None = None):
        self.n = n
        self.below = below
        self.above = above
        hint = [str(x) for x in (below, above) if x is not None]
        msg = f"no sequence of length {n} realizes the distribution exactly"
        if hint:
            msg += f"; nearest realizable lengths: {' or '.join(hint)}"
        super().__init__(msg)


class OccurrenceCapExceeded(LabError):
    def __init__(self, value: int, count: int, cap: int):
        self.value = value
        self.count = count
        self.cap = cap
        super().__init__(f"value {value} occurs {count} times, cap is {cap}")


class ValueOutOfRange(LabError):
    """A sequence value cannot address one of the n center copies."""
