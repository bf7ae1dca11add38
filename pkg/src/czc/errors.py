"""Exception hierarchy shared by all modules.

Input problems (bad JSON, violated hypotheses, degenerate data) derive from
``CzcInputError`` so the CLI can map them to exit code 2 in one place.
"""

from __future__ import annotations


class CzcError(Exception):
    """Base class for every error raised by this package."""


class CzcInputError(CzcError, ValueError):
    """The supplied data cannot be processed as stated."""


class DegenerateIterate(CzcInputError):
    """Some iterate ``k`` has ``k * rotation`` integral (eigenvalue one)."""

    def __init__(self, value, k: int, orbit: str | None = None):
        self.value = value
        self.k = k
        self.orbit = orbit
        where = f" of orbit {orbit!r}" if orbit else ""
        super().__init__(f"iterate k={k}{where} is degenerate: k*{value} is an integer")


class NonPositiveMeanIndex(CzcInputError):
    def __init__(self, orbit: str, value):
        self.orbit = orbit
        self.value = value
        super().__init__(f"orbit {orbit!r} has non-positive mean index {value}")


class SignMismatch(CzcInputError):
    """Operation needs a positive monotone base."""


class HypothesisError(CzcInputError):
    """A standing hypothesis of the counting argument is not met."""


class InternalInconsistency(CzcError):
    """Two independent computations of the same quantity disagreed."""


class NotDivisible(CzcInputError):
    pass


class Exhausted(CzcError):
    """The certificate search reached its cap without an answer.

    This is a statement about the cap, never about existence.
    """

    def __init__(self, bound: int, side: str = "plus"):
        self.bound = bound
        self.side = side
        super().__init__(f"no {side} certificate with t <= {bound}; raise the search bound")


class RationalRatio(CzcInputError):
    def __init__(self, i: int, j: int, ratio):
        self.i, self.j, self.ratio = i, j, ratio
        super().__init__(f"axes {i} and {j} have rational ratio {ratio}")


class WeightNotCoprime(CzcInputError):
    def __init__(self, weight: int, p: int):
        self.weight, self.p = weight, p
        super().__init__(f"weight {weight} is not coprime to p={p}")


class UnknownName(CzcInputError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NoProfile(CzcError, LookupError):
    """A catalog row exists but no Betti profile is shipped for it."""
