"""Conley-Zehnder indices of iterated orbits in semisimple normal form.

An orbit is described by its elliptic rotation numbers ``theta_m`` and the
per-iterate integer contribution of its hyperbolic part.  The index of the
``k``-th iterate is

    mu(k) = sum_m (2*floor(k*theta_m) + 1) + k*(linear_even + sum(odd_linear))

and the mean index is ``k*(2*sum(theta) + linear_even + sum(odd_linear))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import CzcInputError, DegenerateIterate, NonPositiveMeanIndex
from .exact import ExactReal, floor_mul, from_json, is_integer_multiple, to_json

__all__ = [
    "OrbitModel",
    "IterateEntry",
    "IterateIndexTable",
    "cz_index",
    "cz_indices",
    "mean_index",
    "is_good",
    "local_chi",
    "mean_chi",
    "contractible_iterates",
    "contractible_arrays",
    "index_range",
    "count_le",
    "ell_zero",
    "collapse",
]


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CzcInputError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class OrbitModel:
    """Normal-form data of a simple closed orbit."""

    name: str
    rotations: tuple[ExactReal, ...] = ()
    linear_even: int = 0
    odd_linear: tuple[int, ...] = ()
    torsion_order: int = 1

    def __post_init__(self):
        rots = tuple(r if isinstance(r, ExactReal) else ExactReal(r) for r in self.rotations)
        object.__setattr__(self, "rotations", rots)
        object.__setattr__(self, "odd_linear", tuple(_as_int(v, "odd_linear entry") for v in self.odd_linear))
        _as_int(self.linear_even, "linear_even")
        _as_int(self.torsion_order, "torsion_order")
        if not isinstance(self.name, str):
            raise CzcInputError(f"orbit name must be a string, got {self.name!r}")
        for r in rots:
            if r.sign() <= 0:
                raise CzcInputError(f"orbit {self.name!r}: rotation {r} must be positive")
        if self.linear_even % 2:
            raise CzcInputError(f"orbit {self.name!r}: linear_even={self.linear_even} is odd")
        for v in self.odd_linear:
            if v % 2 == 0:
                raise CzcInputError(f"orbit {self.name!r}: odd_linear entry {v} is even")
        if self.torsion_order < 1:
            raise CzcInputError(f"orbit {self.name!r}: torsion_order must be positive")

    @property
    def e(self) -> int:
        return len(self.rotations)

    @property
    def linear_total(self) -> int:
        return self.linear_even + sum(self.odd_linear)

    @property
    def is_hyperbolic(self) -> bool:
        return not self.rotations

    @property
    def rank(self) -> int:
        """Number of symplectic 2-planes the model occupies, at least."""
        return self.e + len(self.odd_linear)

    def kernel_params(self) -> list[tuple[int, int, int, int]] | None:
        """Rotations as ``(a, b, root, den)`` tuples, or None for mixed-root values."""
        out = []
        for r in self.rotations:
            if r.kind == "rat":
                n, d = r.rat_fields()
                out.append((n, 0, 1, d))
            elif r.kind == "surd":
                out.append(r.surd_fields())
            else:
                return None
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "rotations": [to_json(r) for r in self.rotations],
            "linear_even": self.linear_even,
            "odd_linear": list(self.odd_linear),
            "torsion_order": self.torsion_order,
        }

    @classmethod
    def from_json(cls, obj) -> "OrbitModel":
        if not isinstance(obj, dict):
            raise CzcInputError(f"orbit must be a JSON object, got {type(obj).__name__}")
        unknown = set(obj) - {"name", "rotations", "linear_even", "odd_linear", "torsion_order"}
        if unknown:
            raise CzcInputError(f"orbit has unknown fields {sorted(unknown)}")
        if "name" not in obj:
            raise CzcInputError("orbit is missing field 'name'")
        rots = obj.get("rotations", [])
        odd = obj.get("odd_linear", [])
        if not isinstance(rots, list) or not isinstance(odd, list):
            raise CzcInputError(f"orbit {obj['name']!r}: rotations and odd_linear must be lists")
        try:
            rotations = tuple(from_json(r) for r in rots)
        except CzcInputError as exc:
            raise CzcInputError(f"orbit {obj['name']!r}: {exc}") from None
        return cls(
            name=obj["name"],
            rotations=rotations,
            linear_even=obj.get("linear_even", 0),
            odd_linear=tuple(odd),
            torsion_order=obj.get("torsion_order", 1),
        )


def _check_nondegenerate(orbit: OrbitModel, k: int) -> None:
    for r in orbit.rotations:
        if is_integer_multiple(r, k):
            raise DegenerateIterate(r, k, orbit.name)


def _check_k(k) -> int:
    k = _as_int(k, "iterate")
    if k == 0:
        raise CzcInputError("iterate k must be nonzero")
    return k


def cz_index(orbit: OrbitModel, k: int) -> int:
    """Index of the ``k``-th iterate.

    Negative ``k`` is accepted (the inverse path) and gives ``-cz_index(orbit, -k)``.
    """
    k = _check_k(k)
    _check_nondegenerate(orbit, k)
    mu = orbit.e + k * orbit.linear_total
    for r in orbit.rotations:
        mu += 2 * floor_mul(r, k)
    return mu


def cz_indices(orbit: OrbitModel, ks: Iterable[int]) -> list[int]:
    """Batch ``cz_index`` through the compiled kernel when possible."""
    ks = [_check_k(k) for k in ks]
    for r in orbit.rotations:
        if r.is_rational:
            q = r.as_fraction().denominator
            for k in ks:
                if k % q == 0:
                    raise DegenerateIterate(r, k, orbit.name)
    params = orbit.kernel_params()
    if params is None:
        return [cz_index(orbit, k) for k in ks]
    return kernels.orbit_indices(params, orbit.linear_total, ks)


def mean_index(orbit: OrbitModel, k: int = 1) -> ExactReal:
    base = ExactReal(orbit.linear_total)
    for r in orbit.rotations:
        base = base + r * 2
    return base * k


def is_good(orbit: OrbitModel, k: int) -> bool:
    k = _check_k(k)
    _check_nondegenerate(orbit, k)
    return k % 2 == 1 or len(orbit.odd_linear) % 2 == 0


def local_chi(orbit: OrbitModel, k: int) -> int:
    if not is_good(orbit, k):
        return 0
    return -1 if cz_index(orbit, k) % 2 else 1


def mean_chi(orbit: OrbitModel) -> ExactReal:
    sign = -1 if cz_index(orbit, 1) % 2 else 1
    if is_good(orbit, 2):
        return ExactReal(sign)
    return ExactReal(Fraction(sign, 2))


@dataclass(frozen=True)
class IterateEntry:
    k: int
    mu: int
    contractible: bool
    good: bool


@dataclass(frozen=True)
class IterateIndexTable:
    orbit: OrbitModel
    max_index: int
    entries: tuple[IterateEntry, ...] = field(default_factory=tuple)

    def indices(self) -> list[int]:
        return [e.mu for e in self.entries]

    def ks(self) -> list[int]:
        return [e.k for e in self.entries]


def _k_cutoff(orbit: OrbitModel, max_index: int, slack: int) -> int:
    mu_hat = mean_index(orbit)
    if mu_hat.sign() <= 0:
        raise NonPositiveMeanIndex(orbit.name, mu_hat)
    bound = (ExactReal(max_index + slack)) / mu_hat
    return max(0, floor_mul(bound, 1))


def _check_range_nondegenerate(orbit: OrbitModel, j0: int, j1: int) -> None:
    # a rational rotation p/q is degenerate at k = c*j exactly when q/gcd(q, c) divides j
    c = orbit.torsion_order
    for r in orbit.rotations:
        if r.is_rational:
            q = r.as_fraction().denominator
            m = q // gcd(q, c)
            j = -(-j0 // m) * m
            if j < j1:
                raise DegenerateIterate(r, c * j, orbit.name)


def index_range(orbit: OrbitModel, j0: int, j1: int) -> np.ndarray:
    """Indices of the contractible iterates ``k = c*j`` for ``j0 <= j < j1``.

    ``c`` is the torsion order; ``j`` must stay positive.
    """
    c = orbit.torsion_order
    if j0 < 1:
        raise CzcInputError("iterate range must start at 1 or later")
    if j1 <= j0:
        return np.zeros(0, dtype=np.int64)
    base = collapse(orbit)
    params = base.kernel_params()
    _check_range_nondegenerate(orbit, j0, j1)
    if params is None:
        return np.array([cz_index(base, j) for j in range(j0, j1)], dtype=object)
    return kernels.orbit_indices_range(params, base.linear_total, j0, j1)


def count_le(orbit: OrbitModel, bound: int) -> int:
    """Number of contractible iterates with index at most ``bound``.

    With a non-negative linear term the index is non-decreasing along the
    contractible iterates, so a binary search on exact values suffices.
    """
    base = collapse(orbit)
    jmax = _k_cutoff(base, bound, base.e)
    if jmax < 1:
        return 0
    if base.linear_total >= 0:
        lo, hi = 0, jmax
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if cz_index(base, mid) <= bound:
                lo = mid
            else:
                hi = mid - 1
        return lo
    total = 0
    step = 1 << 22
    for j0 in range(1, jmax + 1, step):
        total += int((index_range(orbit, j0, min(jmax + 1, j0 + step)) <= bound).sum())
    return total


def contractible_arrays(orbit: OrbitModel, max_index: int, n_ambient: int | None = None):
    """``(ks, mus)`` int64 arrays of contractible iterates with index <= ``max_index``.

    Iterates beyond ``(max_index + e)/mu_hat`` cannot qualify because
    ``mu(k) > k*mu_hat - e``; ``n_ambient`` can only widen that cutoff.
    """
    slack = orbit.e if n_ambient is None else max(orbit.e, n_ambient)
    kmax = _k_cutoff(orbit, max_index, slack)
    c = orbit.torsion_order
    ks = np.arange(c, kmax + 1, c, dtype=np.int64)
    mus = index_range(orbit, 1, ks.size + 1).astype(np.int64)
    keep = mus <= max_index
    return ks[keep], mus[keep]


def contractible_iterates(orbit: OrbitModel, max_index: int, n_ambient: int | None = None) -> IterateIndexTable:
    """All contractible iterates with index at most ``max_index``."""
    ks, mus = contractible_arrays(orbit, max_index, n_ambient)
    even_bad = len(orbit.odd_linear) % 2 == 1
    entries = tuple(IterateEntry(int(k), int(mu), True, not (even_bad and k % 2 == 0)) for k, mu in zip(ks, mus))
    return IterateIndexTable(orbit, max_index, entries)


def _growth(orbit: OrbitModel, ell: int) -> int:
    g = ell * orbit.linear_total
    for r in orbit.rotations:
        g += 2 * floor_mul(r, ell)
    return g


def ell_zero(orbits: Sequence[OrbitModel], n: int) -> int:
    """A valid ``l0``: ``mu(k + l) >= mu(k) + n + 3`` for all ``k >= 1``, ``l >= l0``.

    Superadditivity of floors gives ``mu(k + l) - mu(k) >= g(l) - e`` with
    ``g(l) = sum 2*floor(l*theta) + l*L``, so it suffices that ``g(l) - e >= n + 3``
    for every ``l >= l0``.  Since ``g(l) > l*mu_hat - 2e`` that fails only for
    ``l < (n + 2 + 3e)/mu_hat``, a finite scan.
    """
    n = _as_int(n, "n")
    best = 1
    for orbit in orbits:
        mu_hat = mean_index(orbit)
        if mu_hat.sign() <= 0:
            raise NonPositiveMeanIndex(orbit.name, mu_hat)
        horizon = floor_mul(ExactReal(n + 2 + 3 * orbit.e) / mu_hat, 1)
        last_bad = 0
        for ell in range(1, horizon + 1):
            if _growth(orbit, ell) - orbit.e < n + 3:
                last_bad = ell
        best = max(best, last_bad + 1)
    return best


def collapse(orbit: OrbitModel) -> OrbitModel:
    """Replace an orbit by its minimal contractible iterate (torsion order 1).

    With ``c = torsion_order`` the new rotations are ``c*theta`` and the linear
    part is ``c*L``; when ``c`` is even the negative-hyperbolic blocks become
    positive-hyperbolic and fold into ``linear_even``.
    """
    c = orbit.torsion_order
    if c == 1:
        return orbit
    rotations = tuple(r * c for r in orbit.rotations)
    if c % 2:
        return OrbitModel(orbit.name, rotations, orbit.linear_even * c, tuple(v * c for v in orbit.odd_linear), 1)
    return OrbitModel(orbit.name, rotations, orbit.linear_total * c, (), 1)
