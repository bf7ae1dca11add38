"""Worked examples: ellipsoids, lens spaces and the CROSS reference table.

Every generator returns a ``(PrequantSpec, OrbitDataset)`` pair ready for the
census.  Table rows keep their symbolic entries (``"m(m+1)"`` and so on) so the
table prints exactly; :meth:`CrossRow.evaluate` turns them into integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .census import OrbitDataset
from .errors import CzcInputError, NoProfile, RationalRatio, UnknownName, WeightNotCoprime
from .exact import ExactReal, parse_exact
from .homology import PrequantSpec
from .index import OrbitModel

__all__ = [
    "CrossRow",
    "ellipsoid",
    "lens",
    "cross_table",
    "cross_spec",
    "sphere_spec",
    "cosphere_sphere_spec",
]


def _axes(axes: Sequence) -> tuple[ExactReal, ...]:
    out = []
    for a in axes:
        if isinstance(a, str):
            a = parse_exact(a)
        elif not isinstance(a, ExactReal):
            a = ExactReal(a)
        if a.sign() <= 0:
            raise CzcInputError(f"axis {a} must be positive")
        out.append(a)
    if len(out) < 1:
        raise CzcInputError("need at least one axis")
    return tuple(out)


def sphere_spec(n: int) -> PrequantSpec:
    """``S^{2n+1}`` over ``CP^n``: one class in each even degree, ``c_B = n + 1``."""
    return PrequantSpec(n, n + 1, "positive", tuple(1 - i % 2 for i in range(2 * n + 1)), True)


def ellipsoid(axes: Sequence) -> tuple[PrequantSpec, OrbitDataset]:
    """Irrational ellipsoid ``E(a_0, ..., a_n)`` and its ``n + 1`` simple orbits.

    Orbit ``j`` rotates the other planes by ``a_j / a_i``.
    """
    a = _axes(axes)
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            ratio = a[j] / a[i]
            if ratio.is_rational:
                raise RationalRatio(i, j, ratio)
    n = len(a) - 1
    orbits = tuple(
        OrbitModel(f"g{j}", tuple(a[j] / a[i] for i in range(len(a)) if i != j), 2, (), 1)
        for j in range(len(a))
    )
    return sphere_spec(n), OrbitDataset(n, orbits)


def lens(p: int, weights: Sequence[int], axes: Sequence) -> tuple[PrequantSpec, OrbitDataset]:
    """Lens space ``L_p(weights)`` carrying the quotient of the ellipsoid flow.

    Each downstairs orbit closes after ``1/p`` of its lift, so only iterates
    divisible by ``p`` are contractible and the ``p``-th iterate is the lifted
    ellipsoid orbit.  The model stores rotations ``(theta_1 + 1)/p`` and
    ``theta_m/p`` with no linear term, which collapses back to the ellipsoid
    orbit exactly.
    """
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise CzcInputError(f"p must be a positive integer, got {p!r}")
    a = _axes(axes)
    weights = list(weights)
    if len(weights) != len(a):
        raise CzcInputError(f"need {len(a)} weights, got {len(weights)}")
    for w in weights:
        if isinstance(w, bool) or not isinstance(w, int):
            raise CzcInputError(f"weights must be integers, got {w!r}")
        if gcd(w, p) != 1:
            raise WeightNotCoprime(w, p)
    spec, data = ellipsoid(a)
    if p == 1:
        return spec, data
    orbits = []
    for o in data.orbits:
        rots = list(o.rotations)
        rots[0] = rots[0] + 1
        orbits.append(OrbitModel(o.name, tuple(r / p for r in rots), 0, (), p))
    return spec, OrbitDataset(data.n, tuple(orbits))


@dataclass(frozen=True)
class CrossRow:
    """One row of the CROSS table; ``r_B`` and ``c_B`` may be expressions in ``n`` or ``m``."""

    name: str
    r_B: str
    c_B: str

    @property
    def parameter(self) -> str | None:
        for v in ("n", "m"):
            if v in self.r_B or v in self.c_B:
                return v
        return None

    def evaluate(self, value: int | None = None) -> tuple[int, int]:
        var = self.parameter
        if var is not None and value is None:
            raise CzcInputError(f"row {self.name!r} needs a value for {var}")
        return _eval(self.r_B, var, value), _eval(self.c_B, var, value)

    def to_json(self) -> dict:
        return {"name": self.name, "r_B": self.r_B, "c_B": self.c_B}


def _eval(expr: str, var: str | None, value: int | None) -> int:
    # expressions are sums/products like "2m(m+1)"; insert the implicit products
    if var is not None:
        expr = re.sub(rf"(\d){var}", rf"\1*{var}", expr)
        expr = re.sub(rf"{var}\(", f"{var}*(", expr)
        expr = re.sub(r"(\d)\(", r"\1*(", expr)
        expr = expr.replace(var, f"({value})")
    if not re.fullmatch(r"[\d()+\-* ]+", expr):
        raise CzcInputError(f"cannot evaluate {expr!r}")
    return int(eval(expr, {"__builtins__": {}}, {}))  # noqa: S307, digits and + - * only


_TABLE = (
    CrossRow("S^{2n+1}", "n+1", "n+1"),
    CrossRow("S*S^2 or S*RP^2", "2", "2"),
    CrossRow("S*S^m or S*RP^m, m>2 even", "m", "m-1"),
    CrossRow("S*S^m or S*RP^m, m odd", "m+1", "m-1"),
    CrossRow("S*CP^m", "m(m+1)", "m"),
    CrossRow("S*HP^m", "2m(m+1)", "2m+1"),
    CrossRow("S*CaP^2", "24", "11"),
)


def cross_table() -> list[CrossRow]:
    return list(_TABLE)


def cosphere_sphere_spec(m: int) -> PrequantSpec:
    """``S*S^m`` over the oriented 2-plane Grassmannian ``G_2^+(R^{m+1})``.

    One class in each even degree ``0 .. 2(m-1)``, plus one more in the middle
    degree when ``m`` is odd.  This is standard Betti data for the
    Grassmannian, checked here only against the table's ``r_B`` and ``c_B``.
    """
    if m < 2:
        raise CzcInputError(f"S*S^m needs m >= 2, got {m}")
    n = m - 1
    betti = [1 - i % 2 for i in range(2 * n + 1)]
    if m % 2:
        betti[n] += 1
    return PrequantSpec(n, m - 1 if m > 2 else 2, "positive", tuple(betti), True)


_SPHERE = re.compile(r"S\^\{?(\d+)\}?")
_COSPHERE = re.compile(r"S\*S\^\{?(\d+)\}?")
_NO_PROFILE = re.compile(r"S\*(RP|CP|HP|CaP)\^\{?(\d+)\}?")


def cross_spec(name: str, value: int | None = None) -> PrequantSpec:
    """Full spec for a table entry, when a Betti profile is shipped.

    ``name`` is either a row name (with ``value`` for its parameter) or a
    concrete manifold such as ``"S^7"`` or ``"S*S^5"``.  Profiles exist for
    spheres and for ``S*S^m``; other rows raise :class:`NoProfile`.
    """
    if not isinstance(name, str):
        raise UnknownName(f"unknown catalog name {name!r}")
    rows = {r.name: r for r in _TABLE}
    if name in rows:
        row = rows[name]
        if name == "S^{2n+1}":
            if value is None:
                raise CzcInputError("row S^{2n+1} needs a value for n")
            spec = sphere_spec(value)
        elif name.startswith("S*S^"):
            if name == "S*S^2 or S*RP^2":
                value = 2
            if value is None:
                raise CzcInputError(f"row {name!r} needs a value for m")
            if name.endswith("even") and (value % 2 or value <= 2):
                raise CzcInputError(f"row {name!r} needs an even m > 2, got {value}")
            if name.endswith("odd") and value % 2 == 0:
                raise CzcInputError(f"row {name!r} needs an odd m, got {value}")
            spec = cosphere_sphere_spec(value)
        else:
            raise NoProfile(f"no Betti profile is shipped for {name!r}; supply one explicitly")
        if (spec.r_B, spec.c_B) != row.evaluate(value if row.parameter else None):
            raise CzcInputError(f"profile for {name!r} disagrees with the table")  # pragma: no cover
        return spec
    m = _SPHERE.fullmatch(name)
    if m:
        k = int(m.group(1))
        if k % 2 == 0:
            raise UnknownName(f"unknown catalog name {name!r}")
        return sphere_spec((k - 1) // 2)
    m = _COSPHERE.fullmatch(name)
    if m:
        return cosphere_sphere_spec(int(m.group(1)))
    if _NO_PROFILE.fullmatch(name):
        raise NoProfile(f"no Betti profile is shipped for {name!r}; supply one explicitly")
    raise UnknownName(f"unknown catalog name {name!r}")
