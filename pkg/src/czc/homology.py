"""Positive equivariant symplectic homology of prequantization bundles.

Only dimensions are tracked.  For a positive monotone base with minimal Chern
number ``c_B`` the rank in degree ``k`` is ``sum_{m>=1} b_{k - 2m c_B + n}(B)``:
one shifted copy of the base homology per fiber multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CzcInputError, HypothesisError, InternalInconsistency, SignMismatch
from .exact import ExactReal

__all__ = [
    "PrequantSpec",
    "betti_M",
    "k_min",
    "mean_euler",
    "truncated_betti_sum",
    "betti_M_array",
    "lemma_sum_identity",
    "classic_sums",
    "LemmaSum",
    "ClassicSums",
]


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CzcInputError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class PrequantSpec:
    n: int
    c_B: int
    sign: str
    betti: tuple[int, ...]
    lacunary_base: bool = True

    def __post_init__(self):
        object.__setattr__(self, "betti", tuple(_int(b, "betti entry") for b in self.betti))
        n = _int(self.n, "n")
        _int(self.c_B, "c_B")
        if n < 0:
            raise CzcInputError("n must be non-negative")
        if self.c_B < 1:
            raise CzcInputError("c_B must be positive")
        if self.sign not in ("positive", "negative"):
            raise CzcInputError(f"sign must be 'positive' or 'negative', got {self.sign!r}")
        if not isinstance(self.lacunary_base, bool):
            raise CzcInputError("lacunary_base must be a boolean")
        b = self.betti
        if len(b) != 2 * n + 1:
            raise CzcInputError(f"betti must have 2n+1 = {2 * n + 1} entries, got {len(b)}")
        if any(x < 0 for x in b):
            raise CzcInputError("betti numbers must be non-negative")
        if b[0] < 1:
            raise CzcInputError("betti[0] must be at least 1")
        for k in range(2 * n + 1):
            if b[k] != b[2 * n - k]:
                raise CzcInputError(f"Poincare duality fails: betti[{k}]={b[k]} but betti[{2 * n - k}]={b[2 * n - k]}")
        odd = [k for k in range(1, 2 * n + 1, 2) if b[k]]
        if self.lacunary_base and odd:
            raise CzcInputError(f"lacunary_base is set but betti[{odd[0]}]={b[odd[0]]} is nonzero")

    @property
    def r_B(self) -> int:
        return sum(self.betti)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "c_B": self.c_B,
            "sign": self.sign,
            "betti": list(self.betti),
            "lacunary_base": self.lacunary_base,
        }

    @classmethod
    def from_json(cls, obj) -> "PrequantSpec":
        if not isinstance(obj, dict):
            raise CzcInputError("spec must be a JSON object")
        missing = {"n", "c_B", "sign", "betti"} - set(obj)
        if missing:
            raise CzcInputError(f"spec is missing fields {sorted(missing)}")
        if not isinstance(obj["betti"], list):
            raise CzcInputError("spec field 'betti' must be a list")
        lac = obj.get("lacunary_base")
        if lac is None:
            lac = all(v == 0 for v in obj["betti"][1::2])
        return cls(obj["n"], obj["c_B"], obj["sign"], tuple(obj["betti"]), lac)


def betti_M(spec: PrequantSpec, k: int) -> int:
    n, step, b = spec.n, 2 * spec.c_B, spec.betti
    total = 0
    if spec.sign == "positive":
        idx = k + n - step
        if idx > 2 * n:
            idx -= ((idx - 2 * n + step - 1) // step) * step
        while idx >= 0:
            total += b[idx]
            idx -= step
    else:
        idx = k - n + step
        if idx < 0:
            idx += ((-idx + step - 1) // step) * step
        while idx <= 2 * n:
            total += b[idx]
            idx += step
    return total


def _need_positive(spec: PrequantSpec) -> None:
    if spec.sign != "positive":
        raise SignMismatch("operation needs a positive monotone base")


def _need_lacunary(spec: PrequantSpec) -> None:
    if not spec.lacunary_base:
        raise HypothesisError("operation needs a lacunary base (H_odd(B) = 0)")


def k_min(spec: PrequantSpec) -> int:
    """Lowest degree with nonzero rank, ``2 c_B - n``, verified by scan."""
    _need_positive(spec)
    value = 2 * spec.c_B - spec.n
    first = next((k for k in range(value - 2 * spec.n - 1, value + 1) if betti_M(spec, k)), None)
    if first != value:
        raise InternalInconsistency(f"k_min formula gives {value} but the first nonzero degree is {first}")
    return value


def mean_euler(spec: PrequantSpec) -> ExactReal:
    """``(-1)^n r_B / (2 c_B)``, checked against one period of the rank sequence."""
    _need_positive(spec)
    _need_lacunary(spec)
    step = 2 * spec.c_B
    value = Fraction((-1) ** spec.n * spec.r_B, step)
    start = spec.n + 1
    avg = Fraction(sum((-1) ** k * betti_M(spec, k) for k in range(start, start + step)), step)
    if avg != value:
        raise InternalInconsistency(f"mean Euler characteristic {value} disagrees with period average {avg}")
    return ExactReal(value)


def betti_M_array(spec: PrequantSpec, lo: int, hi: int) -> np.ndarray:
    """``betti_M(spec, k)`` for ``k = lo..hi`` as an int64 array."""
    out = np.zeros(max(0, hi - lo + 1), dtype=np.int64)
    if out.size == 0:
        return out
    n, step = spec.n, 2 * spec.c_B
    for idx, b in enumerate(spec.betti):
        if not b:
            continue
        if spec.sign == "positive":
            first = idx - n + step
        else:
            # degrees idx + n - 2m c_B, m >= 1, run downwards from top
            top = idx + n - step
            if top > hi:
                top -= ((top - hi + step - 1) // step) * step
            if top < lo:
                continue
            start = lo + ((top - lo) % step)
            out[start - lo:top - lo + 1:step] += b
            continue
        if first < lo:
            first += ((lo - first + step - 1) // step) * step
        if first <= hi:
            out[first - lo::step] += b
    return out


def _terms_in(first: int, step: int, lo: int, hi: int, up: bool) -> int:
    # number of terms first, first +/- step, ... lying in [lo, hi]
    if up:
        if first > hi:
            return 0
        start = max(first, first + -(-(lo - first) // step) * step)
        return 0 if start > hi else (hi - start) // step + 1
    if first < lo:
        return 0
    start = min(first, first - -(-(first - hi) // step) * step)
    return 0 if start < lo else (start - lo) // step + 1


def truncated_betti_sum(spec: PrequantSpec, lo: int, hi: int) -> int:
    """``sum_{k=lo}^{hi} betti_M(spec, k)`` without materializing the range."""
    if lo > hi:
        raise CzcInputError(f"empty range [{lo}, {hi}]")
    n, step = spec.n, 2 * spec.c_B
    total = 0
    for idx, b in enumerate(spec.betti):
        if b:
            if spec.sign == "positive":
                total += b * _terms_in(idx - n + step, step, lo, hi, True)
            else:
                total += b * _terms_in(idx + n - step, step, lo, hi, False)
    return total


@dataclass(frozen=True)
class LemmaSum:
    lhs: int
    rhs: int
    holds: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.holds))


def _check_s(spec: PrequantSpec, s: int) -> None:
    _need_positive(spec)
    _need_lacunary(spec)
    s = _int(s, "s")
    if s < 1 or 2 * s * spec.c_B <= 2 * spec.n:
        raise HypothesisError(f"need s >= 1 with 2*s*c_B > 2n; got s={s}")


def lemma_sum_identity(spec: PrequantSpec, s: int) -> LemmaSum:
    """Twice the rank sum up to ``d = 2 s c_B`` versus its closed form."""
    _check_s(spec, s)
    n, c, b = spec.n, spec.c_B, spec.betti
    lhs = 2 * truncated_betti_sum(spec, k_min(spec), 2 * s * c)
    tail = 0
    for m in range(s + 1, 2 * s):
        idx = n + 2 * (s - m) * c
        if 0 <= idx <= 2 * n:
            tail += b[idx]
    rhs = (2 * s - 1) * spec.r_B + b[n] + 2 * tail
    return LemmaSum(lhs, rhs, lhs == rhs)


@dataclass(frozen=True)
class ClassicSums:
    d: int
    sum_to_d: int
    sum_to_d_plus_1: int
    b0: int
    predicted: Fraction
    matches: bool

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "sum_to_d": self.sum_to_d,
            "sum_to_d_plus_1": self.sum_to_d_plus_1,
            "b0": self.b0,
            "predicted": str(self.predicted),
            "matches": self.matches,
        }


def classic_sums(spec: PrequantSpec, s: int) -> ClassicSums:
    """Rank sums up to ``d`` and ``d + 1`` against their predicted closed forms.

    n odd:  sum to d     = s r_B + b0 - r_B/2
    n even: sum to d + 1 = s r_B + b0 - (r_B - b_n(B))/2
    """
    _check_s(spec, s)
    d = 2 * s * spec.c_B
    lo = k_min(spec)
    to_d = truncated_betti_sum(spec, lo, d)
    to_d1 = to_d + betti_M(spec, d + 1)
    b0 = betti_M(spec, 0)
    r = spec.r_B
    if spec.n % 2:
        predicted = s * r + b0 - Fraction(r, 2)
        actual = to_d
    else:
        predicted = s * r + b0 - Fraction(r - spec.betti[spec.n], 2)
        actual = to_d1
    return ClassicSums(d, to_d, to_d1, b0, predicted, predicted == actual)
