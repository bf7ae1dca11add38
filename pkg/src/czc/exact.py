"""Exact real numbers: rationals and sums of rational multiples of square roots.

Every value is an element of a multi-quadratic field Q(sqrt m1, sqrt m2, ...),
stored as a map ``radicand -> Fraction`` with square-free radicands (``1`` is the
rational part).  Since square roots of distinct square-free integers are linearly
independent over Q, that map is a canonical form: equal values have identical
terms.

The two shapes that appear as input data get their own constructors and JSON
encodings:

* ``rat(num, den)``             -> ``{"type": "rat", "num": 7, "den": 5}``
* ``surd(a, b, root, den)``     -> ``(a + b*sqrt(root)) / den``

Anything else (for instance a mean index ``2 + sqrt2 + 2/sqrt3``) is encoded as
``{"type": "qsum", "terms": [{"root": r, "num": p, "den": q}, ...]}``.

No floating point is used to decide anything: signs come from a recursive
norm argument and floors from integer square-root bracketing.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import gcd, isqrt
from numbers import Rational
from typing import Iterable, Mapping, Union

from .errors import CzcInputError, DegenerateIterate

Number = Union[int, Fraction, "ExactReal"]

__all__ = [
    "ExactReal",
    "rat",
    "surd",
    "sqrt",
    "floor_mul",
    "is_integer_multiple",
    "frac_gap",
    "parse_exact",
    "to_json",
    "from_json",
]


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation by trial division; radicands here are small."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def _split_square(n: int) -> tuple[int, int]:
    """Return (s, m) with n == s*s*m and m square-free."""
    s, m = 1, 1
    for p, e in _factor(n):
        s *= p ** (e // 2)
        if e % 2:
            m *= p
    return s, m


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in _factor(n))


def _largest_prime(terms: Mapping[int, Fraction]) -> int:
    return max(_factor(m)[-1][0] for m in terms if m != 1)


def _mul_terms(x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            g = gcd(m1, m2)
            m = (m1 // g) * (m2 // g)
            out[m] = out.get(m, Fraction(0)) + c1 * c2 * g
    return {m: c for m, c in out.items() if c}


def _sign_terms(terms: Mapping[int, Fraction]) -> int:
    if not terms:
        return 0
    irr = [m for m in terms if m != 1]
    if not irr:
        c = terms[1]
        return (c > 0) - (c < 0)
    if len(irr) == 1:
        r = irr[0]
        a = terms.get(1, Fraction(0))
        b = terms[r]
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 r (never equal, r square-free)
        d = a * a - b * b * r
        return (1 if d > 0 else -1) * (1 if a > 0 else -1)
    p = _largest_prime(terms)
    A = {m: c for m, c in terms.items() if m % p}
    B = {m // p: c for m, c in terms.items() if m % p == 0}
    sa, sb = _sign_terms(A), _sign_terms(B)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    A2 = _mul_terms(A, A)
    for m, c in _mul_terms(B, B).items():
        A2[m] = A2.get(m, Fraction(0)) - p * c
    return sa * _sign_terms({m: c for m, c in A2.items() if c})


def _inv_terms(terms: Mapping[int, Fraction]) -> dict[int, Fraction]:
    if not terms:
        raise ZeroDivisionError("division by exact zero")
    if all(m == 1 for m in terms):
        return {1: 1 / terms[1]}
    p = _largest_prime(terms)
    A = {m: c for m, c in terms.items() if m % p}
    B = {m // p: c for m, c in terms.items() if m % p == 0}
    norm = _mul_terms(A, A)
    for m, c in _mul_terms(B, B).items():
        norm[m] = norm.get(m, Fraction(0)) - p * c
    norm = {m: c for m, c in norm.items() if c}
    conj = dict(A)
    for m, c in _mul_terms(B, {p: Fraction(1)}).items():
        conj[m] = conj.get(m, Fraction(0)) - c
    return _mul_terms({m: c for m, c in conj.items() if c}, _inv_terms(norm))


def _as_terms(x: Number) -> dict[int, Fraction]:
    if isinstance(x, ExactReal):
        return dict(x._terms)
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        q = Fraction(x)
        return {1: q} if q else {}
    raise TypeError(f"cannot use {type(x).__name__} as an exact real")


@total_ordering
class ExactReal:
    """Element of a multi-quadratic number field, immutable and hashable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, value: Number | Mapping[int, Fraction] = 0):
        if isinstance(value, Mapping):
            terms = {}
            for m, c in value.items():
                m = int(m)
                if m < 1 or not is_squarefree(m):
                    raise CzcInputError(f"radicand {m} is not a positive square-free integer")
                c = Fraction(c)
                if c:
                    terms[m] = terms.get(m, Fraction(0)) + c
            terms = {m: c for m, c in terms.items() if c}
        else:
            terms = _as_terms(value)
        self._terms: tuple[tuple[int, Fraction], ...] = tuple(sorted(terms.items()))
        self._hash = None

    @classmethod
    def _raw(cls, terms: Mapping[int, Fraction]) -> "ExactReal":
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((m, c) for m, c in terms.items() if c))
        obj._hash = None
        return obj

    # -- structure -----------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def radicands(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self._terms if m != 1)

    @property
    def is_rational(self) -> bool:
        return not self.radicands

    @property
    def kind(self) -> str:
        n = len(self.radicands)
        return "rat" if n == 0 else "surd" if n == 1 else "qsum"

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return dict(self._terms).get(1, Fraction(0))

    def rat_fields(self) -> tuple[int, int]:
        q = self.as_fraction()
        return q.numerator, q.denominator

    def surd_fields(self) -> tuple[int, int, int, int]:
        """Canonical ``(a, b, root, den)`` with ``gcd(a, b, den) == 1``."""
        if self.kind != "surd":
            raise ValueError(f"{self} is not a single quadratic surd")
        t = dict(self._terms)
        root = self.radicands[0]
        a0, b0 = t.get(1, Fraction(0)), t[root]
        den = a0.denominator * b0.denominator // gcd(a0.denominator, b0.denominator)
        return int(a0 * den), int(b0 * den), root, den

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: Number) -> "ExactReal":
        try:
            o = _as_terms(other)
        except TypeError:
            return NotImplemented
        t = dict(self._terms)
        for m, c in o.items():
            t[m] = t.get(m, Fraction(0)) + c
        return ExactReal._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "ExactReal":
        return ExactReal._raw({m: -c for m, c in self._terms})

    def __pos__(self) -> "ExactReal":
        return self

    def __sub__(self, other: Number) -> "ExactReal":
        try:
            return self + (-ExactReal(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other: Number) -> "ExactReal":
        return (-self) + other

    def __mul__(self, other: Number) -> "ExactReal":
        try:
            o = _as_terms(other)
        except TypeError:
            return NotImplemented
        return ExactReal._raw(_mul_terms(dict(self._terms), o))

    __rmul__ = __mul__

    def inverse(self) -> "ExactReal":
        return ExactReal._raw(_inv_terms(dict(self._terms)))

    def __truediv__(self, other: Number) -> "ExactReal":
        try:
            o = ExactReal(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> "ExactReal":
        return ExactReal(other) * self.inverse()

    def __abs__(self) -> "ExactReal":
        return -self if self.sign() < 0 else self

    # -- order -----------------------------------------------------------
    def sign(self) -> int:
        return _sign_terms(dict(self._terms))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExactReal):
            return self._terms == other._terms
        try:
            return self._terms == ExactReal(other)._terms  # type: ignore[arg-type]
        except TypeError:
            return NotImplemented

    def __lt__(self, other: Number) -> bool:
        try:
            return (self - other).sign() < 0
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational:
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- approximation (display only) -------------------------------------
    def bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Rigorous rational enclosure ``lo <= self <= hi`` of width ~2**-bits."""
        lo = hi = Fraction(0)
        scale = 1 << bits
        for m, c in self._terms:
            if m == 1:
                lo += c
                hi += c
                continue
            s = isqrt(m * scale * scale)
            a, b = Fraction(s, scale), Fraction(s + 1, scale)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        return lo, hi

    def __float__(self) -> float:
        lo, hi = self.bounds(80)
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        k = self.kind
        if k == "rat":
            n, d = self.rat_fields()
            return f"rat({n}, {d})"
        if k == "surd":
            return "surd(%d, %d, %d, %d)" % self.surd_fields()
        return f"ExactReal({dict(self._terms)!r})"

    def __str__(self) -> str:
        k = self.kind
        if k == "rat":
            return str(self.as_fraction())
        if k == "surd":
            a, b, r, d = self.surd_fields()
            body = f"({a}{b:+d}√{r})"
            return body if d == 1 else f"{body}/{d}"
        parts = []
        for m, c in self._terms:
            parts.append(str(c) if m == 1 else f"{c}√{m}")
        return "(" + " + ".join(parts) + ")"


def rat(num: int, den: int = 1) -> ExactReal:
    if den == 0:
        raise CzcInputError("zero denominator")
    return ExactReal(Fraction(num, den))


def surd(a: int, b: int, root: int, den: int = 1) -> ExactReal:
    """``(a + b*sqrt(root)) / den``; ``root`` must be square-free and >= 2."""
    if den == 0:
        raise CzcInputError("zero denominator")
    if root < 2 or not is_squarefree(root):
        raise CzcInputError(f"root {root} must be a square-free integer >= 2")
    return ExactReal({1: Fraction(a, den), root: Fraction(b, den)})


def sqrt(q: int | Fraction) -> ExactReal:
    """Exact square root of a non-negative rational."""
    q = Fraction(q)
    if q < 0:
        raise CzcInputError(f"square root of negative number {q}")
    if q == 0:
        return ExactReal(0)
    s, m = _split_square(q.numerator * q.denominator)
    return ExactReal({m: Fraction(s, q.denominator)})


def _floor_terms(x: ExactReal) -> int:
    k = x.kind
    if k == "rat":
        q = x.as_fraction()
        return q.numerator // q.denominator
    if k == "surd":
        a, b, r, den = x.surd_fields()
        s = isqrt(b * b * r)
        fl = s if b > 0 else -s - 1
        return (a + fl) // den
    bits = 64
    while True:
        lo, hi = x.bounds(bits)
        f = lo.numerator // lo.denominator
        if f == hi.numerator // hi.denominator:
            return f
        bits *= 2


def floor_mul(x: Number, k: int) -> int:
    """Exact ``floor(k * x)`` for any integer ``k``."""
    x = x if isinstance(x, ExactReal) else ExactReal(x)
    if x.kind == "surd":
        a, b, r, den = x.surd_fields()
        t = k * b
        s = isqrt(t * t * r)
        if t > 0:
            fl = s
        elif t < 0:
            fl = -s - 1
        else:
            fl = 0
        return (k * a + fl) // den
    return _floor_terms(x * k)


def is_integer_multiple(x: Number, k: int) -> bool:
    x = x if isinstance(x, ExactReal) else ExactReal(x)
    if not x.is_rational:
        return False
    return (k * x.as_fraction()).denominator == 1


def frac_gap(x: Number, k: int) -> tuple[ExactReal, ExactReal]:
    """Distances of ``k*x`` down to its floor and up to its ceiling."""
    x = x if isinstance(x, ExactReal) else ExactReal(x)
    if is_integer_multiple(x, k):
        raise DegenerateIterate(x, k)
    f = floor_mul(x, k)
    kx = x * k
    return kx - f, (f + 1) - kx


# -- JSON ---------------------------------------------------------------------

def to_json(x: ExactReal) -> dict:
    k = x.kind
    if k == "rat":
        n, d = x.rat_fields()
        return {"type": "rat", "num": n, "den": d}
    if k == "surd":
        a, b, r, d = x.surd_fields()
        return {"type": "surd", "a": a, "b": b, "root": r, "den": d}
    return {
        "type": "qsum",
        "terms": [{"root": m, "num": c.numerator, "den": c.denominator} for m, c in x._terms],
    }


def _need_int(obj: Mapping, key: str) -> int:
    if key not in obj:
        raise CzcInputError(f"exact real is missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise CzcInputError(f"field {key!r} must be an integer, got {v!r}")
    return v


def from_json(obj) -> ExactReal:
    """Decode an exact real; non-canonical input is normalised."""
    if isinstance(obj, bool):
        raise CzcInputError(f"not an exact real: {obj!r}")
    if isinstance(obj, int):
        return ExactReal(obj)
    if isinstance(obj, str):
        return parse_exact(obj)
    if not isinstance(obj, Mapping):
        raise CzcInputError(f"not an exact real: {obj!r}")
    t = obj.get("type")
    if t == "rat":
        return rat(_need_int(obj, "num"), _need_int(obj, "den"))
    if t == "surd":
        return surd(_need_int(obj, "a"), _need_int(obj, "b"), _need_int(obj, "root"), _need_int(obj, "den"))
    if t == "qsum":
        terms: dict[int, Fraction] = {}
        for item in obj.get("terms", []):
            root = _need_int(item, "root")
            if root < 1 or not is_squarefree(root):
                raise CzcInputError(f"root {root} must be a positive square-free integer")
            den = _need_int(item, "den")
            if den == 0:
                raise CzcInputError("zero denominator")
            terms[root] = terms.get(root, Fraction(0)) + Fraction(_need_int(item, "num"), den)
        return ExactReal(terms)
    raise CzcInputError(f"unknown exact real type {t!r}")


# -- text parser ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt|√)|(.))")


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, sq, ch = m.groups()
        if num is not None:
            out.append(num)
        elif sq is not None:
            out.append("sqrt")
        elif ch.strip():
            out.append(ch)
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise CzcInputError(f"unexpected end of expression in {self.text!r}")
        self.i += 1
        return tok

    def expr(self) -> ExactReal:
        val = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> ExactReal:
        val = self.unary()
        while True:
            tok = self.peek()
            if tok in ("*", "/"):
                self.take()
                rhs = self.unary()
                val = val * rhs if tok == "*" else val / rhs
            elif tok == "sqrt" or tok == "(":
                val = val * self.unary()  # implicit product: 2sqrt3
            else:
                return val

    def unary(self) -> ExactReal:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> ExactReal:
        tok = self.take()
        if tok.isdigit():
            return ExactReal(int(tok))
        if tok == "(":
            val = self.expr()
            if self.take() != ")":
                raise CzcInputError(f"unbalanced parentheses in {self.text!r}")
            return val
        if tok == "sqrt":
            inner = self.atom()
            if not inner.is_rational:
                raise CzcInputError(f"nested radicals are not supported: {self.text!r}")
            return sqrt(inner.as_fraction())
        raise CzcInputError(f"unexpected token {tok!r} in {self.text!r}")


def parse_exact(text: str) -> ExactReal:
    """Parse expressions such as ``"sqrt2"``, ``"1/sqrt(2)"``, ``"(1+sqrt5)/2"``."""
    p = _Parser(text)
    if not p.toks:
        raise CzcInputError("empty exact-real expression")
    val = p.expr()
    if p.peek() is not None:
        raise CzcInputError(f"trailing input {p.peek()!r} in {text!r}")
    return val


def exact_list(values: Iterable) -> list[ExactReal]:
    return [v if isinstance(v, ExactReal) else from_json(v) for v in values]
