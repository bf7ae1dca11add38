"""Common index jump: search for and verify iterate vectors ``(d, k_1..k_r)``.

A plus certificate satisfies, for every orbit ``i``:

* (i)   ``|k_i*mu_hat_i - d| < eta`` (with ``mu = mu_hat = d`` for hyperbolic orbits),
* (ii)  ``mu(k_i + l) = d + mu(l)`` for ``1 <= |l| <= l0``,

and a minus certificate additionally has defects ``mu(k_i) - d`` opposite to
the plus ones, clause (iii).  ``N`` must divide ``d`` and every ``k_i``.

The verifier only calls :func:`czc.index.cz_index`.  The solver uses a float
prefilter to propose candidates, the integer kernels to test (ii), and finally
runs the verifier on what it returns.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import kernels
from .errors import CzcInputError, Exhausted, InternalInconsistency, NonPositiveMeanIndex, NotDivisible
from .exact import ExactReal, floor_mul, parse_exact
from .homology import PrequantSpec
from .index import OrbitModel, cz_index, mean_index

__all__ = [
    "JumpRequest",
    "JumpCertificate",
    "Violation",
    "VerificationReport",
    "verify_jump",
    "find_jump",
    "lemma52_check",
    "LemmaCheck",
    "thread_count",
]

_FLOAT_SAFE = 1 << 50


@dataclass(frozen=True)
class JumpCertificate:
    side: str
    d: int
    k: tuple[int, ...]

    def __post_init__(self):
        if self.side not in ("plus", "minus"):
            raise CzcInputError(f"certificate side must be 'plus' or 'minus', got {self.side!r}")
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))

    def to_json(self) -> dict:
        return {"side": self.side, "d": self.d, "k": list(self.k)}

    @classmethod
    def from_json(cls, obj) -> "JumpCertificate":
        try:
            return cls(obj["side"], int(obj["d"]), tuple(obj["k"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CzcInputError(f"malformed certificate: {exc}") from None


@dataclass(frozen=True)
class JumpRequest:
    orbits: tuple[OrbitModel, ...]
    eta: ExactReal
    ell0: int
    N: int
    sides: str = "both"
    search_bound: int = 10**6

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        eta = self.eta
        if not isinstance(eta, ExactReal):
            eta = parse_exact(eta) if isinstance(eta, str) else ExactReal(eta)
            object.__setattr__(self, "eta", eta)
        if eta.sign() <= 0:
            raise CzcInputError("eta must be positive")
        for name, v in (("ell0", self.ell0), ("N", self.N), ("search_bound", self.search_bound)):
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise CzcInputError(f"{name} must be a positive integer, got {v!r}")
        if self.sides not in ("plus", "minus", "both"):
            raise CzcInputError(f"sides must be plus, minus or both, got {self.sides!r}")
        if not self.orbits:
            raise CzcInputError("jump request needs at least one orbit")
        for o in self.orbits:
            mh = mean_index(o)
            if mh.sign() <= 0:
                raise NonPositiveMeanIndex(o.name, mh)


@dataclass(frozen=True)
class Violation:
    clause: str
    orbit: int | None
    ell: int | None
    detail: str

    def to_json(self) -> dict:
        return {"clause": self.clause, "orbit": self.orbit, "ell": self.ell, "detail": self.detail}


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)
    defects_plus: list[int] | None = None
    defects_minus: list[int] | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
            "defects_plus": self.defects_plus,
            "defects_minus": self.defects_minus,
        }


def _check_one(orbits, cert: JumpCertificate, eta: ExactReal, ell0: int, N, out: list[Violation]) -> list[int] | None:
    tag = cert.side
    if len(cert.k) != len(orbits):
        out.append(Violation(f"shape-{tag}", None, None, f"{len(cert.k)} iterates for {len(orbits)} orbits"))
        return None
    if cert.d < 1 or any(k < 1 for k in cert.k):
        out.append(Violation(f"shape-{tag}", None, None, "d and all k_i must be positive"))
        return None
    if N is not None:
        if cert.d % N:
            out.append(Violation(f"N-{tag}", None, None, f"N={N} does not divide d={cert.d}"))
        for i, k in enumerate(cert.k):
            if k % N:
                out.append(Violation(f"N-{tag}", i, None, f"N={N} does not divide k={k}"))
    defects = []
    for i, (o, k) in enumerate(zip(orbits, cert.k)):
        mu_hat = mean_index(o, k)
        mu = cz_index(o, k)
        defects.append(mu - cert.d)
        if not abs(mu_hat - cert.d) < eta:
            out.append(Violation(f"i-{tag}", i, None, f"|{mu_hat} - {cert.d}| >= eta"))
        if o.is_hyperbolic and not (mu == cert.d and mu_hat == cert.d):
            out.append(Violation(f"i-{tag}", i, None, f"hyperbolic orbit needs mu = mu_hat = d, got mu={mu}"))
        for ell in range(1, ell0 + 1):
            for sgn in (1, -1):
                kk = k + sgn * ell
                if kk == 0:
                    out.append(Violation(f"ii-{tag}", i, sgn * ell, f"iterate k+l = 0 (k={k} <= l0)"))
                    continue
                lhs = cz_index(o, kk)
                rhs = cert.d + cz_index(o, sgn * ell)
                if lhs != rhs:
                    out.append(Violation(f"ii-{tag}", i, sgn * ell, f"mu(k+l)={lhs} but d+mu(l)={rhs}"))
    return defects


def verify_jump(orbits: Sequence[OrbitModel], cert_plus: JumpCertificate | None,
                cert_minus: JumpCertificate | None, eta, ell0: int, n_ambient: int | None = None,
                N: int | None = None) -> VerificationReport:
    """Check clauses (i)-(iii) by direct index evaluation; lists every violation."""
    eta = eta if isinstance(eta, ExactReal) else (parse_exact(eta) if isinstance(eta, str) else ExactReal(eta))
    if n_ambient is not None:
        for o in orbits:
            if o.rank > n_ambient:
                raise CzcInputError(f"orbit {o.name!r} needs {o.rank} symplectic planes but n={n_ambient}")
    report = VerificationReport()
    for slot, cert in (("plus", cert_plus), ("minus", cert_minus)):
        if cert is not None and cert.side != slot:
            report.violations.append(Violation(f"shape-{slot}", None, None,
                                               f"certificate labelled {cert.side!r} given as the {slot} side"))
    if cert_plus is not None:
        report.defects_plus = _check_one(orbits, cert_plus, eta, ell0, N, report.violations)
    if cert_minus is not None:
        report.defects_minus = _check_one(orbits, cert_minus, eta, ell0, N, report.violations)
    if report.defects_plus is not None and report.defects_minus is not None:
        for i, (p, m) in enumerate(zip(report.defects_plus, report.defects_minus)):
            if m != -p:
                report.violations.append(Violation("iii", i, None, f"minus defect {m} is not -({p})"))
    return report


def thread_count() -> int:
    raw = os.environ.get("CZC_THREADS", "")
    try:
        t = int(raw)
    except ValueError:
        t = os.cpu_count() or 1
    return max(1, min(t, 64))


class _Searcher:
    """Shared precomputation for one request."""

    def __init__(self, req: JumpRequest, backend: str | None = None):
        self.req = req
        self.backend = backend
        self.orbits = req.orbits
        self.mu_hat = [mean_index(o) for o in self.orbits]
        self.params = [o.kernel_params() for o in self.orbits]
        self.lin = [o.linear_total for o in self.orbits]
        self.eta = req.eta
        self.N = req.N
        self.d_max = req.N * req.search_bound

    def exact_ok(self, d: int, ks: Sequence[int], target: Sequence[int] | None) -> list[int] | None:
        """Defect vector when ``(d, ks)`` passes (i) and (ii) (and matches ``target``)."""
        if d > self.d_max or d % self.N:
            return None
        for k in ks:
            if k % self.N or k <= self.req.ell0:
                return None
        for mh, k in zip(self.mu_hat, ks):
            if not abs(mh * k - d) < self.eta:
                return None
        defects = []
        for o, p, lin, k in zip(self.orbits, self.params, self.lin, ks):
            if p is None:
                mu = cz_index(o, k)
                if any(cz_index(o, k + s * l) != d + cz_index(o, s * l)
                       for l in range(1, self.req.ell0 + 1) for s in (1, -1)):
                    return None
            else:
                if not kernels.clause_ii_ok(p, lin, k, d, self.req.ell0, backend=self.backend):
                    return None
                mu = kernels.orbit_indices(p, lin, [k], backend=self.backend)[0]
            if o.is_hyperbolic and mu != d:
                return None
            defects.append(mu - d)
        if target is not None and any(a != -b for a, b in zip(defects, target)):
            return None
        return defects

    # -- fast path: float pivot scan --------------------------------------------

    def fast_ok(self) -> bool:
        if any(p is None for p in self.params):
            return False
        if self.d_max + self.N >= _FLOAT_SAFE:
            return False
        floor_n = min([ExactReal(1)] + self.mu_hat) * self.N
        return self.eta * 2 * (1 + ExactReal(1) / (1 << 20)) < floor_n

    def scan_fast(self, target, threads: int):
        pivot = max(range(len(self.orbits)), key=lambda i: self.mu_hat[i])
        mu_f = [float(m) for m in self.mu_hat]
        eta_f = float(self.eta)
        u_stop = floor_mul((ExactReal(self.d_max) + self.eta) / (self.mu_hat[pivot] * self.N), 1) + 2
        chunk = 1 << 18

        def work(bounds):
            u0, u1 = bounds
            while u0 < u1:
                hits, u0 = kernels.pivot_scan(mu_f, pivot, self.N, eta_f, u0, u1, 256, backend=self.backend)
                for hit in hits:
                    d, ks = hit[0], hit[1:]
                    if d > self.d_max:
                        return None
                    defects = self.exact_ok(d, ks, target)
                    if defects is not None:
                        return d, tuple(ks), defects
            return None

        starts = [(u, min(u + chunk, u_stop)) for u in range(1, u_stop, chunk)]
        if threads <= 1:
            for b in starts:
                found = work(b)
                if found:
                    return found
            return None
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for w in range(0, len(starts), threads):
                for found in pool.map(work, starts[w:w + threads]):
                    if found:
                        return found
        return None

    # -- generic path: exhaustive over t ---------------------------------------

    def scan_slow(self, target):
        N, eta = self.N, self.eta
        for t in range(1, self.req.search_bound + 1):
            d = N * t
            options = []
            for mh in self.mu_hat:
                lo = floor_mul((ExactReal(d) - eta) / (mh * N), 1)
                hi = floor_mul((ExactReal(d) + eta) / (mh * N), 1) + 1
                ks = [j * N for j in range(max(lo, 1), hi + 1) if abs(mh * (j * N) - d) < eta]
                if not ks:
                    break
                options.append(ks)
            else:
                for ks in itertools.product(*options):
                    defects = self.exact_ok(d, ks, target)
                    if defects is not None:
                        return d, tuple(ks), defects
        return None

    def search(self, target, threads: int):
        if self.fast_ok():
            return self.scan_fast(target, threads)
        return self.scan_slow(target)


def find_jump(request: JumpRequest, n_ambient: int | None = None, *, threads: int | None = None,
              backend: str | None = None) -> tuple[JumpCertificate | None, JumpCertificate | None]:
    """Certificates with the least ``d`` for the requested side(s).

    With ``sides='both'`` the plus certificate is the least one passing (i)-(ii),
    and the minus certificate the least one whose defects are its negation.
    Raises :class:`Exhausted` when ``d = N*t`` runs past ``N*search_bound``.
    """
    threads = thread_count() if threads is None else max(1, threads)
    s = _Searcher(request, backend)
    plus = minus = None
    plus_defects = None
    if request.sides in ("plus", "both"):
        found = s.search(None, threads)
        if found is None:
            raise Exhausted(request.search_bound, "plus")
        plus = JumpCertificate("plus", found[0], found[1])
        plus_defects = found[2]
    if request.sides in ("minus", "both"):
        found = s.search(plus_defects, threads)
        if found is None:
            raise Exhausted(request.search_bound, "minus")
        minus = JumpCertificate("minus", found[0], found[1])
    report = verify_jump(request.orbits, plus, minus, request.eta, request.ell0, n_ambient, request.N)
    if not report.ok:
        raise InternalInconsistency(f"solver output failed verification: {report.violations[0].detail}")
    return plus, minus


@dataclass(frozen=True)
class LemmaCheck:
    s: int
    sum_k: int
    holds: bool

    def __iter__(self):
        return iter((self.s, self.sum_k, self.holds))


def lemma52_check(cert_plus: JumpCertificate, spec: PrequantSpec) -> LemmaCheck:
    """``d = 2 s c_B`` and the test ``sum(k_i) = s * r_B``."""
    step = 2 * spec.c_B
    if cert_plus.d % step:
        raise NotDivisible(f"2*c_B = {step} does not divide d = {cert_plus.d}")
    s = cert_plus.d // step
    total = sum(cert_plus.k)
    return LemmaCheck(s, total, total == s * spec.r_B)
