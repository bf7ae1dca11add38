"""The orbit census: check a claimed orbit list against prequantization homology.

The pipeline collapses torsion, checks positivity of mean indices and
lacunarity, matches Morse type numbers against the homology ranks, runs the
index jump search on both sides and then evaluates every counting identity of
the argument with exact integers.  A dataset is Certified only when all of them
hold and it has exactly ``r_B`` orbits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, Sequence

import numpy as np

from .errors import CzcInputError, Exhausted, HypothesisError, NonPositiveMeanIndex, SignMismatch
from .exact import ExactReal, parse_exact
from .homology import PrequantSpec, betti_M, betti_M_array, k_min, mean_euler, truncated_betti_sum
from .index import OrbitModel, collapse, contractible_arrays, count_le, cz_index, ell_zero, mean_chi, mean_index
from .jump import JumpCertificate, JumpRequest, find_jump, lemma52_check, verify_jump

__all__ = [
    "OrbitDataset",
    "CensusConfig",
    "CensusReport",
    "Check",
    "ChainMatch",
    "LacunaryResult",
    "check_positive_mean",
    "check_lacunary",
    "chain_match",
    "finiteness_bound",
    "resonance_check",
    "run_census",
    "default_eta",
    "default_N",
]


@dataclass(frozen=True)
class OrbitDataset:
    n: int
    orbits: tuple[OrbitModel, ...]

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise CzcInputError(f"dataset n must be a non-negative integer, got {self.n!r}")
        seen = set()
        for o in self.orbits:
            if o.name in seen:
                raise CzcInputError(f"duplicate orbit name {o.name!r}")
            seen.add(o.name)
            if o.rank > self.n:
                raise CzcInputError(f"orbit {o.name!r} needs {o.rank} symplectic planes but n={self.n}")

    def without(self, name: str) -> "OrbitDataset":
        return OrbitDataset(self.n, tuple(o for o in self.orbits if o.name != name))

    def to_json(self) -> dict:
        return {"n": self.n, "orbits": [o.to_json() for o in self.orbits]}

    @classmethod
    def from_json(cls, obj, n: int | None = None) -> "OrbitDataset":
        """Accepts ``{"n", "orbits"}``, a bare orbit list (with ``n`` given), or a catalog bundle."""
        if isinstance(obj, dict) and "dataset" in obj:
            obj = obj["dataset"]
        if isinstance(obj, list):
            orbits, n_field = obj, n
        elif isinstance(obj, dict):
            if "orbits" not in obj:
                raise CzcInputError("dataset is missing field 'orbits'")
            orbits, n_field = obj["orbits"], obj.get("n", n)
        else:
            raise CzcInputError("dataset must be a JSON object or array")
        if n_field is None:
            raise CzcInputError("dataset needs the ambient half-dimension 'n'")
        if n is not None and n_field != n:
            raise CzcInputError(f"dataset n={n_field} disagrees with n={n}")
        if not isinstance(orbits, list):
            raise CzcInputError("dataset field 'orbits' must be a list")
        return cls(n_field, tuple(OrbitModel.from_json(o) for o in orbits))


# -- individual checks -----------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    lhs: Any
    rhs: Any
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": _jsonable(self.lhs), "rhs": _jsonable(self.rhs), "pass": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def check_positive_mean(dataset: OrbitDataset) -> list[tuple[str, ExactReal, bool]]:
    """Per orbit: ``(name, mu_hat of the minimal contractible iterate, mu_hat > 0)``."""
    out = []
    for o in dataset.orbits:
        mh = mean_index(o, o.torsion_order)
        out.append((o.name, mh, mh.sign() > 0))
    return out


@dataclass(frozen=True)
class LacunaryResult:
    passed: bool
    parity: int | None
    witness: dict | None = None


def check_lacunary(dataset: OrbitDataset) -> LacunaryResult:
    """All contractible iterates share one index parity.

    By the parity law ``mu(k) = e + k*len(odd_linear) (mod 2)``, so on multiples
    of ``c`` the parity is constant iff ``c*len(odd_linear)`` is even, and then
    equals the parity at ``k = c``.
    """
    parity = None
    first = None
    for o in dataset.orbits:
        c = o.torsion_order
        p1 = cz_index(o, c) % 2
        if (c * len(o.odd_linear)) % 2:
            p2 = cz_index(o, 2 * c) % 2
            return LacunaryResult(False, None, {"orbit": o.name, "k": c, "k_prime": 2 * c,
                                                "mu_k": cz_index(o, c), "mu_k_prime": cz_index(o, 2 * c),
                                                "parities": [p1, p2]})
        if parity is None:
            parity, first = p1, o
        elif p1 != parity:
            return LacunaryResult(False, None, {"orbit": first.name, "k": first.torsion_order,
                                                "other_orbit": o.name, "k_prime": c,
                                                "mu_k": cz_index(first, first.torsion_order),
                                                "mu_k_prime": cz_index(o, c)})
    return LacunaryResult(True, parity)


@dataclass
class ChainMatch:
    lo: int
    hi: int
    c: np.ndarray
    b: np.ndarray
    below: int

    @property
    def first_mismatch(self) -> int | None:
        if self.below:
            return self.lo - 1
        bad = np.nonzero(self.c != self.b)[0]
        return int(self.lo + bad[0]) if bad.size else None

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None

    def rows(self, nonzero_only: bool = False):
        for i in range(self.c.size):
            ci, bi = int(self.c[i]), int(self.b[i])
            if nonzero_only and not (ci or bi):
                continue
            yield self.lo + i, ci, bi, ci == bi


def _morse_counts(orbits: Sequence[OrbitModel], lo: int, hi: int, n: int):
    """Type numbers ``c_k`` on ``[lo, hi]`` plus the count of indices below ``lo``."""
    counts = np.zeros(hi - lo + 1, dtype=np.int64)
    below = 0
    for o in orbits:
        _, mus = contractible_arrays(o, hi, n)
        below += int(np.count_nonzero(mus < lo))
        m = mus[mus >= lo] - lo
        counts += np.bincount(m, minlength=counts.size)[: counts.size]
    return counts, below


def chain_match(dataset: OrbitDataset, spec: PrequantSpec, max_degree: int) -> ChainMatch:
    """Compare ``c_k`` with ``b_k`` for all ``k <= max_degree``.

    Degrees below ``k_min`` must carry no orbit at all; a violation there is
    reported at degree ``k_min - 1``.
    """
    lo = k_min(spec)
    hi = max(lo, max_degree)
    c, below = _morse_counts(dataset.orbits, lo, hi, dataset.n)
    return ChainMatch(lo, hi, c, betti_M_array(spec, lo, hi), below)


def finiteness_bound(spec: PrequantSpec) -> int:
    """Eventual maximum of ``sum_{i=0}^{2n} betti_M(k + i)``.

    For ``k > n`` the rank sequence is ``2 c_B``-periodic, so one period of
    window starts suffices.
    """
    if spec.sign != "positive":
        raise SignMismatch("finiteness bound needs a positive monotone base")
    n, step = spec.n, 2 * spec.c_B
    start = n + 1
    ranks = betti_M_array(spec, start, start + step + 2 * n)
    return max(int(ranks[i:i + 2 * n + 1].sum()) for i in range(step))


def resonance_check(dataset: OrbitDataset, spec: PrequantSpec) -> tuple[ExactReal, ExactReal, bool]:
    lhs = ExactReal(0)
    for o in dataset.orbits:
        u = collapse(o)
        mh = mean_index(u)
        if mh.sign() <= 0:
            raise NonPositiveMeanIndex(o.name, mh)
        lhs = lhs + mean_chi(u) / mh
    rhs = mean_euler(spec)
    return lhs, rhs, lhs == rhs


# -- the census -----------------------------------------------------------------

@dataclass(frozen=True)
class CensusConfig:
    N: int | None = None
    eta: ExactReal | None = None
    search_bound: int = 10**8
    max_degree: int | None = None
    mode: str = "exact"
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "lower_bound"):
            raise CzcInputError(f"mode must be exact or lower_bound, got {self.mode!r}")
        if self.eta is not None and not isinstance(self.eta, ExactReal):
            object.__setattr__(self, "eta", parse_exact(self.eta) if isinstance(self.eta, str) else ExactReal(self.eta))


@dataclass
class CensusReport:
    mode: str
    r: int
    r_B: int
    r_plus: int | None = None
    r_minus: int | None = None
    b0_correction: int = 0
    checks: list[Check] = field(default_factory=list)
    verdict: str = "Certified"
    reason: str = ""
    first_violation: dict | None = None
    parameters: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    forced_lower_bound: int | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "first_violation": self.first_violation,
            "mode": self.mode,
            "r": self.r,
            "r_B": self.r_B,
            "r_plus": self.r_plus,
            "r_minus": self.r_minus,
            "b0_correction": self.b0_correction,
            "forced_lower_bound": self.forced_lower_bound,
            "parameters": self.parameters,
            "certificates": self.certificates,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


class _Stop(Exception):
    pass


class _Ledger:
    def __init__(self, report: CensusReport):
        self.report = report

    def add(self, name, lhs, rhs, passed=None, detail="", degree=None):
        if passed is None:
            passed = lhs == rhs
        self.report.checks.append(Check(name, lhs, rhs, bool(passed), detail))
        if not passed:
            self.report.verdict = "Refuted"
            self.report.reason = f"{name}: {detail or f'{lhs} != {rhs}'}"
            self.report.first_violation = {"check": name, "lhs": _jsonable(lhs), "rhs": _jsonable(rhs)}
            if degree is not None:
                self.report.first_violation["degree"] = degree
            raise _Stop


def default_eta(orbits: Sequence[OrbitModel]) -> ExactReal:
    """``min(1/2, 1/(2U))`` with ``U`` a rational upper bound on ``sum 1/mu_hat``."""
    total = ExactReal(0)
    for o in orbits:
        total = total + ExactReal(1) / mean_index(o)
    upper = total.bounds(64)[1]
    if upper <= 1:
        return ExactReal(Fraction(1, 2))
    return ExactReal(min(Fraction(1, 2), 1 / (2 * upper)))


def default_N(orbits: Sequence[OrbitModel], spec: PrequantSpec, ell0: int) -> int:
    """Least multiple of ``lcm(2 c_B, hyperbolic L_i)`` large enough for the counting steps.

    Every ``k_i`` and ``d`` is a positive multiple of ``N``, so ``N >= l0 + 2``
    keeps ``k_i >= l0 + 2`` and ``N > 2n`` gives ``d > 2n``.  For even ``n`` we
    also need ``d - 2 c_B > n``.
    """
    base = 2 * spec.c_B
    for o in orbits:
        if o.is_hyperbolic:
            base = lcm(base, abs(o.linear_total))
    need = max(ell0 + 2, 2 * spec.n + 1)
    if spec.n % 2 == 0:
        need = max(need, spec.n + 2 * spec.c_B + 1)
    return base * -(-need // base)


def _forced(spec: PrequantSpec) -> int:
    return spec.r_B if spec.n % 2 else spec.r_B - spec.betti[spec.n]


def run_census(dataset: OrbitDataset, spec: PrequantSpec, config: CensusConfig | None = None) -> CensusReport:
    config = config or CensusConfig()
    if spec.sign != "positive":
        raise SignMismatch("the census needs a positive monotone base")
    if not spec.lacunary_base:
        raise HypothesisError("the census needs a lacunary base (H_odd(B) = 0)")
    if dataset.n != spec.n:
        raise CzcInputError(f"dataset n={dataset.n} but spec n={spec.n}")
    report = CensusReport(config.mode, len(dataset.orbits), spec.r_B, forced_lower_bound=_forced(spec))
    ledger = _Ledger(report)
    try:
        if config.mode == "lower_bound":
            _lower_bound(dataset, spec, config, ledger)
        else:
            _exact(dataset, spec, config, ledger)
    except _Stop:
        pass
    except Exhausted as exc:
        report.verdict = "Inconclusive"
        report.reason = str(exc)
    return report


def _common_checks(dataset: OrbitDataset, spec: PrequantSpec, ledger: _Ledger) -> list[OrbitModel]:
    for name, mh, ok in check_positive_mean(dataset):
        ledger.add("positive-mean", str(mh), "> 0", ok, f"orbit {name!r} has mean index {mh}")
    lac = check_lacunary(dataset)
    ledger.add("lacunary", lac.witness, None, lac.passed, "" if lac.passed else f"index parity varies: {lac.witness}")
    if dataset.orbits:
        ledger.add("parity-n", lac.parity, spec.n % 2)
    b = finiteness_bound(spec)
    ledger.add("finiteness r<=b", len(dataset.orbits), b, len(dataset.orbits) <= b)
    return [collapse(o) for o in dataset.orbits]


def _lower_bound(dataset, spec, config, ledger):
    report = ledger.report
    units = _common_checks(dataset, spec, ledger)
    top = config.max_degree or (k_min(spec) + 4 * spec.c_B + 2 * spec.n)
    cm = chain_match(OrbitDataset(dataset.n, units), spec, top)
    ledger.add("chain c_k=0 below k_min", cm.below, 0, degree=k_min(spec) - 1)
    over = np.nonzero(cm.c > cm.b)[0]
    deg = int(cm.lo + over[0]) if over.size else None
    ledger.add("chain c_k<=b_k", deg, None, over.size == 0,
               f"c_k > b_k at degree {deg}" if deg is not None else "", degree=deg)
    report.parameters["max_degree"] = top
    if report.r != report.r_B:
        report.verdict = "Inconclusive"
        report.reason = (f"dataset lists {report.r} orbits; the argument forces at least "
                         f"{report.forced_lower_bound} and exactly {report.r_B} when complete")


def _exact(dataset, spec, config, ledger):
    report = ledger.report
    n, c_B = spec.n, spec.c_B
    units = _common_checks(dataset, spec, ledger)
    udata = OrbitDataset(n, units)
    kmin = k_min(spec)

    pre = chain_match(udata, spec, kmin + 4 * c_B + 2 * n)
    _chain_checks(pre, ledger)
    lhs, rhs, ok = resonance_check(dataset, spec)
    ledger.add("resonance", str(lhs), str(rhs), ok)
    if not units:
        ledger.add("r=r_B", 0, spec.r_B)

    ell0 = ell_zero(units, n)
    eta = config.eta if config.eta is not None else default_eta(units)
    N = config.N if config.N is not None else default_N(units, spec, ell0)
    if N % (2 * c_B):
        raise CzcInputError(f"N={N} must be a multiple of 2*c_B={2 * c_B}")
    inv = ExactReal(0)
    for u in units:
        inv = inv + ExactReal(1) / mean_index(u)
    if not eta * inv < 1:
        raise HypothesisError(f"eta={eta} is too large: eta * sum(1/mu_hat) must be < 1")
    report.parameters.update({"ell0": ell0, "eta": str(eta), "N": N, "search_bound": config.search_bound})

    plus, minus = find_jump(JumpRequest(tuple(units), eta, ell0, N, "both", config.search_bound), n,
                            threads=config.threads)
    report.certificates = {"plus": plus.to_json(), "minus": minus.to_json()}
    vr = verify_jump(units, plus, minus, eta, ell0, n, N)
    ledger.add("jump-verify", len(vr.violations), 0,
               detail=vr.violations[0].detail if vr.violations else "")

    lp, lm = lemma52_check(plus, spec), lemma52_check(minus, spec)
    ledger.add("sum k = s r_B (plus)", lp.sum_k, lp.s * spec.r_B)
    ledger.add("sum k = s r_B (minus)", lm.sum_k, lm.s * spec.r_B)
    report.parameters["s_plus"], report.parameters["s_minus"] = lp.s, lm.s

    # per-degree match up to the plus-side bound; both sides also get a summed match
    top = config.max_degree or (2 * lp.s * c_B + 2 * n + 2)
    report.parameters["max_degree"] = top
    cm = chain_match(udata, spec, top)
    _chain_checks(cm, ledger)

    b0 = betti_M(spec, 0)
    report.b0_correction = b0
    bn = spec.betti[n]
    target = _forced(spec) // 2 if (_forced(spec) % 2 == 0) else None
    ledger.add("r_B - b_n even", _forced(spec) % 2, 0)

    counts = {}
    for side, cert, s in (("plus", plus, lp.s), ("minus", minus, lm.s)):
        counts[side] = _side_identities(side, cert, s, units, spec, ell0, b0, ledger)
    report.r_plus = counts["plus"]["above"]
    report.r_minus = counts["minus"]["above"]
    ledger.add("r_plus = forced/2", report.r_plus, target)
    ledger.add("r_minus = forced/2", report.r_minus, target)
    ledger.add("iii transfer", report.r_minus, counts["plus"]["below"])

    r = len(units)
    at_d = counts["plus"]["at"]
    if n % 2:
        ledger.add("no mu(k_i) = d", at_d, 0)
        ledger.add("r = r_+ + r_-", r, report.r_plus + report.r_minus)
    else:
        ledger.add("#mu(k_i)=d = b_n", at_d, bn)
        ledger.add("r = below + r_+ + at d", r, counts["plus"]["below"] + report.r_plus + at_d)
        c_d = sum(_count_eq(u, plus.d) for u in units)
        ledger.add("c_d = 2b0 + r - r_- - r_+", c_d, 2 * b0 + r - report.r_minus - report.r_plus)
        ledger.add("b_d = 2b0 + b_n", betti_M(spec, plus.d), 2 * b0 + bn)
        c0 = sum(_count_eq(u, 0) for u in units)
        ledger.add("sum c0 = b0", c0, b0)
    ledger.add("r=r_B", r, spec.r_B)


def _count_eq(unit: OrbitModel, degree: int) -> int:
    return count_le(unit, degree) - count_le(unit, degree - 1)


def _chain_checks(cm: ChainMatch, ledger: _Ledger) -> None:
    ledger.add("chain c_k=0 below k_min", cm.below, 0, degree=cm.lo - 1)
    deg = cm.first_mismatch
    if deg is None:
        ledger.add(f"chain c_k=b_k on [{cm.lo},{cm.hi}]", 0, 0)
    else:
        i = deg - cm.lo
        ledger.add(f"chain c_k=b_k on [{cm.lo},{cm.hi}]", int(cm.c[i]), int(cm.b[i]), False,
                   f"c_{deg}={int(cm.c[i])} but b_{deg}={int(cm.b[i])}", degree=deg)


def _side_identities(side, cert: JumpCertificate, s: int, units, spec, ell0, b0, ledger) -> dict:
    n, d = spec.n, cert.d
    tag = f" ({side})"
    ledger.add("2sc_B > 2n" + tag, d, 2 * n, d > 2 * n)
    if n % 2 == 0:
        ledger.add("2(s-1)c_B > n" + tag, d - 2 * spec.c_B, n, d - 2 * spec.c_B > n)
    ledger.add("min k_i >= l0+2" + tag, min(cert.k), ell0 + 2, min(cert.k) >= ell0 + 2)
    gap = 0 if n % 2 else 1
    above = below = at = 0
    total_le_d = 0
    for u, k in zip(units, cert.k):
        mu_k = cz_index(u, k)
        above += mu_k > d + gap
        below += mu_k < d - gap
        at += mu_k == d
        le_d = count_le(u, d)
        total_le_d += le_d
        c0 = _count_eq(u, 0)
        others = le_d - (1 if mu_k <= d else 0)
        ledger.add(f"count j!=k_i mu<=d [{u.name}]" + tag, others, k - 1 + c0)
        window = [cz_index(u, k + l) for l in range(-ell0, ell0 + 1) if l]
        a_i = sum(m <= d - 1 for m in window)
        b_i = sum(m >= d + 1 for m in window)
        cbar = sum(m == d for m in window)
        ledger.add(f"balance a_i=b_i [{u.name}]" + tag, a_i, b_i)
        ledger.add(f"cbar_d=2c0 [{u.name}]" + tag, cbar, 2 * c0)
        ledger.add(f"a_i+c0=l0 [{u.name}]" + tag, a_i + c0, ell0)
    ledger.add("sum c to d = sum k - r_+ + b0" + tag, total_le_d, sum(cert.k) - above + b0)
    ledger.add("sum c to d = s r_B - r_+ + b0" + tag, total_le_d, s * spec.r_B - above + b0)
    lo = k_min(spec)
    top = d + gap
    sum_c = total_le_d + sum(_count_eq(u, top) for u in units) if gap else total_le_d
    sum_b = truncated_betti_sum(spec, lo, top)
    ledger.add(f"sum c = sum b to {top}" + tag, sum_c, sum_b)
    if n % 2:
        ledger.add("sum b to d = s r_B - r_B/2" + tag, Fraction(sum_b), s * spec.r_B - Fraction(spec.r_B, 2))
    else:
        pred = s * spec.r_B + b0 - Fraction(spec.r_B - spec.betti[n], 2)
        ledger.add("sum b to d+1 = s r_B + b0 - (r_B - b_n)/2" + tag, Fraction(sum_b), pred)
    return {"above": above, "below": below, "at": at}
