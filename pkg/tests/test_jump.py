from __future__ import annotations

import itertools

import pytest

from czc.catalog import ellipsoid, lens
from czc.errors import CzcInputError, Exhausted, NonPositiveMeanIndex, NotDivisible
from czc.exact import ExactReal, floor_mul, sqrt
from czc.homology import PrequantSpec
from czc.index import OrbitModel, collapse, cz_index, ell_zero, mean_index
from czc.jump import JumpCertificate, JumpRequest, find_jump, lemma52_check, verify_jump

HALF = ExactReal(1) / 2


def e12():
    return [collapse(o) for o in ellipsoid(["1", "sqrt2"])[1].orbits]


def brute_first(orbits, eta, ell0, N, t_max, target=None):
    """Exhaustive reference search over t with exact candidate tests."""
    for t in range(1, t_max + 1):
        d = N * t
        options = []
        for o in orbits:
            mh = mean_index(o)
            j = floor_mul(ExactReal(d) / (mh * N), 1)
            ks = [N * i for i in (j - 1, j, j + 1, j + 2) if i > 0 and abs(mh * (N * i) - d) < eta]
            if not ks:
                break
            options.append(ks)
        else:
            for ks in itertools.product(*options):
                if any(k <= ell0 for k in ks):
                    continue
                ok = all(cz_index(o, k + s * l) == d + cz_index(o, s * l)
                         for o, k in zip(orbits, ks) for l in range(1, ell0 + 1) for s in (1, -1))
                if any(o.is_hyperbolic and cz_index(o, k) != d for o, k in zip(orbits, ks)):
                    ok = False
                defects = [cz_index(o, k) - d for o, k in zip(orbits, ks)]
                if ok and (target is None or defects == [-v for v in target]):
                    return d, list(ks), defects
    return None


def test_verify_hyperbolic_equality():
    o = OrbitModel("h", (), 2)
    for N in (2, 5):
        cert = JumpCertificate("plus", 2 * N, (N,))
        rep = verify_jump([o], cert, None, HALF, 1, N=N)
        assert rep.ok and rep.defects_plus == [0]


def test_find_jump_hyperbolic_minimal():
    plus, minus = find_jump(JumpRequest((OrbitModel("h", (), 2),), HALF, 1, 2, "plus"))
    assert (plus.d, plus.k) == (4, (2,)) and minus is None


def test_find_jump_e12_matches_brute_force():
    orbits = e12()
    ell0 = ell_zero(orbits, 1)
    assert ell0 == 2
    plus, minus = find_jump(JumpRequest(tuple(orbits), HALF, ell0, 4, "both"), 1)
    ref = brute_first(orbits, HALF, ell0, 4, 200)
    assert ref is not None and (plus.d, list(plus.k)) == (ref[0], ref[1])
    ref_minus = brute_first(orbits, HALF, ell0, 4, 400, target=ref[2])
    assert (minus.d, list(minus.k)) == (ref_minus[0], ref_minus[1])
    rep = verify_jump(orbits, plus, minus, HALF, ell0, 1, 4)
    assert rep.ok
    assert rep.defects_minus == [-v for v in rep.defects_plus]
    # the short orbit's fractional part sits within the gap demanded by (ii)
    k = plus.k[0]
    frac = mean_index(orbits[0], k) - plus.d
    assert abs(frac) < HALF


def test_mutation_d_plus_two_breaks_clause_ii():
    orbits = e12()
    plus, minus = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "both"), 1)
    bad = JumpCertificate("plus", plus.d + 2, plus.k)
    rep = verify_jump(orbits, bad, None, HALF, 2)
    assert any(v.clause == "ii-plus" and v.ell == 1 for v in rep.violations)


def test_find_jump_deterministic_across_threads_and_backends():
    orbits = tuple(collapse(o) for o in ellipsoid(["1", "sqrt2", "sqrt3"])[1].orbits)
    req = JumpRequest(orbits, HALF, 2, 12, "both", 10**7)
    ref = find_jump(req, 2, threads=1)
    assert find_jump(req, 2, threads=4) == ref
    assert find_jump(req, 2, threads=3, backend="python") == ref


def test_find_jump_slow_path_agrees():
    # a mixed-radicand rotation forces the exhaustive path
    o1 = OrbitModel("a", (sqrt(2) / 3,), 2)
    o2 = OrbitModel("b", ((sqrt(2) + sqrt(3)) / 5,), 2)
    plus, minus = find_jump(JumpRequest((o1, o2), HALF, 2, 2, "both", 10**4), 1)
    ref = brute_first([o1, o2], HALF, 2, 2, 10**4)
    assert (plus.d, list(plus.k)) == (ref[0], ref[1])
    assert verify_jump([o1, o2], plus, minus, HALF, 2, 1, 2).ok


def test_exhausted_is_loud():
    with pytest.raises(Exhausted) as info:
        find_jump(JumpRequest(tuple(e12()), HALF, 2, 4, "both", 3), 1)
    assert "3" in str(info.value)


def test_two_independent_surds_terminate_below_recorded_bound():
    # empirical ceiling on t for these rotations at N = 4; artifact data, not a proven bound
    import random

    rng = random.Random(7)
    worst = 0
    for _ in range(20):
        p, q = rng.sample([2, 3, 5, 6, 7, 10, 11, 13], 2)
        orbits = (OrbitModel("a", (sqrt(p) / rng.randint(2, 9),), 2),
                  OrbitModel("b", (sqrt(q) / rng.randint(2, 9),), 2))
        plus, _ = find_jump(JumpRequest(orbits, HALF, ell_zero(orbits, 1), 4, "plus", 10**6), 1)
        worst = max(worst, plus.d // 4)
    assert worst < 10**5


def test_request_validation():
    with pytest.raises(CzcInputError):
        JumpRequest(tuple(e12()), ExactReal(0), 2, 4)
    with pytest.raises(CzcInputError):
        JumpRequest(tuple(e12()), HALF, 0, 4)
    with pytest.raises(CzcInputError):
        JumpRequest(tuple(e12()), HALF, 2, 4, "sideways")
    with pytest.raises(NonPositiveMeanIndex):
        JumpRequest((OrbitModel("neg", (), -2),), HALF, 2, 4)


def test_divisibility_check():
    spec, data = ellipsoid(["1", "sqrt2"])
    orbits = [collapse(o) for o in data.orbits]
    plus, _ = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "plus"), 1)
    s, total, holds = lemma52_check(plus, spec)
    assert holds and total == 2 * s and plus.d == 4 * s
    # hyperbolic toy: k = N, d = 2N against S3 gives sum k = N but s * r_B = N
    toy = JumpCertificate("plus", 8, (4,))
    assert not lemma52_check(toy, PrequantSpec(1, 1, "positive", (1, 0, 1))).holds
    with pytest.raises(NotDivisible):
        lemma52_check(JumpCertificate("plus", 6, (3,)), spec)


def test_antisymmetry_of_defects():
    orbits = e12()
    plus, minus = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "both"), 1)
    a = verify_jump(orbits, plus, minus, HALF, 2)
    b = verify_jump(orbits, JumpCertificate("plus", minus.d, minus.k), JumpCertificate("minus", plus.d, plus.k),
                    HALF, 2)
    assert a.ok and b.ok
    assert b.defects_plus == [-v for v in a.defects_plus]


def test_hyperbolic_scaling():
    orbits = (OrbitModel("h1", (), 2), OrbitModel("h2", (), 0, (3, 3)))
    d1 = find_jump(JumpRequest(orbits, HALF, 1, 2, "plus"))[0].d
    d2 = find_jump(JumpRequest(orbits, HALF, 1, 4, "plus"))[0].d
    assert d2 <= 2 * d1


def test_bound_consequences_on_e12():
    orbits = e12()
    plus, _ = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "plus"), 1)
    for o, k in zip(orbits, plus.k):
        assert all(cz_index(o, k - l) <= plus.d - 1 for l in range(1, k))
        assert all(cz_index(o, k + l) >= plus.d + 1 for l in range(1, 3 * k))


def test_lens_certificates_pass():
    spec, data = lens(5, [1, 2], ["1", "sqrt3"])
    orbits = tuple(collapse(o) for o in data.orbits)
    plus, minus = find_jump(JumpRequest(orbits, HALF, ell_zero(orbits, 1), 4, "both"), 1)
    assert verify_jump(orbits, plus, minus, HALF, ell_zero(orbits, 1), 1, 4).ok
    assert lemma52_check(plus, spec).holds and lemma52_check(minus, spec).holds


# -- corrupted certificates ------------------------------------------------------

def corruptions(plus, minus):
    yield "d+N", JumpCertificate("plus", plus.d + 4, plus.k), minus
    yield "d-N", JumpCertificate("plus", plus.d - 4, plus.k), minus
    yield "d+1", JumpCertificate("plus", plus.d + 1, plus.k), minus
    yield "k0+N", JumpCertificate("plus", plus.d, (plus.k[0] + 4,) + plus.k[1:]), minus
    yield "k1-N", JumpCertificate("plus", plus.d, plus.k[:1] + (plus.k[1] - 4,)), minus
    yield "k0+1", JumpCertificate("plus", plus.d, (plus.k[0] + 1,) + plus.k[1:]), minus
    yield "swap k", JumpCertificate("plus", plus.d, plus.k[::-1]), minus
    yield "short k", JumpCertificate("plus", plus.d, plus.k[:1]), minus
    yield "minus d+N", plus, JumpCertificate("minus", minus.d + 4, minus.k)
    yield "minus = plus", plus, JumpCertificate("minus", plus.d, plus.k)
    yield "zero k", JumpCertificate("plus", plus.d, (0,) + plus.k[1:]), minus
    yield "negative d", JumpCertificate("plus", -plus.d, plus.k), minus


def test_corrupted_certificates_all_flagged():
    orbits = e12()
    plus, minus = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "both"), 1)
    assert verify_jump(orbits, plus, minus, HALF, 2, 1, 4).ok
    for name, p, m in corruptions(plus, minus):
        rep = verify_jump(orbits, p, m, HALF, 2, 1, 4)
        assert not rep.ok, name


def test_certificate_json():
    c = JumpCertificate("plus", 12, (4, 8))
    assert JumpCertificate.from_json(c.to_json()) == c
    with pytest.raises(CzcInputError):
        JumpCertificate.from_json({"side": "plus"})
    with pytest.raises(CzcInputError):
        JumpCertificate("up", 4, (4,))


def test_side_labels_must_match_slots():
    orbits = e12()
    plus, minus = find_jump(JumpRequest(tuple(orbits), HALF, 2, 4, "both"), 1)
    rep = verify_jump(orbits, plus, JumpCertificate("plus", minus.d, minus.k), HALF, 2)
    assert [v.clause for v in rep.violations] == ["shape-minus"]
    rep = verify_jump(orbits, JumpCertificate("minus", plus.d, plus.k), None, HALF, 2)
    assert not rep.ok
