from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from czc.errors import CzcInputError, HypothesisError, SignMismatch
from czc.homology import (
    PrequantSpec,
    betti_M,
    betti_M_array,
    classic_sums,
    k_min,
    lemma_sum_identity,
    mean_euler,
    truncated_betti_sum,
)

S3 = PrequantSpec(1, 2, "positive", (1, 0, 1))
S5 = PrequantSpec(2, 3, "positive", (1, 0, 1, 0, 1))


def brute_betti(spec, k):
    # oracle: sum over fiber multiplicities m = 1, 2, ... until out of range
    n, c, b = spec.n, spec.c_B, spec.betti
    total, m = 0, 1
    while m < 10_000:
        idx = k - 2 * m * c + n if spec.sign == "positive" else k + 2 * m * c - n
        if 0 <= idx <= 2 * n:
            total += b[idx]
        if (spec.sign == "positive" and idx < 0) or (spec.sign == "negative" and idx > 2 * n):
            break
        m += 1
    return total


def test_betti_examples():
    assert [betti_M(S3, k) for k in (1, 3, 5)] == [0, 1, 1]
    assert betti_M(S5, 8) == 1 and betti_M(S5, 10) == 1
    assert [betti_M(S3, k) for k in range(8)] == [0, 0, 0, 1, 0, 1, 0, 1]


def test_below_k_min_is_zero():
    for spec in (S3, S5, PrequantSpec(3, 2, "positive", (1, 0, 1, 0, 1, 0, 1))):
        assert all(betti_M(spec, k) == 0 for k in range(-20, 2 * spec.c_B - spec.n))


def test_k_min_examples():
    assert k_min(S3) == 3
    assert k_min(S5) == 4
    assert k_min(PrequantSpec(3, 2, "positive", (1, 0, 1, 0, 1, 0, 1))) == 1
    with pytest.raises(SignMismatch):
        k_min(PrequantSpec(1, 2, "negative", (1, 0, 1)))


def test_mean_euler_examples():
    assert mean_euler(S3) == Fraction(-1, 2)
    assert mean_euler(S5) == Fraction(1, 2)
    # n = 15, r_B = 24, c_B = 11: any lacunary PD profile with those totals
    betti = [1 - i % 2 for i in range(31)]
    betti[14] += 4
    betti[16] += 4
    spec = PrequantSpec(15, 11, "positive", tuple(betti))
    assert spec.r_B == 24
    assert mean_euler(spec) == Fraction(-12, 11)


def test_mean_euler_needs_lacunary():
    with pytest.raises(HypothesisError):
        mean_euler(PrequantSpec(1, 2, "positive", (1, 3, 1), False))


def test_truncated_sum_examples():
    assert truncated_betti_sum(S3, 3, 5) == 2
    assert truncated_betti_sum(S5, -10, 3) == 0
    assert truncated_betti_sum(S5, 4, 12) == 5
    with pytest.raises(CzcInputError):
        truncated_betti_sum(S3, 5, 3)


def test_lemma_sum_examples():
    assert tuple(lemma_sum_identity(S5, 2)) == (10, 10, True)
    assert tuple(lemma_sum_identity(S3, 2)) == (6, 6, True)
    with pytest.raises(HypothesisError):
        lemma_sum_identity(S5, 0)


def test_classic_sums_examples():
    cs = classic_sums(S3, 2)
    assert cs.sum_to_d == 3 and cs.b0 == 0 and cs.matches
    cs = classic_sums(S5, 2)
    assert cs.sum_to_d_plus_1 == 5 and cs.predicted == 5 and cs.matches


def test_classic_sums_with_b0_correction():
    # c_B <= n/2 makes b_0 > 0
    spec = PrequantSpec(4, 1, "positive", (1, 0, 2, 0, 3, 0, 2, 0, 1))
    assert betti_M(spec, 0) > 0
    for s in range(5, 12):
        assert classic_sums(spec, s).matches


def test_spec_validation():
    with pytest.raises(CzcInputError):
        PrequantSpec(1, 2, "positive", (1, 0, 2))  # duality
    with pytest.raises(CzcInputError):
        PrequantSpec(1, 2, "positive", (0, 0, 0))
    with pytest.raises(CzcInputError):
        PrequantSpec(1, 2, "positive", (1, 1, 1), True)
    with pytest.raises(CzcInputError):
        PrequantSpec(1, 0, "positive", (1, 0, 1))
    with pytest.raises(CzcInputError):
        PrequantSpec(1, 2, "sideways", (1, 0, 1))
    assert PrequantSpec.from_json(S5.to_json()) == S5
    assert PrequantSpec.from_json({"n": 1, "c_B": 2, "sign": "positive", "betti": [1, 0, 1]}).lacunary_base


@st.composite
def specs(draw, lacunary=True, sign=None):
    n = draw(st.integers(0, 6))
    c = draw(st.integers(1, 5))
    half = [draw(st.integers(1, 3))] + [draw(st.integers(0, 3)) for _ in range(n)]
    if lacunary:
        half = [v if i % 2 == 0 else 0 for i, v in enumerate(half)]
    betti = half + half[-2::-1]
    sg = sign or draw(st.sampled_from(["positive", "negative"]))
    return PrequantSpec(n, c, sg, tuple(betti), lacunary)


@settings(max_examples=1000)
@given(specs(lacunary=False), st.integers(-60, 60), st.integers(0, 60))
def test_betti_array_matches_oracle(spec, lo, width):
    arr = betti_M_array(spec, lo, lo + width)
    assert arr.tolist() == [brute_betti(spec, k) for k in range(lo, lo + width + 1)]
    assert truncated_betti_sum(spec, lo, lo + width) == sum(arr.tolist())


@settings(max_examples=10_000)
@given(specs(lacunary=False, sign="positive"), st.integers(-100, 200))
def test_recurrence(spec, k):
    idx = k + spec.n
    extra = spec.betti[idx] if 0 <= idx <= 2 * spec.n else 0
    assert betti_M(spec, k + 2 * spec.c_B) == betti_M(spec, k) + extra


@settings(max_examples=1000)
@given(specs(sign="positive"), st.integers(1, 20))
def test_lemma_sum_random(spec, s):
    if 2 * s * spec.c_B <= 2 * spec.n:
        return
    lhs, rhs, holds = lemma_sum_identity(spec, s)
    assert holds and lhs == 2 * sum(brute_betti(spec, k) for k in range(k_min(spec), 2 * s * spec.c_B + 1))


@settings(max_examples=500)
@given(specs(sign="positive"))
def test_window_saturation(spec):
    step = 2 * spec.c_B
    start = spec.n + step * (-(-(2 * spec.n + 1) // step)) + 1
    for k in range(start, start + 3 * step):
        assert sum(betti_M(spec, j) for j in range(k, k + step)) == spec.r_B


@settings(max_examples=300)
@given(specs(sign="positive"), st.integers(0, 5))
def test_mean_euler_period_average(spec, shift):
    step = 2 * spec.c_B
    start = 2 * spec.n + 1 + shift * step
    avg = Fraction(sum((-1) ** k * betti_M(spec, k) for k in range(start, start + step)), step)
    assert mean_euler(spec) == avg


def test_negative_sign_betti():
    spec = PrequantSpec(2, 1, "negative", (1, 0, 1, 0, 1))
    rng = random.Random(3)
    for _ in range(200):
        k = rng.randint(-30, 30)
        assert betti_M(spec, k) == brute_betti(spec, k)
