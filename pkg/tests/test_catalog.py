from __future__ import annotations

from fractions import Fraction

import pytest

from czc.catalog import CrossRow, cosphere_sphere_spec, cross_spec, cross_table, ellipsoid, lens, sphere_spec
from czc.census import run_census
from czc.exact import ExactReal
from czc.errors import CzcInputError, NoProfile, RationalRatio, UnknownName, WeightNotCoprime
from czc.homology import k_min, mean_euler
from czc.index import collapse, cz_index


def test_table_rows_exact():
    rows = [(r.name, r.r_B, r.c_B) for r in cross_table()]
    assert rows == [
        ("S^{2n+1}", "n+1", "n+1"),
        ("S*S^2 or S*RP^2", "2", "2"),
        ("S*S^m or S*RP^m, m>2 even", "m", "m-1"),
        ("S*S^m or S*RP^m, m odd", "m+1", "m-1"),
        ("S*CP^m", "m(m+1)", "m"),
        ("S*HP^m", "2m(m+1)", "2m+1"),
        ("S*CaP^2", "24", "11"),
    ]


def test_row_evaluate():
    t = {r.name: r for r in cross_table()}
    assert t["S^{2n+1}"].evaluate(3) == (4, 4)
    assert t["S*CP^m"].evaluate(3) == (12, 3)
    assert t["S*HP^m"].evaluate(2) == (12, 5)
    assert t["S*CaP^2"].evaluate() == (24, 11)
    assert t["S*CaP^2"].parameter is None and t["S*HP^m"].parameter == "m"
    with pytest.raises(CzcInputError):
        t["S*CP^m"].evaluate()
    assert CrossRow("x", "2", "1").to_json() == {"name": "x", "r_B": "2", "c_B": "1"}


def test_sphere_specs():
    for n in range(5):
        spec = sphere_spec(n)
        assert (spec.r_B, spec.c_B) == (n + 1, n + 1)
        assert k_min(spec) == n + 2
    assert cross_spec("S^7") == sphere_spec(3)
    assert cross_spec("S^{2n+1}", 2) == sphere_spec(2)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_cosphere_profiles_match_table(m):
    spec = cosphere_sphere_spec(m)
    assert cross_spec(f"S*S^{m}") == spec
    row = next(r for r in cross_table() if r.name.startswith("S*S^") and
               (m == 2 and "2" in r.r_B or m > 2 and m % 2 == 0 and "even" in r.name or m % 2 and "odd" in r.name))
    assert (spec.r_B, spec.c_B) == row.evaluate(None if m == 2 else m)
    assert mean_euler(spec) == ExactReal(Fraction((-1) ** spec.n * spec.r_B, 2 * spec.c_B))


def test_cross_spec_errors():
    for name in ("S*CP^3", "S*HP^2", "S*CaP^2", "S*RP^4", "S*CP^m"):
        with pytest.raises(NoProfile):
            cross_spec(name, 2)
    for name in ("S^4", "T^3", "", "S*S^m or S*RP^m, m odd x"):
        with pytest.raises(UnknownName, match="unknown catalog name"):
            cross_spec(name)
    with pytest.raises(CzcInputError):
        cross_spec("S*S^m or S*RP^m, m odd", 4)
    with pytest.raises(CzcInputError):
        cross_spec("S*S^m or S*RP^m, m>2 even", 2)
    with pytest.raises(CzcInputError):
        cross_spec("S^{2n+1}")


def test_ellipsoid_orbits():
    spec, data = ellipsoid(["1", "sqrt2"])
    assert [cz_index(o, 1) for o in data.orbits] == [3, 5]
    assert spec == sphere_spec(1)
    with pytest.raises(RationalRatio):
        ellipsoid(["1", "2"])
    with pytest.raises(RationalRatio):
        ellipsoid(["sqrt2", "2*sqrt2"])
    with pytest.raises(CzcInputError):
        ellipsoid(["1", "-sqrt2"])
    with pytest.raises(CzcInputError):
        ellipsoid([])


def test_lens_encoding():
    base = ellipsoid(["1", "sqrt2"])
    assert lens(1, [1, 1], ["1", "sqrt2"]) == base
    spec, data = lens(3, [1, 2], ["1", "sqrt2"])
    assert spec == base[0]
    for o, up in zip(data.orbits, base[1].orbits):
        assert o.torsion_order == 3
        assert [cz_index(collapse(o), j) for j in range(1, 40)] == [cz_index(up, j) for j in range(1, 40)]
        assert cz_index(o, 3) == cz_index(up, 1)
    with pytest.raises(WeightNotCoprime):
        lens(4, [1, 2], ["1", "sqrt2"])
    with pytest.raises(CzcInputError):
        lens(0, [1, 1], ["1", "sqrt2"])
    with pytest.raises(CzcInputError):
        lens(3, [1], ["1", "sqrt2"])


@pytest.mark.parametrize("make", [
    lambda: ellipsoid(["1", "sqrt2"]),
    lambda: ellipsoid(["1", "sqrt3"]),
    lambda: ellipsoid(["1", "sqrt2", "sqrt3"]),
    lambda: ellipsoid(["1", "sqrt2", "sqrt3", "sqrt5"]),
    lambda: lens(2, [1, 1], ["1", "sqrt2"]),
    lambda: lens(5, [1, 2], ["1", "sqrt3"]),
    lambda: lens(7, [1, 3, 5], ["1", "sqrt2", "sqrt3"]),
])
def test_catalog_datasets_certified(make):
    spec, data = make()
    rep = run_census(data, spec)
    assert rep.verdict == "Certified", rep.reason
