"""Tests for the filtered-complex spectral sequence engine and the triangle checker.

Page dimensions are compared with ``brute_force_page_dims``, which works
with dense full-length vectors and null spaces, and with the recursion
E^{r+1} = H(E^r, d^r).
"""

import random

import pytest

from oddkh_lab import get_link
from oddkh_lab.errors import NotAComplex, NotFiltered
from oddkh_lab.fieldmat import Field
from oddkh_lab.oddkh import build_complex, reduced_odd_khovanov
from oddkh_lab.specseq import (
    FilteredComplex,
    TriangleInstance,
    brute_force_page_dims,
    cone_triangle,
    converged,
    corrupt_triangle,
    page,
    random_cone_triangle,
    random_filtered_complex,
    verify_triangle,
)


def test_zero_differential_is_stationary():
    fc = FilteredComplex.from_entries([0, 0, 1, 2], [0, 1, 1, 2], {}, characteristic=5)
    e0 = page(fc, 0)
    for r in range(5):
        pr = page(fc, r)
        assert pr.dims == e0.dims
        assert all(fc.field.is_zero(m) for m in pr.differentials.values())


def test_two_step_iso_dies_on_e2():
    fc = FilteredComplex.from_entries([0, 1], [0, 1], {(1, 0): 1})
    assert page(fc, 0).total_dim() == 2
    assert page(fc, 1).total_dim() == 2
    assert page(fc, 2).total_dim() == 0
    assert converged(fc).dims == {}


def test_same_level_iso_dies_on_e1():
    fc = FilteredComplex.from_entries([0, 1], [1, 1], {(1, 0): 3}, characteristic=7)
    assert page(fc, 0).total_dim() == 2
    assert page(fc, 1).total_dim() == 0


def test_acyclic_complex_converges_to_zero():
    rng = random.Random(4)
    for _ in range(20):
        fc = random_filtered_complex(rng, characteristic=5)
        if all(v == 0 for v in fc.homology_dims().values()):
            assert converged(fc).total_dim() == 0


def test_validation_errors():
    with pytest.raises(NotFiltered):
        FilteredComplex.from_entries([0, 1], [1, 0], {(1, 0): 1})
    with pytest.raises(ValueError):
        FilteredComplex.from_entries([0, 2], [0, 1], {(1, 0): 1})
    with pytest.raises(NotAComplex):
        FilteredComplex.from_entries([0, 1, 2], [0, 0, 0], {(1, 0): 1, (2, 1): 1})
    fc = FilteredComplex.from_entries([0], [0], {})
    with pytest.raises(ValueError):
        page(fc, -1)


def test_characteristic_reduces_entries():
    fc = FilteredComplex.from_entries([0, 1], [0, 0], {(1, 0): 5}, characteristic=5)
    assert fc.columns == [{}, {}]
    assert page(fc, 1).total_dim() == 2


@pytest.mark.parametrize("characteristic", [0, 5, 2])
def test_random_pages_match_oracle(characteristic):
    rng = random.Random(100 + characteristic)
    for _ in range(60):
        fc = random_filtered_complex(rng, characteristic=characteristic)
        lo, hi = fc.level_range
        prev = None
        for r in range(0, hi - lo + 3):
            pr = page(fc, r)
            assert pr.dims == brute_force_page_dims(fc, r)
            if prev is not None:
                assert pr.dims == prev.homology_dims()
            prev = pr
        total = fc.homology_dims()
        inf = converged(fc).dims_by_degree()
        assert {k: v for k, v in total.items() if v} == inf


def test_page_differentials_have_degree_r():
    rng = random.Random(8)
    for _ in range(30):
        fc = random_filtered_complex(rng, characteristic=0)
        for r in range(3):
            pr = page(fc, r)
            for (p, deg), mat in pr.differentials.items():
                assert len(mat) == pr.dims.get((p + r, deg + 1), 0)


def test_trefoil_cube_filtration():
    cx = build_complex(get_link("trefoil"))
    fc = cx.filtered(0)
    assert page(fc, 0).total_dim() == 15
    e1 = page(fc, 1)
    assert e1.total_dim() == 15
    e2 = page(fc, 2)
    assert e2.total_dim() == 3 == reduced_odd_khovanov(get_link("trefoil")).total_rank()
    assert page(fc, 3).dims == e2.dims
    assert converged(fc).total_dim() == 3


def test_cube_filtration_char2_dominates():
    for name in ["figure_eight", "T(3,4)"]:
        cx = build_complex(get_link(name))
        e0 = page(cx.filtered(0), 2).dims_by_degree()
        e2 = page(cx.filtered(2), 2).dims_by_degree()
        for deg, n in e0.items():
            assert e2.get(deg, 0) >= n


# ---------------------------------------------------------------------------
# Triangle detection
# ---------------------------------------------------------------------------


def _empty_triangle(f):
    z = []
    return TriangleInstance([z, z, z], [z, z, z], [z, z, z], f)


def test_empty_triangle_is_vacuous():
    report = verify_triangle(_empty_triangle(Field(0)))
    assert report.hypotheses_hold and report.ok


@pytest.mark.parametrize("characteristic", [0, 2, 3])
def test_cone_of_identity(characteristic):
    f = Field(characteristic)
    one = [[f(1)]]
    zero = [[f(0)]]
    ti = cone_triangle(f, zero, [0], zero, [0], one)
    report = verify_triangle(ti)
    assert report.ok, report.failures
    assert report.exact and report.quasi_isomorphism


@pytest.mark.parametrize("characteristic", [2, 0, 5])
def test_random_cone_triangles(characteristic):
    rng = random.Random(characteristic + 7)
    for _ in range(15):
        report = verify_triangle(random_cone_triangle(rng, characteristic=characteristic))
        assert report.ok, report.failures


def test_corruption_is_flagged_and_conclusions_skipped():
    rng = random.Random(12)
    flagged = 0
    while flagged < 10:
        ti = random_cone_triangle(rng, characteristic=2)
        try:
            bad = corrupt_triangle(ti, rng)
        except ValueError:
            continue
        report = verify_triangle(bad)
        assert not report.hypotheses_hold
        assert report.exact is None and report.quasi_isomorphism is None
        assert report.failures
        flagged += 1


def test_non_chain_map_detected():
    f = Field(0)
    d_a = [[f(0), f(0)], [f(1), f(0)]]  # e0 -> e1
    d_b = [[f(0)]]
    g = [[f(0), f(1)]]  # g d != d g = 0
    ti = cone_triangle(f, d_a, [0, 1], d_b, [1], g)
    report = verify_triangle(ti)
    assert not report.hypotheses_hold
    assert any("chain map" in msg for msg, _ in report.failures)
