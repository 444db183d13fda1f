"""Tests for Goeritz matrices, signature, determinant, H_1 of the branched cover and Jones.

Reference Jones polynomials are the standard tabulated V(t) (KnotInfo
conventions), translated to the variable x used here through t^(k/2) ->
(-1)^k x^k.  Reference signatures follow the convention in which the
positive (right-handed) trefoil has signature +2.
"""

from fractions import Fraction

import pytest
import sympy

from oddkh_lab import branched_h1, determinant, get_link, jones, link_names, signature_nullity
from oddkh_lab.diagram import mirror, parse_pd
from oddkh_lab.errors import DisconnectedDiagram
from oddkh_lab.goeritz import LaurentPoly, goeritz
from oddkh_lab.linalg import invariant_factors

# V(t) as {2 * exponent: coefficient}
STANDARD_JONES = {
    "unknot": {0: 1},
    "trefoil": {2: 1, 6: 1, 8: -1},
    "trefoil_left": {-2: 1, -6: 1, -8: -1},
    "figure_eight": {-4: 1, -2: -1, 0: 1, 2: -1, 4: 1},
    "hopf_positive": {1: -1, 5: -1},
    "hopf": {-1: -1, -5: -1},
    "T(2,4)": {3: -1, 7: -1, 9: 1, 11: -1},
    "T(2,5)": {4: 1, 8: 1, 10: -1, 12: 1, 14: -1},
    "T(3,4)": {6: 1, 10: 1, 16: -1},
    "T(3,5)": {8: 1, 12: 1, 20: -1},
}

ALTERNATING = ["trefoil", "trefoil_left", "figure_eight", "hopf", "hopf_positive",
               "T(2,4)", "T(2,5)", "granny", "square", "trefoil_figure_eight"]

EXPECTED = {
    # name: (sigma, nu, det, H_1 invariant factors)
    "unknot": (0, 0, 1, ()),
    "unknot_kink": (0, 0, 1, ()),
    "hopf": (-1, 0, 2, (2,)),
    "hopf_positive": (1, 0, 2, (2,)),
    "trefoil": (2, 0, 3, (3,)),
    "trefoil_left": (-2, 0, 3, (3,)),
    "figure_eight": (0, 0, 5, (5,)),
    "T(2,4)": (3, 0, 4, (4,)),
    "T(2,5)": (4, 0, 5, (5,)),
    "T(3,4)": (6, 0, 3, (3,)),
    "T(3,5)": (8, 0, 1, ()),
    "T(3,7)": (8, 0, 1, ()),
    "granny": (4, 0, 9, (3, 3)),
    "square": (0, 0, 9, (3, 3)),
    "trefoil_figure_eight": (2, 0, 15, (15,)),
}


def sign_changes(coeffs):
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia_by_descartes(m):
    """(positive, negative) eigenvalue counts of a symmetric matrix.

    The characteristic polynomial of a symmetric matrix has only real roots,
    so Descartes' rule of signs counts the positive roots exactly.
    """
    if not m.rows:
        return 0, 0
    lam = sympy.Symbol("lam")
    p = sympy.Poly(m.charpoly(lam).as_expr(), lam)
    pos = sign_changes(p.all_coeffs())
    neg = sign_changes(sympy.Poly(p.as_expr().subs(lam, -lam), lam).all_coeffs())
    return pos, neg


def to_x(standard):
    return LaurentPoly({k: c * (-1) ** (k % 2) for k, c in standard.items()})


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_classical_invariants(name):
    d = get_link(name)
    sigma, nu, det, h1 = EXPECTED[name]
    assert signature_nullity(d) == (sigma, nu)
    assert determinant(d) == det
    assert branched_h1(d) == h1


def test_mirror_negates_signature():
    for name in link_names():
        d = get_link(name)
        if d.m and d.is_connected():
            sigma, nu = signature_nullity(d)
            assert signature_nullity(mirror(d)) == (-sigma, nu), name
            assert determinant(mirror(d)) == determinant(d)


def test_both_shadings_agree():
    # signature and determinant do not depend on which color is white
    for name in link_names():
        d = get_link(name)
        if not d.m:
            continue
        dets = set()
        sigs = set()
        for shading in (0, 1):
            g = goeritz(d, shading)
            m = sympy.Matrix(g.matrix.to_dense()) if g.matrix.rows else sympy.zeros(0, 0)
            assert m == m.T
            dets.add(abs(int(m.det())) if m.rows else 1)
            pos, neg = inertia_by_descartes(m)
            sigs.add(pos - neg - g.correction)
        assert len(dets) == 1 and len(sigs) == 1, name
        assert dets == {determinant(d)}
        assert sigs == {signature_nullity(d)[0]}


def test_goeritz_examples():
    for text, det in [("X[1,2,2,1]", 1), ("X[1,4,2,3] X[3,2,4,1]", 2),
                      ("X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]", 3)]:
        g = goeritz(parse_pd(text))
        m = g.matrix.to_dense()
        value = int(sympy.Matrix(m).det()) if m else 1
        assert abs(value) == det


def test_connected_sum_additivity():
    t, f = get_link("trefoil"), get_link("figure_eight")
    assert signature_nullity(get_link("granny"))[0] == 2 * signature_nullity(t)[0]
    assert signature_nullity(get_link("square"))[0] == 0
    assert determinant(get_link("trefoil_figure_eight")) == determinant(t) * determinant(f)
    assert branched_h1(get_link("granny")) == invariant_factors([3, 3])
    assert jones(get_link("granny")) == jones(t) * jones(t)
    assert jones(get_link("trefoil_figure_eight")) == jones(t) * jones(f)


def test_h1_order_is_determinant():
    for name in link_names():
        d = get_link(name)
        if d.m and not d.is_connected():
            continue
        factors = branched_h1(d)
        product = 1
        for f in factors:
            product *= f
        det = determinant(d)
        if det:
            assert product == det, name


def test_split_diagram_rejected():
    d = parse_pd("X[1,1,2,2] X[3,3,4,4]")
    for fn in (signature_nullity, determinant, branched_h1):
        with pytest.raises(DisconnectedDiagram):
            fn(d)


@pytest.mark.parametrize("name", sorted(STANDARD_JONES))
def test_jones_matches_tables(name):
    assert jones(get_link(name)) == to_x(STANDARD_JONES[name])


def test_jones_mirror_and_kink():
    for name in link_names():
        d = get_link(name)
        if d.m > 10:
            continue
        j = jones(d)
        flipped = LaurentPoly({-e: c for e, c in j.terms.items()})
        assert jones(mirror(d)) == flipped, name
    assert jones(parse_pd("X[1,1,2,2]")) == LaurentPoly({0: 1})
    assert jones(parse_pd("X[1,2,2,1]")) == LaurentPoly({0: 1})


@pytest.mark.parametrize("name", ALTERNATING)
def test_jones_alternating_facts(name):
    d = get_link(name)
    j = jones(d)
    sigma, _ = signature_nullity(d)
    assert j.abs_coefficient_sum() == determinant(d)
    if d.components == 1:
        for q, a in j.terms.items():
            assert (a > 0) == ((q + sigma) // 2 % 2 == 0), (q, a)


def test_jones_at_one_and_i():
    for name in link_names():
        d = get_link(name)
        if d.m > 10:
            continue
        j = jones(d)
        assert j(1) == 2 ** (d.components - 1)
        assert j.abs_at_t_minus_one() == determinant(d) if d.is_connected() or d.m == 0 else True


def test_laurent_arithmetic():
    x = LaurentPoly.monomial(1)
    one = LaurentPoly({0: 1})
    assert (x + one) * (x - one) == x ** 2 - one
    assert (x ** 2)(3) == 9
    assert LaurentPoly({Fraction(1, 2): 1}).terms == {Fraction(1, 2): 1}
    assert LaurentPoly({1: 0}) == LaurentPoly({})
    assert (x * x).to_json() == {"2": 1}
