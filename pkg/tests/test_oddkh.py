"""Tests for the odd Khovanov complex, edge assignments and homology tables.

Oracles: wedge products against sympy minors, edge assignments against
exhaustive search over all signs on small cubes, graded Euler
characteristics against the Kauffman bracket, and homology invariance
under reseeding and arrow reversal.
"""

import itertools
import random
import warnings

import pytest
import sympy

from oddkh_lab import get_link, jones
from oddkh_lab.corpus import braid_closure_pd
from oddkh_lab.diagram import mirror, parse_pd, resolve, with_arrows
from oddkh_lab.errors import GradingNotIntegral
from oddkh_lab.oddkh import (
    FaceType,
    OddKhTable,
    _Cube,
    _faces,
    _squares_to_zero,
    build_complex,
    delta_sharp,
    exhaustive_edge_assignments,
    face_type,
    graded_euler,
    pre_differential,
    quasi_alternating_ranks,
    reduced_odd_khovanov,
    solve_edge_assignment,
    table_to_json,
    unreduced_from_reduced,
    vertex_space,
    wedge,
)

SMALL_DIAGRAMS = {
    "kink": "X[1,2,2,1]",
    "kink_other": "X[1,1,2,2]",
    "hopf": "X[1,4,2,3] X[3,2,4,1]",
    "hopf_positive": "X[1,3,2,4] X[3,1,4,2]",
    "two_kinks": "X[1,2,2,3] X[3,4,4,1]",
    "unknot_r2": braid_closure_pd([1, -1]),
    "trefoil": "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]",
    "trefoil_left": "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]",
    "braid_1_1_m1": braid_closure_pd([1, 1, -1]),
    # closures of 3-braids with type X / type Y faces
    "braid_1_m1_2": braid_closure_pd([1, -1, 2], 3),
    "braid_1_2_m2": braid_closure_pd([1, 2, -2], 3),
}


def all_arrow_variants(d):
    for flips in itertools.product((False, True), repeat=d.m):
        yield with_arrows(d, flips)


# ---------------------------------------------------------------------------
# Exterior algebra and vertex spaces
# ---------------------------------------------------------------------------


def test_wedge_signs():
    assert wedge([]) == {0: 1}
    assert wedge([{0: 1}, {1: 1}]) == {0b11: 1}
    assert wedge([{1: 1}, {0: 1}]) == {0b11: -1}
    assert wedge([{0: 1}, {0: 1}]) == {}
    assert wedge([{0: 2, 1: 1}, {0: 1, 1: 1}]) == {0b11: 1}


def test_wedge_matches_minors():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(1, 5)
        r = rng.randint(1, n)
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(r)]
        got = wedge([{i: x for i, x in enumerate(row) if x} for row in rows])
        m = sympy.Matrix(rows)
        for cols in itertools.combinations(range(n), r):
            mask = sum(1 << c for c in cols)
            assert got.get(mask, 0) == int(m.extract(list(range(r)), list(cols)).det())


def test_vertex_space_trivial():
    sv = vertex_space(resolve(parse_pd(""), ()))
    assert sv.k == 0
    assert list(sv.generators()) == [0]


def test_vertex_space_rank_matches_resolution():
    for name in ["trefoil", "figure_eight", "hopf", "T(2,5)"]:
        d = get_link(name)
        for v in itertools.product((0, 1), repeat=d.m):
            r = resolve(d, v)
            sv = vertex_space(r)
            assert sv.k == r.rank == r.n_circles - 1
            for a in r.arcs:
                assert sv.arc_class(a.crossing) == sv.class_between(a.start, a.end)


def test_parallel_arcs_expand_to_single_basis_arc():
    d = get_link("trefoil")
    for v in itertools.product((0, 1), repeat=3):
        r = resolve(d, v)
        if r.n_circles != 2:
            continue
        sv = vertex_space(r)
        assert sv.k == 1
        joining = [a for a in r.arcs if a.start != a.end]
        first = min(joining, key=lambda a: a.crossing)
        assert sv.basis_arcs == (first.crossing,)
        for a in r.arcs:
            cls = sv.arc_class(a.crossing)
            if a.start == a.end:
                assert cls == {}
            else:
                assert cls == ({0: 1} if (a.start, a.end) == (first.start, first.end) else {0: -1})


def test_pre_differential_merge_and_split():
    d = get_link("trefoil")
    spaces = {v: vertex_space(resolve(d, v)) for v in itertools.product((0, 1), repeat=3)}
    seen = set()
    for v, sv in spaces.items():
        for j in range(3):
            if v[j]:
                continue
            w = v[:j] + (1,) + v[j + 1:]
            sw = spaces[w]
            if sw.n_circles < sv.n_circles:
                assert pre_differential(sv, sw, 0) == {0: 1}
                seen.add("merge")
            else:
                x = sw.arc_class(j)
                assert pre_differential(sv, sw, 0) == wedge([x])
                # wedging with a class already present gives zero
                images = [sw.arc_class(c) for c in sv.basis_arcs]
                for mask in sv.generators():
                    vecs = [images[i] for i in range(sv.k) if mask >> i & 1]
                    if vecs and wedge([x] + vecs) == {}:
                        assert pre_differential(sv, sw, mask) == {}
                        seen.add("zero")
                seen.add("split")
    assert seen >= {"merge", "split"}


def test_pre_differential_rejects_non_edges():
    d = get_link("trefoil")
    a = vertex_space(resolve(d, (0, 0, 0)))
    b = vertex_space(resolve(d, (1, 1, 0)))
    with pytest.raises(ValueError):
        pre_differential(a, b, 0)
    with pytest.raises(ValueError):
        pre_differential(b, a, 0)


# ---------------------------------------------------------------------------
# Faces and edge assignments
# ---------------------------------------------------------------------------


def test_face_types_flip_under_arc_reversal():
    found = {FaceType.X: 0, FaceType.Y: 0, FaceType.OTHER: 0}
    diagrams = [get_link("trefoil"), get_link("T(3,4)"),
                parse_pd(SMALL_DIAGRAMS["braid_1_m1_2"]), parse_pd(SMALL_DIAGRAMS["braid_1_2_m2"])]
    for d in diagrams:
        for v, i, j in itertools.islice(_faces(d.m), 400):
            bits = [(v >> c) & 1 for c in range(d.m)]
            r = resolve(d, bits)
            ft = face_type(r, i, j, d)
            found[ft] += 1
            flips = [c == i for c in range(d.m)]
            e = with_arrows(d, flips)
            ft2 = face_type(resolve(e, bits), i, j, e)
            if ft == FaceType.OTHER:
                assert ft2 == FaceType.OTHER
            else:
                assert ft2 != ft and ft2 != FaceType.OTHER
    assert all(found.values())


def test_face_other_for_disjoint_circles():
    d = get_link("T(2,5)")
    cube = _Cube(d)
    for v, i, j in _faces(d.m):
        r = cube.spaces[v].resolution
        a, b = r.arcs[i], r.arcs[j]
        circles = {a.start, a.end, b.start, b.end}
        if len(circles) == 4:
            assert face_type(r, i, j, d) == FaceType.OTHER


@pytest.mark.parametrize("key", sorted(SMALL_DIAGRAMS))
def test_solver_matches_exhaustive_search(key):
    base = parse_pd(SMALL_DIAGRAMS[key])
    assert base.m <= 3
    for d in all_arrow_variants(base):
        allowed = exhaustive_edge_assignments(d)
        assert allowed, "no valid assignment exists"
        keys = [tuple(sorted(b.items())) for b in allowed]
        for seed in (None, 1, 2, 3):
            a = solve_edge_assignment(d, seed=seed)
            assert tuple(sorted(a.bits.items())) in keys
        b = solve_edge_assignment(d, method="elimination")
        assert tuple(sorted(b.bits.items())) in keys


def test_exhaustive_assignments_all_give_same_homology():
    d = get_link("trefoil")
    allowed = exhaustive_edge_assignments(d)
    cube = _Cube(d)
    gens = {v: list(cube.spaces[v].generators()) for v in range(8)}
    for bits in allowed[:50]:
        assert _squares_to_zero(cube, bits, gens)
    # flipping a single edge sign breaks d^2 = 0 somewhere on the trefoil
    bits = dict(allowed[0])
    e = next(iter(bits))
    bits[e] ^= 1
    assert not _squares_to_zero(cube, bits, gens)


def test_edge_count_and_face_consumption():
    for name in ["trefoil", "figure_eight", "T(2,5)"]:
        d = get_link(name)
        a = solve_edge_assignment(d)
        assert len(a.bits) == d.m * 2 ** (d.m - 1)
        n_faces = d.m * (d.m - 1) // 2 * 2 ** (d.m - 2)
        assert a.stats["faces"] == n_faces
        assert (a.stats["type_x"] + a.stats["type_y"] + a.stats["fixed"]
                + a.stats["unconstrained"]) == n_faces


def test_no_faces_gives_plus_signs():
    a = solve_edge_assignment(parse_pd("X[1,2,2,1]"))
    assert all(b == 0 for b in a.bits.values())


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------


def test_build_complex_small():
    cx = build_complex(parse_pd(""))
    assert cx.generators == [((), 0, 0, 0)]
    kink = build_complex(parse_pd("X[1,2,2,1]"))
    assert len({g[0] for g in kink.generators}) == 2
    assert reduced_odd_khovanov(parse_pd("X[1,2,2,1]")).total_rank() == 1


def test_trefoil_complex_rank():
    d = get_link("trefoil")
    cx = build_complex(d)
    expected = sum(2 ** vertex_space(resolve(d, v)).k for v in itertools.product((0, 1), repeat=3))
    assert cx.total_rank() == expected == 15


def test_differential_preserves_q_and_raises_t():
    cx = build_complex(get_link("figure_eight"))
    for q, c in cx.summands.items():
        assert c.step == 1
        c.check()
    for v, mask, t, q in cx.generators:
        assert t == bin(v).count("1") - cx.n_minus


# ---------------------------------------------------------------------------
# Homology tables
# ---------------------------------------------------------------------------


def test_unknot_tables():
    for text in ("", "X[1,2,2,1]", "X[1,1,2,2]"):
        table = reduced_odd_khovanov(parse_pd(text))
        assert table.rows() == [(0, 0, 1, ())]
        assert table.delta_sharp_ranks() == (1, 0, 0, 0)
        assert graded_euler(table) == jones(parse_pd(text))


def test_trefoil_table():
    table = reduced_odd_khovanov(get_link("trefoil"))
    assert table.total_rank() == 3
    assert not table.has_torsion()
    assert table.delta_sharp_ranks() == (2, 0, 1, 0)
    assert (table.sigma, table.nu) == (2, 0)


def test_mirror_reverses_delta_sharp():
    for name in ["trefoil", "figure_eight", "T(2,5)", "hopf"]:
        d = get_link(name)
        a = reduced_odd_khovanov(d).delta_sharp_ranks()
        b = reduced_odd_khovanov(mirror(d)).delta_sharp_ranks()
        assert b == (a[0], a[3], a[2], a[1])


@pytest.mark.parametrize("name", ["hopf", "trefoil", "figure_eight", "T(2,4)", "T(2,5)", "T(3,4)",
                                  "granny", "square"])
def test_graded_euler_is_jones(name):
    d = get_link(name)
    assert graded_euler(reduced_odd_khovanov(d)) == jones(d)


def test_invariance_under_seed_and_arrows():
    rng = random.Random(1)
    for name in ["trefoil", "figure_eight", "T(2,5)", "T(3,4)"]:
        d = get_link(name)
        ref = reduced_odd_khovanov(d).groups
        for _ in range(4):
            flips = [rng.random() < 0.5 for _ in range(d.m)]
            e = with_arrows(d, flips)
            assert reduced_odd_khovanov(e, seed=rng.randrange(10 ** 6)).groups == ref


def test_threads_do_not_change_result():
    d = get_link("T(3,4)")
    assert reduced_odd_khovanov(d, threads=2).groups == reduced_odd_khovanov(d, threads=1).groups


def test_field_coefficients_dominate_free_rank():
    for name in ["T(3,4)", "figure_eight"]:
        d = get_link(name)
        z = reduced_odd_khovanov(d)
        f2 = reduced_odd_khovanov(d, characteristic=2)
        for key, (free, tors) in z.groups.items():
            assert f2.groups.get(key, (0, ()))[0] >= free


def test_delta_sharp_examples():
    assert delta_sharp(0, 0, 0, 0) == 0
    assert delta_sharp(0, 2, 2, 0) == 0
    assert delta_sharp(1, 2, 0, 0) == 2
    with pytest.raises(GradingNotIntegral):
        delta_sharp(0, 1, 0, 0)


@pytest.mark.parametrize("args, rank", [
    ((1, 1, 0), 1), ((1, 1, 2), 0),
    ((3, 1, 0), 2), ((3, 1, 2), 1),
    ((2, 2, 0), 2), ((2, 2, 2), 0),
])
def test_quasi_alternating_ranks(args, rank):
    assert quasi_alternating_ranks(*args) == rank


def test_quasi_alternating_ranks_rejects_bad_input():
    with pytest.raises(ValueError):
        quasi_alternating_ranks(0, 1, 0)
    with pytest.raises(ValueError):
        quasi_alternating_ranks(3, 1, 1)


def test_unreduced():
    unknot = unreduced_from_reduced(reduced_odd_khovanov(parse_pd("")))
    assert unknot.rows() == [(0, -1, 1, ()), (0, 1, 1, ())]
    assert unreduced_from_reduced(reduced_odd_khovanov(get_link("trefoil"))).total_rank() == 6
    assert unreduced_from_reduced(OddKhTable({})).groups == {}
    merged = unreduced_from_reduced(OddKhTable({(0, 0): (0, (2,)), (0, 2): (0, (3,))}))
    assert merged.groups[(0, 1)] == (0, (6,))


def test_split_diagram_has_no_delta_sharp():
    d = parse_pd("X[1,1,2,2] X[3,3,4,4]")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = reduced_odd_khovanov(d)
    assert caught
    assert table.sigma is None
    # two-component unlink: reduced rank 2, the unreduced unknot group
    assert table.rows() == [(0, -1, 1, ()), (0, 1, 1, ())]
    assert graded_euler(table) == jones(d)
    assert table_to_json(d, table)["det"] is None


def test_split_diagram_euler_characteristic():
    # trefoil next to a Hopf link: ranks multiply with the unreduced factor
    d = parse_pd("X[1,5,2,4] X[3,1,4,6] X[5,3,6,2] X[7,10,8,9] X[9,8,10,7]")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = reduced_odd_khovanov(d)
    assert graded_euler(table) == jones(d)
    assert table.total_rank() == 3 * 4


def test_json_schema():
    d = get_link("trefoil")
    table = reduced_odd_khovanov(d)
    out = table_to_json(d, table, link="trefoil")
    assert set(out) == {"link", "n_plus", "n_minus", "sigma", "nu", "det", "table", "jones"}
    assert out["det"] == 3
    assert sum(r["free"] for r in out["table"]) == 3
    assert all(set(r) == {"t", "q", "free", "torsion", "delta_sharp"} for r in out["table"])
    assert out["jones"] == jones(d).to_json()
