"""Tests for PD parsing, crossing signs, resolutions and checkerboard colorings."""

import itertools
import random

import pytest

from oddkh_lab import get_link, link_names
from oddkh_lab.diagram import (
    checkerboard_coloring,
    crossing_signs,
    faces,
    mirror,
    parse_pd,
    resolve,
    with_arrows,
)
from oddkh_lab.errors import DisconnectedDiagram, EdgeCountError, MalformedToken, OrientationError

SMALL = ["unknot_kink", "hopf", "hopf_positive", "trefoil", "trefoil_left", "figure_eight",
         "T(2,4)", "T(2,5)", "granny", "square"]


@pytest.mark.parametrize("text, m, comps", [
    ("X[1,2,2,1]", 1, 1),
    ("X[1,4,2,3] X[3,2,4,1]", 2, 2),
    ("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]", 3, 1),
    ("", 0, 1),
])
def test_parse_counts(text, m, comps):
    d = parse_pd(text)
    assert d.m == m
    assert d.components == comps


def test_parse_round_trip():
    for name in link_names():
        d = get_link(name)
        again = parse_pd(d.to_pd())
        assert again.to_pd() == d.to_pd()
        assert crossing_signs(again) == crossing_signs(d)


@pytest.mark.parametrize("text, exc", [
    ("X[1,2,2]", MalformedToken),
    ("Y[1,2,2,1]", MalformedToken),
    ("X[1,2,3,4]", EdgeCountError),
    ("X[1,1,2,2] X[2,3,3,4]", EdgeCountError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_pd(text)


def test_orientation_error():
    # edge 1 enters both crossings as the incoming under-strand
    with pytest.raises(OrientationError):
        parse_pd("X[1,2,3,4] X[1,4,3,2]")


@pytest.mark.parametrize("name, signs", [
    ("unknot", (0, 0)),
    ("trefoil", (3, 0)),
    ("trefoil_left", (0, 3)),
    ("figure_eight", (2, 2)),
    ("hopf", (0, 2)),
    ("hopf_positive", (2, 0)),
    ("T(3,5)", (10, 0)),
])
def test_crossing_signs(name, signs):
    assert crossing_signs(get_link(name)) == signs


def test_mirror_swaps_signs():
    for name in SMALL:
        d = get_link(name)
        n_plus, n_minus = crossing_signs(d)
        assert crossing_signs(mirror(d)) == (n_minus, n_plus)
        assert mirror(mirror(d)).to_pd() == d.to_pd()


def test_trefoil_resolutions():
    d = get_link("trefoil")
    r0 = resolve(d, (0, 0, 0))
    r1 = resolve(d, (1, 1, 1))
    assert {r0.n_circles, r1.n_circles} == {2, 3}
    assert len(r0.arcs) == len(r1.arcs) == 3


def test_kink_resolutions():
    d = parse_pd("X[1,2,2,1]")
    counts = sorted(resolve(d, (b,)).n_circles for b in (0, 1))
    assert counts == [1, 2]
    for b in (0, 1):
        r = resolve(d, (b,))
        assert len(r.arcs) == 1
        assert r.graph_components() == 1


@pytest.mark.parametrize("name", SMALL)
def test_adjacent_vertices_change_by_one_circle(name):
    d = get_link(name)
    for v in itertools.product((0, 1), repeat=d.m):
        r = resolve(d, v)
        assert r.n_circles >= 1
        for a in r.arcs:
            assert 0 <= a.start < r.n_circles and 0 <= a.end < r.n_circles
        for j in range(d.m):
            if v[j]:
                continue
            w = v[:j] + (1,) + v[j + 1:]
            assert abs(resolve(d, w).n_circles - r.n_circles) == 1


def test_arrow_flip_reverses_arcs():
    d = get_link("figure_eight")
    flipped = with_arrows(d, [True, False, True, False])
    for v in itertools.product((0, 1), repeat=4):
        a = resolve(d, v).arcs
        b = resolve(flipped, v).arcs
        for j, (x, y) in enumerate(zip(a, b)):
            if j in (0, 2):
                assert (x.start, x.end) == (y.end, y.start)
            else:
                assert (x.start, x.end) == (y.start, y.end)


def _brute_force_colorings(d):
    fs = faces(d)
    valid = []
    for bits in itertools.product((False, True), repeat=len(fs)):
        ok = True
        for c in range(d.m):
            n = sum(sum(1 for corner in f if corner // 4 == c) for f, b in zip(fs, bits) if b)
            if n != 1:
                ok = False
                break
        if ok:
            valid.append(bits)
    return fs, valid


@pytest.mark.parametrize("name", ["unknot_kink", "hopf", "trefoil", "figure_eight", "T(2,5)", "T(3,4)"])
def test_checkerboard_coloring_valid(name):
    d = get_link(name)
    col = checkerboard_coloring(d)
    assert col.is_valid()
    assert all(col.black_corners(c) == 1 for c in range(d.m))
    fs, valid = _brute_force_colorings(d)
    assert valid, "brute force found no coloring"
    assert tuple(col.black) in valid


def test_checkerboard_coloring_agrees_with_brute_force():
    # a coloring exists exactly when brute force over all face subsets finds one
    for name in link_names():
        d = get_link(name)
        if not d.m or not d.is_connected() or d.m > 10:
            continue
        _, valid = _brute_force_colorings(d)
        if valid:
            col = checkerboard_coloring(d)
            assert col.is_valid(), name
            assert tuple(col.black) in valid
        else:
            with pytest.raises(DisconnectedDiagram):
                checkerboard_coloring(d)


def test_coloring_rejects_empty_and_split():
    with pytest.raises(DisconnectedDiagram):
        checkerboard_coloring(parse_pd(""))
    split = parse_pd("X[1,1,2,2] X[3,3,4,4]")
    assert not split.is_connected()
    with pytest.raises(DisconnectedDiagram):
        checkerboard_coloring(split)


def test_faces_euler_characteristic():
    # a connected diagram with m > 0 crossings has m + 2 faces
    for name in link_names():
        d = get_link(name)
        if d.m and d.is_connected():
            assert len(faces(d)) == d.m + 2, name


def test_random_arrow_flips_keep_circle_counts():
    rng = random.Random(3)
    d = get_link("T(2,5)")
    for _ in range(5):
        flips = [rng.random() < 0.5 for _ in range(d.m)]
        e = with_arrows(d, flips)
        for v in itertools.product((0, 1), repeat=d.m):
            assert resolve(e, v).n_circles == resolve(d, v).n_circles
