"""Reduced odd Khovanov homology from the cube of resolutions.

At a cube vertex v the resolution D_v has circles joined by one arc per
crossing.  The group V_v is the free group on arcs modulo the kernel of
"arc -> start circle minus end circle"; a spanning forest of the circle/arc
graph gives a basis.  The chain group is the exterior algebra on V_v, and
along a cube edge v -> w the pre-differential is

* merge (two circles become one): the map induced on exterior algebras by
  V_v -> V_w;
* split (one circle becomes two): ``x -> [x_vw] ^ x`` with ``x_vw`` the arc
  of the changing crossing.

Signs on cube edges are chosen so the differential squares to zero and the
ladybug faces follow the type X / type Y rule.  Monomials are bitmasks over
the basis indices; ``e_S ^ e_i`` picks up the sign ``(-1)^#{j in S : j > i}``.
"""

from __future__ import annotations

import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .diagram import (
    PlanarDiagram,
    Resolution,
    _UnionFind,
    arc_strands,
    crossing_signs,
    resolve,
)
from .errors import GradingNotIntegral, InconsistentSystem
from .goeritz import LaurentPoly, determinant, signature_nullity
from .linalg import IntChainComplex, IntMatrix, homology, invariant_factors, solve_gf2

__all__ = [
    "VertexSpace",
    "vertex_space",
    "pre_differential",
    "face_type",
    "FaceType",
    "EdgeAssignment",
    "solve_edge_assignment",
    "exhaustive_edge_assignments",
    "OddKhComplex",
    "build_complex",
    "OddKhTable",
    "reduced_odd_khovanov",
    "delta_sharp",
    "quasi_alternating_ranks",
    "graded_euler",
    "unreduced_from_reduced",
    "table_to_json",
]

Vector = dict  # basis index -> integer coefficient
Element = dict  # monomial bitmask -> integer coefficient


# ---------------------------------------------------------------------------
# Exterior algebra helpers
# ---------------------------------------------------------------------------


def _wedge_vector(elem: Element, vec: Vector) -> Element:
    """``elem ^ vec`` with vec on the right."""
    out: Element = {}
    get = out.get
    for mask, c in elem.items():
        for i, a in vec.items():
            bit = 1 << i
            if mask & bit:
                continue
            key = mask | bit
            val = get(key, 0) + (-c * a if (mask >> (i + 1)).bit_count() & 1 else c * a)
            if val:
                out[key] = val
            else:
                del out[key]
    return out


def wedge(vectors: Iterable[Vector]) -> Element:
    """Wedge product v_1 ^ ... ^ v_r as a combination of monomials."""
    elem: Element = {0: 1}
    for vec in vectors:
        elem = _wedge_vector(elem, vec)
        if not elem:
            break
    return elem


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _popcount(x: int) -> int:
    return x.bit_count()


# ---------------------------------------------------------------------------
# Vertex spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexSpace:
    """Arc basis of V_v for one resolution.

    Attributes
    ----------
    resolution : Resolution
    basis_arcs : tuple of int
        Crossing ids of the spanning-forest arcs, in basis order.  For split
        diagrams the basis also holds connectors ``-1, -2, ...`` joining the
        first piece to each further piece, so that V_v is always the
        augmentation kernel of rank ``#circles - 1``.
    connectors : tuple of (int, int)
        (start circle, end circle) of each connector.
    potentials : tuple of dict
        For each circle c a vector P(c) with P(start) - P(end) equal to the
        class of any arc start -> end.
    """

    resolution: Resolution
    basis_arcs: tuple[int, ...]
    potentials: tuple[Mapping[int, int], ...] = field(repr=False)
    connectors: tuple[tuple[int, int], ...] = ()

    @property
    def vertex(self) -> tuple[int, ...]:
        return self.resolution.vertex

    @property
    def k(self) -> int:
        return len(self.basis_arcs)

    @property
    def n_circles(self) -> int:
        return self.resolution.n_circles

    def class_between(self, start: int, end: int) -> Vector:
        """Class of an arc from circle ``start`` to circle ``end``."""
        out = dict(self.potentials[start])
        for i, c in self.potentials[end].items():
            val = out.get(i, 0) - c
            if val:
                out[i] = val
            else:
                del out[i]
        return out

    def arc_class(self, crossing: int) -> Vector:
        if crossing < 0:
            return self.class_between(*self.connectors[-crossing - 1])
        arc = self.resolution.arcs[crossing]
        return self.class_between(arc.start, arc.end)

    def generators(self) -> range:
        """Monomial bitmasks spanning the exterior algebra."""
        return range(1 << self.k)


def vertex_space(r: Resolution) -> VertexSpace:
    """Spanning-forest basis, taking arcs greedily in crossing order."""
    n = r.n_circles
    uf = _UnionFind(n)
    forest = []
    for arc in r.arcs:
        if uf.find(arc.start) != uf.find(arc.end):
            uf.union(arc.start, arc.end)
            forest.append(arc)
    # one connector per extra piece, anchored at the circle through the
    # piece's smallest edge label so that it is the same at every vertex
    anchors: dict[int, tuple[int, int]] = {}
    for c, edges in enumerate(r.circle_edges):
        root = uf.find(c)
        label = min(edges, default=0)
        if root not in anchors or label < anchors[root][0]:
            anchors[root] = (label, c)
    ends = sorted(anchors.values())
    connectors = tuple((ends[0][1], c) for _, c in ends[1:])
    edges = [(a.crossing, a.start, a.end) for a in forest]
    edges += [(-i - 1, a, b) for i, (a, b) in enumerate(connectors)]
    basis = tuple(e[0] for e in edges)
    adjacency: dict[int, list] = {c: [] for c in range(n)}
    for i, (_, start, end) in enumerate(edges):
        adjacency[start].append((end, i, -1))
        adjacency[end].append((start, i, +1))
    potentials: list = [None] * n
    for root in range(n):
        if potentials[root] is not None:
            continue
        potentials[root] = {}
        stack = [root]
        while stack:
            c = stack.pop()
            for nxt, i, sign in adjacency[c]:
                if potentials[nxt] is None:
                    # P(start) - P(end) = e_i along a forest arc start -> end
                    p = dict(potentials[c])
                    p[i] = p.get(i, 0) + sign
                    if not p[i]:
                        del p[i]
                    potentials[nxt] = p
                    stack.append(nxt)
    return VertexSpace(r, basis, tuple(potentials), connectors)


# ---------------------------------------------------------------------------
# Pre-differential and faces
# ---------------------------------------------------------------------------


def _edge_data(sv: VertexSpace, sw: VertexSpace, crossing: int):
    """Images of the v-basis arcs in V_w, and [x_vw] at w when the edge splits."""
    images = [sw.arc_class(c) for c in sv.basis_arcs]
    split = sw.n_circles > sv.n_circles
    x = sw.arc_class(crossing) if split else None
    return images, x


def _apply(images, x, mask: int) -> Element:
    vecs = [images[i] for i in _bits(mask)]
    if x is not None:
        vecs = [x] + vecs
    return wedge(vecs)


def pre_differential(sv: VertexSpace, sw: VertexSpace, mask: int) -> Element:
    """Image of the monomial ``mask`` of V_v under the unsigned edge map to w.

    The vertices must differ in one crossing, 0 at v and 1 at w.
    """
    diff = [i for i, (a, b) in enumerate(zip(sv.vertex, sw.vertex)) if a != b]
    if len(diff) != 1 or sv.vertex[diff[0]] != 0:
        raise ValueError("vertices do not span a cube edge v < w")
    images, x = _edge_data(sv, sw, diff[0])
    return _apply(images, x, mask)


class FaceType:
    X = "X"
    Y = "Y"
    OTHER = "other"


def face_type(res: Resolution, crossing_a: int, crossing_b: int, d: PlanarDiagram) -> str:
    """Classify the 2-face spanned by two crossings resolved 0 at ``res``.

    A face is a ladybug face (type X or Y) when both arcs have all four
    endpoints on one circle, interleaved.  Walking that circle with arc a on
    the left, starting at a's start, the face is type X when b's start comes
    before b's end, and type Y otherwise.  Reversing either arc swaps X and Y.
    """
    arcs = res.arcs
    a, b = arcs[crossing_a], arcs[crossing_b]
    if not (a.start == a.end == b.start == b.end):
        return FaceType.OTHER
    circle = res.circles[a.start]
    bit_a = res.vertex[crossing_a]
    bit_b = res.vertex[crossing_b]
    sa = arc_strands(d.crossings[crossing_a], bit_a)
    sb = arc_strands(d.crossings[crossing_b], bit_b)

    def locate(crossing, strand):
        key = frozenset(strand)
        for idx, psg in enumerate(circle):
            if psg.crossing == crossing and psg.strand == key:
                return idx, psg
        raise AssertionError("arc endpoint not on its circle")  # pragma: no cover

    ia_s, pa = locate(crossing_a, sa[0])
    ia_e, _ = locate(crossing_a, sa[1])
    ib_s, _ = locate(crossing_b, sb[0])
    ib_e, _ = locate(crossing_b, sb[1])
    n = len(circle)
    forward = pa.arc_on_left

    def steps(i):  # distance from a's start in the chosen direction
        return ((i - ia_s) if forward else (ia_s - i)) % n

    da_e, db_s, db_e = steps(ia_e), steps(ib_s), steps(ib_e)
    inside = [x < da_e for x in (db_s, db_e)]
    if inside[0] == inside[1]:
        return FaceType.OTHER  # not interleaved
    return FaceType.X if db_s < db_e else FaceType.Y


# ---------------------------------------------------------------------------
# Edge assignment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeAssignment:
    """Signs on cube edges, stored as F_2 exponents.

    ``bits[(v, i)]`` is 1 when the edge leaving vertex v (an integer with
    bit i clear) in direction i carries the sign -1.  ``type_x_sign`` is the
    common value of the sign product around type X faces.
    """

    m: int
    bits: Mapping[tuple[int, int], int] = field(repr=False)
    type_x_sign: int
    stats: Mapping[str, int] = field(default_factory=dict)

    def sign(self, v: int, i: int) -> int:
        return -1 if self.bits[(v, i)] else 1


def _faces(m: int):
    for i in range(m):
        for j in range(i + 1, m):
            both = (1 << i) | (1 << j)
            for v in range(1 << m):
                if not v & both:
                    yield v, i, j


def _edges(m: int):
    for i in range(m):
        for v in range(1 << m):
            if not v >> i & 1:
                yield v, i


class _Cube:
    """Vertex spaces and unsigned edge data for a diagram."""

    def __init__(self, d: PlanarDiagram):
        self.d = d
        self.m = d.m
        self.spaces = [
            vertex_space(resolve(d, [(index >> c) & 1 for c in range(d.m)]))
            for index in range(1 << d.m)
        ]
        self._edge_cache: dict = {}

    def edge(self, v: int, i: int):
        key = (v, i)
        data = self._edge_cache.get(key)
        if data is None:
            data = _edge_data(self.spaces[v], self.spaces[v | (1 << i)], i)
            self._edge_cache[key] = data
        return data

    def apply(self, v: int, i: int, elem: Element) -> Element:
        images, x = self.edge(v, i)
        out: Element = {}
        for mask, c in elem.items():
            for key, val in _apply(images, x, mask).items():
                s = out.get(key, 0) + c * val
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return out

    def face_constraint(self, v: int, i: int, j: int):
        """('X'|'Y', None), ('fixed', parity) or (None, None) for one face."""
        ftype = face_type(self.spaces[v].resolution, i, j, self.d)
        if ftype != FaceType.OTHER:
            return ftype, None
        u, t = v | (1 << i), v | (1 << j)
        for mask in sorted(self.spaces[v].generators(), key=lambda x: (_popcount(x), x)):
            via_u = self.apply(u, j, self.apply(v, i, {mask: 1}))
            via_t = self.apply(t, i, self.apply(v, j, {mask: 1}))
            if not via_u and not via_t:
                continue
            if via_u == via_t:
                return "fixed", 1  # the two signed paths must differ in sign
            if via_u == {key: -c for key, c in via_t.items()}:
                return "fixed", 0
            raise InconsistentSystem(
                "face (%d; %d, %d): compositions are not equal up to sign" % (v, i, j)
            )
        return None, None


def _collect_constraints(cube: _Cube) -> dict:
    return {face: cube.face_constraint(*face) for face in _faces(cube.m)}


def _required(kind, value, g: int):
    if kind == "fixed":
        return value
    if kind == FaceType.X:
        return g
    if kind == FaceType.Y:
        return g ^ 1
    return None


def _face_sum(bits, v, i, j):
    return bits[(v, i)] ^ bits[(v, j)] ^ bits[(v | (1 << i), j)] ^ bits[(v | (1 << j), i)]


def _gauge_solve(m: int, constraints: dict, g: int, rng: random.Random | None):
    """Fix signs on a spanning tree of the cube and propagate through faces.

    The edge in direction j at v is a tree edge when v has no 1 below j.
    Otherwise, with i the highest such bit and u = v - e_i, the face
    (u; i, j) determines it from edges handled earlier.  Faces without a
    constraint leave the edge free.
    """
    bits: dict = {}
    free = lambda: rng.randrange(2) if rng is not None else 0  # noqa: E731
    for j in range(m):
        low = (1 << j) - 1
        for v in sorted((v for v in range(1 << m) if not v >> j & 1), key=lambda x: (_popcount(x & low), x)):
            below = v & low
            if not below:
                bits[(v, j)] = free()
                continue
            i = below.bit_length() - 1
            u = v ^ (1 << i)
            kind, value = constraints[(u, i, j)]
            need = _required(kind, value, g)
            if need is None:
                bits[(v, j)] = free()
            else:
                bits[(v, j)] = need ^ bits[(u, i)] ^ bits[(u, j)] ^ bits[(u | (1 << j), i)]
    for (v, i, j), (kind, value) in constraints.items():
        need = _required(kind, value, g)
        if need is not None and _face_sum(bits, v, i, j) != need:
            return None
    return bits


def _elimination_solve(m: int, constraints: dict, g_fixed: int | None = None):
    """Generic F_2 elimination over all edge variables plus the type X sign."""
    edge_list = list(_edges(m))
    var = {e: n for n, e in enumerate(edge_list)}
    gvar = len(edge_list)
    equations = []
    for (v, i, j), (kind, value) in constraints.items():
        if kind is None:
            continue
        mask = 0
        for e in ((v, i), (v, j), (v | (1 << i), j), (v | (1 << j), i)):
            mask ^= 1 << var[e]
        if kind == "fixed":
            equations.append((mask, value))
        else:
            equations.append((mask | (1 << gvar), 0 if kind == FaceType.X else 1))
    if g_fixed is not None:
        equations.append((1 << gvar, g_fixed))
    sol = solve_gf2(equations, gvar + 1)
    return {e: sol[var[e]] for e in edge_list}, sol[gvar]


def solve_edge_assignment(d: PlanarDiagram, seed: int | None = None, method: str = "gauge",
                          _cube: _Cube | None = None) -> EdgeAssignment:
    """Find a valid edge assignment for the cube of a diagram.

    Parameters
    ----------
    d : PlanarDiagram
    seed : int, optional
        When given, the free variables (spanning-tree edges and
        unconstrained edges) are set randomly from this seed instead of 0.
    method : {"gauge", "elimination"}
        ``"gauge"`` fixes a spanning tree of the cube and back-substitutes
        through faces; ``"elimination"`` runs dense F_2 elimination on the
        whole system, practical only for small cubes.

    Raises
    ------
    InconsistentSystem
        If no assignment exists, which indicates a bug.
    """
    cube = _cube if _cube is not None else _Cube(d)
    m = d.m
    constraints = _collect_constraints(cube)
    stats = {
        "faces": len(constraints),
        "type_x": sum(1 for k, _ in constraints.values() if k == FaceType.X),
        "type_y": sum(1 for k, _ in constraints.values() if k == FaceType.Y),
        "fixed": sum(1 for k, _ in constraints.values() if k == "fixed"),
        "unconstrained": sum(1 for k, _ in constraints.values() if k is None),
    }
    if method == "elimination":
        bits, g = _elimination_solve(m, constraints)
        return EdgeAssignment(m, bits, g, stats)
    if method != "gauge":
        raise ValueError("unknown method %r" % method)
    rng = random.Random(seed) if seed is not None else None
    has_ladybug = stats["type_x"] + stats["type_y"] > 0
    g_choices = (0, 1) if has_ladybug else (0,)
    if rng is not None and has_ladybug:
        g_choices = tuple(rng.sample(g_choices, 2))
    for g in g_choices:
        bits = _gauge_solve(m, constraints, g, rng)
        if bits is not None:
            return EdgeAssignment(m, bits, g, stats)
    if stats["unconstrained"]:
        # free edges chosen greedily may clash with later faces; fall back
        bits, g = _elimination_solve(m, constraints)
        return EdgeAssignment(m, bits, g, stats)
    raise InconsistentSystem("no valid edge assignment found")


def exhaustive_edge_assignments(d: PlanarDiagram) -> list[dict]:
    """All valid assignments by brute force over every sign choice (tiny cubes only).

    Returns the list of ``bits`` dictionaries for which the differential
    squares to zero and the type X / type Y products are opposite constants.
    """
    cube = _Cube(d)
    m = d.m
    edge_list = list(_edges(m))
    if len(edge_list) > 16:
        raise ValueError("cube too large for exhaustive search")
    ladybugs = [
        (face, face_type(cube.spaces[face[0]].resolution, face[1], face[2], d))
        for face in _faces(m)
    ]
    ladybugs = [(f, t) for f, t in ladybugs if t != FaceType.OTHER]
    gens = {v: list(cube.spaces[v].generators()) for v in range(1 << m)}
    found = []
    for code in range(1 << len(edge_list)):
        bits = {e: (code >> n) & 1 for n, e in enumerate(edge_list)}
        products = {FaceType.X: set(), FaceType.Y: set()}
        for (v, i, j), t in ladybugs:
            products[t].add(_face_sum(bits, v, i, j))
        if any(len(s) > 1 for s in products.values()):
            continue
        if products[FaceType.X] and products[FaceType.Y] and products[FaceType.X] == products[FaceType.Y]:
            continue
        if _squares_to_zero(cube, bits, gens):
            found.append(bits)
    return found


def _squares_to_zero(cube: _Cube, bits, gens) -> bool:
    m = cube.m
    for v, i, j in _faces(m):
        u, t = v | (1 << i), v | (1 << j)
        s_u = (-1) ** (bits[(v, i)] ^ bits[(u, j)])
        s_t = (-1) ** (bits[(v, j)] ^ bits[(t, i)])
        for mask in gens[v]:
            a = cube.apply(u, j, cube.apply(v, i, {mask: 1}))
            b = cube.apply(t, i, cube.apply(v, j, {mask: 1}))
            total = dict((key, s_u * c) for key, c in a.items())
            for key, c in b.items():
                total[key] = total.get(key, 0) + s_t * c
            if any(total.values()):
                return False
    return True


# ---------------------------------------------------------------------------
# The complex
# ---------------------------------------------------------------------------


@dataclass
class OddKhComplex:
    """Reduced odd Khovanov cochain complex, split into quantum gradings.

    Attributes
    ----------
    generators : list of (vertex, mask, t, q)
    summands : dict
        q -> IntChainComplex in the homological grading t (differential
        raises t by one).
    index : dict
        (vertex, mask) -> (q, position within degree t of that summand)
    """

    diagram: PlanarDiagram
    n_plus: int
    n_minus: int
    assignment: EdgeAssignment | None
    generators: list
    summands: dict
    spaces: list = field(repr=False, default_factory=list)

    def total_rank(self) -> int:
        return len(self.generators)

    def check(self) -> None:
        for c in self.summands.values():
            c.check()

    def filtered(self, characteristic: int = 0):
        """The complex filtered by |v|, as input for the spectral sequence engine."""
        from .specseq import FilteredComplex

        order = []
        for q, c in sorted(self.summands.items()):
            for t in c.degrees():
                order.append((q, t))
        degrees, levels = [], []
        by_qt: dict = {}
        for (v, mask, t, q) in self.generators:
            by_qt.setdefault((q, t), []).append((v, mask))
        offsets = {}
        for q, t in order:
            offsets[(q, t)] = len(degrees)
            for v, mask in by_qt[(q, t)]:
                degrees.append(t)
                levels.append(_popcount(v))
        entries = {}
        for q, c in self.summands.items():
            for t, mat in c.differentials.items():
                src, dst = offsets[(q, t)], offsets[(q, t + 1)]
                for (r, col), val in mat.items():
                    entries[(dst + r, src + col)] = val
        return FilteredComplex.from_entries(degrees, levels, entries, characteristic=characteristic)


def build_complex(d: PlanarDiagram, seed: int | None = None, check: bool = True) -> OddKhComplex:
    """Assemble the signed cube complex.

    Parameters
    ----------
    d : PlanarDiagram
    seed : int, optional
        Randomizes the free choices of the edge assignment.
    check : bool
        Verify that the differential squares to zero.
    """
    n_plus, n_minus = crossing_signs(d)
    if d.m == 0:
        gens = [((), 0, 0, 0)]
        c = IntChainComplex({0: 1}, {}, step=1)
        return OddKhComplex(d, 0, 0, None, gens, {0: c})
    cube = _Cube(d)
    assignment = solve_edge_assignment(d, seed=seed, _cube=cube)
    m = d.m
    shift = n_plus - 2 * n_minus
    generators = []
    index = {}
    counts: dict = {}
    for v in range(1 << m):
        sv = cube.spaces[v]
        h = _popcount(v)
        t = h - n_minus
        for mask in sv.generators():
            q = sv.k - 2 * _popcount(mask) + shift + h
            pos = counts.get((q, t), 0)
            counts[(q, t)] = pos + 1
            index[(v, mask)] = (q, pos)
            generators.append((v, mask, t, q))
    entries: dict = {}
    for v, i in _edges(m):
        w = v | (1 << i)
        sign = assignment.sign(v, i)
        t = _popcount(v) - n_minus
        images, x = cube.edge(v, i)
        for mask in cube.spaces[v].generators():
            q, col = index[(v, mask)]
            block = entries.setdefault((q, t), {})
            for wmask, c in _apply(images, x, mask).items():
                q2, row = index[(w, wmask)]
                if q2 != q:  # pragma: no cover - gradings are preserved by construction
                    raise AssertionError("differential does not preserve q")
                block[(row, col)] = block.get((row, col), 0) + sign * c
    summands = {}
    for q in sorted({q for q, _ in counts}):
        ranks = {t: n for (qq, t), n in counts.items() if qq == q}
        diffs = {}
        for t in ranks:
            block = entries.get((q, t))
            if block:
                diffs[t] = IntMatrix(ranks.get(t + 1, 0), ranks[t], block)
        summands[q] = IntChainComplex(ranks, diffs, step=1)
    cx = OddKhComplex(d, n_plus, n_minus, assignment, generators, summands, cube.spaces)
    if check:
        cx.check()
    return cx


# ---------------------------------------------------------------------------
# Homology tables and gradings
# ---------------------------------------------------------------------------


def delta_sharp(t: int, q: int, sigma: int, nu: int) -> int:
    """The mod 4 grading (3q - 2t + sigma + nu) / 2.

    Raises
    ------
    GradingNotIntegral
        If 3q + sigma + nu is odd.
    """
    x = 3 * q - 2 * t + sigma + nu
    if x % 2:
        raise GradingNotIntegral(
            "3q + sigma + nu is odd at (t, q) = (%d, %d), sigma=%d, nu=%d" % (t, q, sigma, nu)
        )
    return (x // 2) % 4


def quasi_alternating_ranks(det: int, components: int, j: int) -> int:
    """Predicted rank in delta-sharp grading j (0 or 2) for a quasi-alternating link."""
    if det < 1 or components < 1:
        raise ValueError("det and components must be positive")
    if j not in (0, 2):
        raise ValueError("j must be 0 or 2")
    return (det + (-1) ** (j // 2) * 2 ** (components - 1)) // 2


@dataclass(frozen=True)
class OddKhTable:
    """Bigraded homology: (t, q) -> (free rank, torsion coefficients).

    With ``characteristic`` p > 0 the free rank is the F_p dimension and no
    torsion is recorded.  ``sigma`` and ``nu`` are None for split diagrams,
    in which case no delta-sharp grading is available.
    """

    groups: Mapping[tuple[int, int], tuple[int, tuple[int, ...]]]
    sigma: int | None = None
    nu: int | None = None
    characteristic: int = 0

    def total_rank(self) -> int:
        return sum(f for f, _ in self.groups.values())

    def has_torsion(self) -> bool:
        return any(tors for _, tors in self.groups.values())

    def delta_sharp_of(self, t: int, q: int) -> int | None:
        if self.sigma is None or self.nu is None:
            return None
        return delta_sharp(t, q, self.sigma, self.nu)

    def delta_sharp_ranks(self) -> tuple[int, int, int, int]:
        """Total free rank in each delta-sharp grading 0..3."""
        if self.sigma is None:
            raise GradingNotIntegral("delta-sharp grading needs signature and nullity")
        out = [0, 0, 0, 0]
        for (t, q), (free, _) in self.groups.items():
            out[delta_sharp(t, q, self.sigma, self.nu)] += free
        return tuple(out)  # type: ignore[return-value]

    def rows(self) -> list[tuple[int, int, int, tuple[int, ...]]]:
        return [(t, q, f, tors) for (t, q), (f, tors) in sorted(self.groups.items()) if f or tors]


def _homology_of_summand(args):
    q, c, characteristic = args
    return q, homology(c, characteristic=characteristic, check=False)


def reduced_odd_khovanov(d: PlanarDiagram, characteristic: int = 0, seed: int | None = None,
                         threads: int = 1, complex_: OddKhComplex | None = None) -> OddKhTable:
    """Reduced odd Khovanov homology with its delta-sharp grading.

    Parameters
    ----------
    d : PlanarDiagram
    characteristic : int
        0 for integral homology, a prime for field coefficients.
    seed : int, optional
        Randomizes the free choices of the edge assignment.
    threads : int
        Worker processes for the per-q homology computations; results are
        merged in a fixed order, so output does not depend on this.

    Raises
    ------
    GradingNotIntegral
        If the delta-sharp grading is not integral on the support.
    """
    cx = complex_ if complex_ is not None else build_complex(d, seed=seed)
    jobs = [(q, c, characteristic) for q, c in sorted(cx.summands.items())]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_homology_of_summand, jobs))
    else:
        results = [_homology_of_summand(j) for j in jobs]
    groups = {}
    for q, h in results:
        for t, (free, tors) in h.groups.items():
            if free or tors:
                groups[(t, q)] = (free, tors)
    sigma = nu = None
    if d.m == 0 or d.is_connected():
        sigma, nu = signature_nullity(d)
    else:
        warnings.warn("split diagram: signature unavailable, delta-sharp grading omitted")
    table = OddKhTable(dict(sorted(groups.items())), sigma, nu, characteristic)
    if sigma is not None:
        for t, q in table.groups:
            delta_sharp(t, q, sigma, nu)
    return table


def graded_euler(table: OddKhTable) -> LaurentPoly:
    """Sum of (-1)^t rank x^q over the table."""
    terms: dict = {}
    for (t, q), (free, _) in table.groups.items():
        terms[q] = terms.get(q, 0) + (-1) ** (t % 2) * free
    return LaurentPoly(terms)


def unreduced_from_reduced(table: OddKhTable) -> OddKhTable:
    """Unreduced table: each reduced group contributes at q - 1 and q + 1."""
    free: dict = {}
    tors: dict = {}
    for (t, q), (f, ts) in table.groups.items():
        for q2 in (q - 1, q + 1):
            free[(t, q2)] = free.get((t, q2), 0) + f
            tors.setdefault((t, q2), []).extend(ts)
    groups = {
        key: (free[key], tuple(x for x in invariant_factors(tors[key]) if x > 1))
        for key in sorted(free)
    }
    return OddKhTable(groups, table.sigma, table.nu, table.characteristic)


def table_to_json(d: PlanarDiagram, table: OddKhTable, link: str | None = None,
                  jones_poly: LaurentPoly | None = None) -> dict:
    """Schema-stable dictionary for JSON output."""
    n_plus, n_minus = crossing_signs(d)
    det = determinant(d) if table.sigma is not None else None
    rows = []
    for t, q, free, tors in table.rows():
        rows.append({
            "t": t,
            "q": q,
            "free": free,
            "torsion": list(tors),
            "delta_sharp": table.delta_sharp_of(t, q),
        })
    return {
        "link": link if link is not None else d.to_pd(),
        "n_plus": n_plus,
        "n_minus": n_minus,
        "sigma": table.sigma,
        "nu": table.nu,
        "det": det,
        "table": rows,
        "jones": (jones_poly if jones_poly is not None else graded_euler(table)).to_json(),
    }
