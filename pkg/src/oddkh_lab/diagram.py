"""
Planar diagrams
===============

Oriented link diagrams given in PD notation, their resolutions and the
"one black region per crossing" coloring.

Conventions
-----------
A crossing ``X[a,b,c,d]`` lists its four incident edges counterclockwise,
starting with the incoming under-strand.  Positions are numbered 0..3 in
that order; the under-strand runs 0 -> 2 and the over-strand joins 1 and 3.
Corner ``q`` of a crossing is the wedge between positions ``q`` and ``q+1``.

The 0-resolution joins positions {0,1} and {2,3}; the 1-resolution joins
{1,2} and {3,0}.  The 0-resolution is the Kauffman A-smoothing, and for a
positive crossing it is the oriented smoothing.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    DisconnectedDiagram,
    EdgeCountError,
    MalformedToken,
    OrientationError,
)

__all__ = [
    "Arc",
    "CheckerboardColoring",
    "Crossing",
    "PlanarDiagram",
    "Resolution",
    "checkerboard_coloring",
    "crossing_signs",
    "faces",
    "mirror",
    "parse_pd",
    "resolve",
    "with_arrows",
]

_TOKEN = re.compile(r"X\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\](!?)")

SMOOTHING_PAIRS = {
    0: ((0, 1), (2, 3)),
    1: ((1, 2), (3, 0)),
}
# corners joined into one region by each smoothing
SMOOTHING_MERGED_CORNERS = {0: (1, 3), 1: (0, 2)}


@dataclass(frozen=True)
class Crossing:
    """One crossing: edge labels counterclockwise from the incoming under-strand.

    ``over_in`` is the position (1 or 3) where the over-strand enters.
    ``flipped`` reverses the default arrow decoration.
    """

    edges: tuple[int, int, int, int]
    over_in: int
    flipped: bool = False

    @property
    def sign(self) -> int:
        return 1 if self.over_in == 3 else -1

    def heads(self) -> tuple[int, int]:
        """Positions at which strands enter the crossing."""
        return (0, self.over_in)


@dataclass(frozen=True)
class PlanarDiagram:
    """A validated oriented link diagram.

    Use :func:`parse_pd` rather than constructing this directly.
    """

    crossings: tuple[Crossing, ...]
    components: int
    successor: tuple[tuple[int, int], ...] = ()
    other_end: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.crossings)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(sorted({e for c in self.crossings for e in c.edges}))

    def slot_edge(self, slot: int) -> int:
        return self.crossings[slot // 4].edges[slot % 4]

    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    def connected_pieces(self) -> int:
        """Number of connected components of the underlying 4-valent graph."""
        if not self.crossings:
            return 1
        seen = {0}
        queue = deque([0])
        while queue:
            c = queue.popleft()
            for p in range(4):
                nxt = self.other_end[4 * c + p] // 4
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        pieces = 1
        for start in range(self.m):
            if start in seen:
                continue
            pieces += 1
            seen.add(start)
            queue = deque([start])
            while queue:
                c = queue.popleft()
                for p in range(4):
                    nxt = self.other_end[4 * c + p] // 4
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
        return pieces

    def is_connected(self) -> bool:
        return self.connected_pieces() == 1

    def to_pd(self) -> str:
        return " ".join(
            "X[%d,%d,%d,%d]%s" % (*c.edges, "!" if c.flipped else "") for c in self.crossings
        )

    def __str__(self):
        return "PD with %d crossings: %s" % (self.m, self.to_pd())


def _tokenize(text: str) -> list[tuple[tuple[int, int, int, int], bool]]:
    out = []
    for raw_line in text.splitlines():
        line = raw_line.split("%", 1)[0]
        pos = 0
        while True:
            while pos < len(line) and (line[pos].isspace() or line[pos] == ","):
                pos += 1
            if pos >= len(line):
                break
            match = _TOKEN.match(line, pos)
            if match is None:
                bad = line[pos:].split()[0]
                raise MalformedToken("cannot parse token %r" % bad)
            labels = tuple(int(match.group(i)) for i in range(1, 5))
            if min(labels) <= 0:
                raise MalformedToken("edge labels must be positive: %r" % match.group(0))
            out.append((labels, bool(match.group(5))))
            pos = match.end()
    return out


def _infer_over_in(tuples, slots_of) -> list[int]:
    """Decide for every crossing whether the over-strand enters at 1 or 3.

    Each edge has one head (the slot where it enters a crossing) and one tail.
    Under-strand slots are fixed by the PD convention; over-strand slots are
    propagated along edges.  Components that never pass under anything fall
    back to the edge numbering.
    """
    m = len(tuples)
    over_in: list[int | None] = [None] * m

    def is_head(slot, assignment):
        c, p = divmod(slot, 4)
        if p == 0:
            return True
        if p == 2:
            return False
        if assignment[c] is None:
            return None
        return p == assignment[c]

    def propagate(queue):
        while queue:
            c = queue.popleft()
            for p in (1, 3):
                slot = 4 * c + p
                e = tuples[c][p]
                a, b = slots_of[e]
                other = b if a == slot else a
                mine = is_head(slot, over_in)
                theirs = is_head(other, over_in)
                if theirs is None:
                    oc, op = divmod(other, 4)
                    over_in[oc] = op if not mine else (4 - op)
                    queue.append(oc)
                elif theirs == mine:
                    raise OrientationError("edge %d has inconsistent orientation" % e)

    # seed from edges that touch an under-strand slot
    queue = deque()
    for e, (a, b) in slots_of.items():
        for slot, other in ((a, b), (b, a)):
            c, p = divmod(slot, 4)
            oc, op = divmod(other, 4)
            if p in (0, 2) and op in (1, 3) and over_in[oc] is None:
                # slot is head (p == 0) -> other is tail
                over_in[oc] = (4 - op) if p == 0 else op
                queue.append(oc)
    propagate(queue)

    for c in range(m):
        if over_in[c] is None:
            b, d = tuples[c][1], tuples[c][3]
            # orientation follows increasing labels: d -> b if b == d + 1
            if b == d + 1 or (d > b + 1):
                over_in[c] = 3
            else:
                over_in[c] = 1
            propagate(deque([c]))

    # final consistency pass over all edges
    for e, (a, b) in slots_of.items():
        if is_head(a, over_in) == is_head(b, over_in):
            raise OrientationError("edge %d has no consistent orientation" % e)
    return over_in  # type: ignore[return-value]


def _build(tuples, flips) -> PlanarDiagram:
    slots_of: dict[int, list[int]] = {}
    for c, labels in enumerate(tuples):
        for p, e in enumerate(labels):
            slots_of.setdefault(e, []).append(4 * c + p)
    for e, slots in slots_of.items():
        if len(slots) != 2:
            raise EdgeCountError("edge %d appears %d times (expected 2)" % (e, len(slots)))
    for c, labels in enumerate(tuples):
        if labels[0] == labels[2] and len(tuples) > 1:
            # an under-strand loop closing on itself is only possible in isolation
            pass

    over_in = _infer_over_in(tuples, slots_of)
    crossings = tuple(
        Crossing(edges=tuple(labels), over_in=over_in[c], flipped=flips[c])
        for c, labels in enumerate(tuples)
    )
    other_end = [0] * (4 * len(tuples))
    for a, b in slots_of.values():
        other_end[a] = b
        other_end[b] = a

    # successor along orientation: edge entering at (c, p) continues at (c, p + 2)
    succ = {}
    for c, cr in enumerate(crossings):
        for p in cr.heads():
            succ[cr.edges[p]] = cr.edges[(p + 2) % 4]
    seen: set[int] = set()
    components = 0
    for e in sorted(succ):
        if e in seen:
            continue
        components += 1
        x = e
        while x not in seen:
            seen.add(x)
            x = succ[x]
        if x != e:
            raise OrientationError("edge successor map is not a permutation")
    if len(seen) != len(slots_of):
        raise OrientationError("some edges are not reached by the orientation")
    if not tuples:
        components = 1
    return PlanarDiagram(
        crossings=crossings,
        components=components,
        successor=tuple(sorted(succ.items())),
        other_end=tuple(other_end),
    )


def parse_pd(text: str) -> PlanarDiagram:
    """Parse a PD code such as ``"X[1,4,2,3] X[3,2,4,1]"``.

    Whitespace or commas separate tokens, ``%`` starts a comment and a
    trailing ``!`` reverses that crossing's arrow.  The empty string is the
    crossingless unknot.

    Raises
    ------
    MalformedToken, EdgeCountError, OrientationError
    """
    tokens = _tokenize(text)
    return _build([t for t, _ in tokens], [f for _, f in tokens])


def from_tuples(tuples: Sequence[Sequence[int]], flips: Sequence[bool] | None = None) -> PlanarDiagram:
    tuples = [tuple(int(x) for x in t) for t in tuples]
    for t in tuples:
        if len(t) != 4:
            raise MalformedToken("crossing %r does not have four edges" % (t,))
    return _build(tuples, list(flips) if flips is not None else [False] * len(tuples))


def with_arrows(d: PlanarDiagram, flipped: Sequence[bool]) -> PlanarDiagram:
    """Same diagram with the given per-crossing arrow reversals."""
    if len(flipped) != d.m:
        raise ValueError("need one flag per crossing")
    crossings = tuple(
        Crossing(c.edges, c.over_in, bool(f)) for c, f in zip(d.crossings, flipped)
    )
    return PlanarDiagram(crossings, d.components, d.successor, d.other_end)


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Reflect the plane: ``X[a,b,c,d] -> X[a,d,c,b]``."""
    return from_tuples([(c.edges[0], c.edges[3], c.edges[2], c.edges[1]) for c in d.crossings])


def crossing_signs(d: PlanarDiagram) -> tuple[int, int]:
    """Return ``(n_plus, n_minus)``."""
    n_plus = sum(1 for c in d.crossings if c.sign > 0)
    return n_plus, d.m - n_plus


# ---------------------------------------------------------------------------
# Faces of the diagram
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _corner_uf(d: PlanarDiagram) -> _UnionFind:
    # corner (c, q) continues along the edge at (c, q + 1) to the corner
    # (c', q') where (c', q') is the far end of that edge
    uf = _UnionFind(4 * d.m)
    for c in range(d.m):
        for q in range(4):
            far = d.other_end[4 * c + (q + 1) % 4]
            uf.union(4 * c + q, far)
    return uf


def faces(d: PlanarDiagram) -> list[tuple[int, ...]]:
    """Faces of the diagram as sorted tuples of corner ids ``4*c + q``."""
    uf = _corner_uf(d)
    groups: dict[int, list[int]] = {}
    for corner in range(4 * d.m):
        groups.setdefault(uf.find(corner), []).append(corner)
    return sorted(tuple(sorted(g)) for g in groups.values())


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Directed arc at ``crossing`` from circle ``start`` to circle ``end``."""

    crossing: int
    start: int
    end: int


@dataclass(frozen=True)
class Passage:
    """One pass of a circle through a crossing, from position ``enter`` to ``leave``."""

    crossing: int
    enter: int
    leave: int

    @property
    def strand(self) -> frozenset:
        return frozenset((self.enter, self.leave))

    @property
    def arc_on_left(self) -> bool:
        return (self.enter + 1) % 4 == self.leave


@dataclass(frozen=True)
class Resolution:
    """The circles-and-arcs diagram at one cube vertex.

    ``circles`` holds, for each circle, its passages through crossings in
    traversal order; ``circle_edges`` the edge labels met along the way.
    Circles are sorted by their smallest edge label.
    """

    vertex: tuple[int, ...]
    circle_edges: tuple[tuple[int, ...], ...]
    circles: tuple[tuple[Passage, ...], ...]
    arcs: tuple[Arc, ...]
    slot_circle: tuple[int, ...] = field(repr=False, default=())

    @property
    def n_circles(self) -> int:
        return len(self.circles)

    def graph_components(self) -> int:
        uf = _UnionFind(self.n_circles)
        for a in self.arcs:
            uf.union(a.start, a.end)
        return len({uf.find(i) for i in range(self.n_circles)})

    @property
    def rank(self) -> int:
        """Rank of the arc space: #circles - #components of the circle/arc graph."""
        return self.n_circles - self.graph_components()


def arc_strands(crossing: Crossing, bit: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """(start strand, end strand) of the arc at a crossing in resolution ``bit``.

    The default 0-arc runs from the strand with the smaller incident edge label
    (ties broken by position) to the other one; a flipped crossing reverses it.
    The 1-arc is the 0-arc rotated a quarter turn counterclockwise.
    """
    s01, s23 = SMOOTHING_PAIRS[0]

    def key(strand):
        return (min(crossing.edges[p] for p in strand), min(strand))

    forward = key(s01) <= key(s23)
    if crossing.flipped:
        forward = not forward
    if bit == 0:
        return (s01, s23) if forward else (s23, s01)
    s12, s30 = SMOOTHING_PAIRS[1]
    return (s12, s30) if forward else (s30, s12)


def resolve(d: PlanarDiagram, v: Sequence[int]) -> Resolution:
    """Resolve every crossing according to the bit vector ``v``."""
    v = tuple(int(b) for b in v)
    if len(v) != d.m:
        raise ValueError("vertex has length %d, diagram has %d crossings" % (len(v), d.m))
    if d.m == 0:
        return Resolution(v, ((),), ((),), (), ())
    partner = [0] * (4 * d.m)
    for c, bit in enumerate(v):
        for p, q in SMOOTHING_PAIRS[bit]:
            partner[4 * c + p] = 4 * c + q
            partner[4 * c + q] = 4 * c + p

    slot_raw = [-1] * (4 * d.m)
    raw = []
    for s0 in range(4 * d.m):
        if slot_raw[s0] >= 0:
            continue
        idx = len(raw)
        passages, edges = [], []
        s = s0
        while True:
            s1 = partner[s]
            slot_raw[s] = slot_raw[s1] = idx
            passages.append(Passage(s // 4, s % 4, s1 % 4))
            edges.append(d.slot_edge(s1))
            s = d.other_end[s1]
            if s == s0:
                break
        raw.append((min(edges), passages, edges))

    order = sorted(range(len(raw)), key=lambda i: raw[i][0])
    relabel = {old: new for new, old in enumerate(order)}
    slot_circle = tuple(relabel[i] for i in slot_raw)
    circles = tuple(tuple(raw[i][1]) for i in order)
    circle_edges = tuple(tuple(raw[i][2]) for i in order)

    arcs = []
    for c, bit in enumerate(v):
        start, end = arc_strands(d.crossings[c], bit)
        arcs.append(Arc(c, slot_circle[4 * c + start[0]], slot_circle[4 * c + end[0]]))
    return Resolution(v, circle_edges, circles, tuple(arcs), slot_circle)


def oriented_vertex(d: PlanarDiagram) -> tuple[int, ...]:
    """Vertex whose resolution is the oriented (Seifert) smoothing."""
    return tuple(0 if c.sign > 0 else 1 for c in d.crossings)


# ---------------------------------------------------------------------------
# Coloring with one black region per crossing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckerboardColoring:
    """Faces of the diagram with a black/white bit each."""

    faces: tuple[tuple[int, ...], ...]
    black: tuple[bool, ...]

    def black_corners(self, crossing: int) -> int:
        count = 0
        for face, is_black in zip(self.faces, self.black):
            if is_black:
                count += sum(1 for corner in face if corner // 4 == crossing)
        return count

    def is_valid(self) -> bool:
        m = max((corner // 4 for f in self.faces for corner in f), default=-1) + 1
        return all(self.black_corners(c) == 1 for c in range(m))


def _infinity_face(face_list) -> tuple[int, ...]:
    return max(face_list, key=lambda f: (len(f), -f[0]))


def _seifert_coloring(d: PlanarDiagram, face_list, sign: int) -> tuple[bool, ...]:
    """Color the region directly inside each Seifert circle z when a_z * b_z == sign."""
    v = oriented_vertex(d)
    res = resolve(d, v)
    uf = _corner_uf(d)
    for c, bit in enumerate(v):
        a, b = SMOOTHING_MERGED_CORNERS[bit]
        uf.union(4 * c + a, 4 * c + b)

    # sides of each circle; every passage joins an incoming slot to an outgoing one
    circle_sides = []
    for passages in res.circles:
        psg = passages[0]
        heads = d.crossings[psg.crossing].heads()
        out = psg.enter if psg.leave in heads else psg.leave
        # outward along the link at slot p: left corner p, right corner p - 1
        left = uf.find(4 * psg.crossing + out)
        right = uf.find(4 * psg.crossing + (out - 1) % 4)
        circle_sides.append((left, right))

    root = uf.find(_infinity_face(face_list)[0])
    adjacency: dict[int, list[tuple[int, int]]] = {}
    for z, (left, right) in enumerate(circle_sides):
        adjacency.setdefault(left, []).append((z, right))
        adjacency.setdefault(right, []).append((z, left))
    depth = {root: 0}
    inner_of = {}
    queue = deque([root])
    while queue:
        region = queue.popleft()
        for z, nbr in adjacency.get(region, ()):
            if nbr in depth:
                continue
            depth[nbr] = depth[region] + 1
            inner_of[nbr] = z
            queue.append(nbr)

    black_regions = set()
    for region, z in inner_of.items():
        left, right = circle_sides[z]
        outer = right if left == region else left
        a_z = 1 if left == region else -1
        b_z = -1 if depth[outer] % 2 else 1
        if a_z * b_z == sign:
            black_regions.add(region)
    return tuple(uf.find(f[0]) in black_regions for f in face_list)


def _exact_cover_coloring(d: PlanarDiagram, face_list) -> tuple[bool, ...] | None:
    """Backtracking search for faces hitting every crossing exactly once."""
    touches = []
    for f in face_list:
        counts: dict[int, int] = {}
        for corner in f:
            counts[corner // 4] = counts.get(corner // 4, 0) + 1
        touches.append(counts)
    # a face meeting a crossing twice can never be black
    candidates = [
        [i for i, t in enumerate(touches) if t.get(c) == 1] for c in range(d.m)
    ]
    black = [False] * len(face_list)
    covered = [False] * d.m
    banned = [any(n > 1 for n in t.values()) for t in touches]

    def search() -> bool:
        best = None
        for c in range(d.m):
            if covered[c]:
                continue
            options = [
                i for i in candidates[c]
                if not banned[i] and not any(covered[x] for x in touches[i])
            ]
            if best is None or len(options) < len(best[1]):
                best = (c, options)
                if not options:
                    return False
        if best is None:
            return True
        for i in best[1]:
            black[i] = True
            for x in touches[i]:
                covered[x] = True
            if search():
                return True
            black[i] = False
            for x in touches[i]:
                covered[x] = False
        return False

    return tuple(black) if search() else None


def checkerboard_coloring(d: PlanarDiagram) -> CheckerboardColoring:
    """Color faces so that every crossing touches exactly one black region.

    First tries the Seifert-circle rule: each circle z of the oriented
    resolution gets ``a_z = +1`` when counterclockwise and ``b_z = (-1)^N``
    with N the number of circles around it, and the region directly inside z
    is black when ``a_z * b_z`` equals a fixed sign.  The largest face plays
    the role of the unbounded one.  That rule does not always produce a valid
    coloring (closures of 3-braids such as T(3,4) need the unbounded face to
    be black), so both signs are tried and an exact-cover search over faces
    is the fallback.

    Raises
    ------
    DisconnectedDiagram
        For the empty diagram, split diagrams, or when no valid coloring exists.
    """
    if d.m == 0 or not d.is_connected():
        raise DisconnectedDiagram("coloring needs a connected diagram with crossings")
    face_list = tuple(faces(d))
    for sign in (-1, 1):
        coloring = CheckerboardColoring(face_list, _seifert_coloring(d, face_list, sign))
        if coloring.is_valid():
            return coloring
    black = _exact_cover_coloring(d, face_list)
    if black is None:
        raise DisconnectedDiagram("no face coloring meets every crossing exactly once")
    return CheckerboardColoring(face_list, black)
