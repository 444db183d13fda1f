"""Classical invariants read off a diagram.

The Goeritz matrix of a checkerboard shading gives the signature and nullity
(through the Gordon-Litherland correction), the determinant and the first
homology of the branched double cover.  The Jones polynomial comes from the
Kauffman bracket state sum.

Signature convention: positive knots have positive signature, so the
right-handed trefoil has signature +2.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping

from .diagram import (
    SMOOTHING_MERGED_CORNERS,
    SMOOTHING_PAIRS,
    PlanarDiagram,
    _UnionFind,
    faces,
    oriented_vertex,
)
from .errors import DisconnectedDiagram
from .linalg import IntMatrix, smith_normal_form

__all__ = [
    "GoeritzData",
    "LaurentPoly",
    "goeritz",
    "signature_nullity",
    "determinant",
    "branched_h1",
    "jones",
    "kauffman_bracket",
    "state_circle_counts",
    "face_colors",
]


# ---------------------------------------------------------------------------
# Goeritz matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoeritzData:
    """Goeritz matrix of one checkerboard shading.

    Attributes
    ----------
    matrix : IntMatrix
        Symmetric, one row per white face except the first (which is deleted).
    correction : int
        Gordon-Litherland term mu; the signature is ``sign(matrix) - correction``.
    white_faces : tuple
        The white faces in row order, deleted face first.
    shading : int
        Which face color (0 or 1) is white.
    """

    matrix: IntMatrix
    correction: int
    white_faces: tuple[tuple[int, ...], ...]
    shading: int


def face_colors(d: PlanarDiagram) -> tuple[list[tuple[int, ...]], list[int]]:
    """Faces and their checkerboard colors (0/1); faces sharing an edge differ.

    Raises
    ------
    DisconnectedDiagram
        If the diagram is empty or split.
    """
    if d.m == 0 or not d.is_connected():
        raise DisconnectedDiagram("checkerboard shading needs a connected diagram with crossings")
    face_list = faces(d)
    face_of = {}
    for i, f in enumerate(face_list):
        for corner in f:
            face_of[corner] = i
    # slot p at crossing c borders corners p - 1 and p
    neighbours: dict[int, set] = {i: set() for i in range(len(face_list))}
    for c in range(d.m):
        for p in range(4):
            a, b = face_of[4 * c + (p - 1) % 4], face_of[4 * c + p]
            neighbours[a].add(b)
            neighbours[b].add(a)
    color = [-1] * len(face_list)
    color[0] = 0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in neighbours[i]:
            if color[j] < 0:
                color[j] = 1 - color[i]
                queue.append(j)
            elif color[j] == color[i]:  # pragma: no cover - planar diagrams are 2-colorable
                raise DisconnectedDiagram("diagram faces are not 2-colorable; is the PD code planar?")
    return face_list, color


def goeritz(d: PlanarDiagram, shading: int = 0) -> GoeritzData:
    """Goeritz matrix and Gordon-Litherland correction for one shading.

    Parameters
    ----------
    d : PlanarDiagram
        Non-empty connected diagram; the crossingless unknot is accepted and
        gives a 0x0 matrix.
    shading : {0, 1}
        Which face color is treated as white.

    Raises
    ------
    DisconnectedDiagram
        For split diagrams.
    """
    if d.m == 0:
        if d.components != 1:
            raise DisconnectedDiagram("crossingless diagram of a split link")
        return GoeritzData(IntMatrix(0, 0), 0, (), shading)
    face_list, color = face_colors(d)
    white = [i for i, col in enumerate(color) if col == shading]
    index = {f: k for k, f in enumerate(white)}
    face_of = {corner: i for i, f in enumerate(face_list) for corner in f}
    size = len(white)
    full = [[0] * size for _ in range(size)]
    correction = 0
    oriented = oriented_vertex(d)
    for c, crossing in enumerate(d.crossings):
        # opposite corners share a color; eta = +1 when the white ones are 1 and 3
        white_pair = (1, 3) if color[face_of[4 * c + 1]] == shading else (0, 2)
        eta = 1 if white_pair == (1, 3) else -1
        i, j = (index[face_of[4 * c + q]] for q in white_pair)
        if i != j:
            full[i][j] -= eta
            full[j][i] -= eta
        # type II: the oriented smoothing joins the two black corners
        if set(SMOOTHING_MERGED_CORNERS[oriented[c]]) != set(white_pair):
            correction += eta
    for i in range(size):
        full[i][i] = -sum(full[i][j] for j in range(size) if j != i)
    reduced = [row[1:] for row in full[1:]]
    matrix = IntMatrix.from_dense(reduced, size - 1) if size > 1 else IntMatrix(0, 0)
    return GoeritzData(matrix, correction, tuple(face_list[i] for i in white), shading)


def _signature_and_nullity(m: IntMatrix) -> tuple[int, int]:
    """Inertia of a symmetric integer matrix by exact congruence diagonalization."""
    a = [[Fraction(x) for x in row] for row in m.to_dense()]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j: the new diagonal entry is 2 a_ij != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            if a[i][piv] != 0:
                f = a[i][piv] / p
                for k in active:
                    a[i][k] -= f * a[piv][k]
                a[i][piv] = Fraction(0)
        for i in active:
            a[piv][i] = Fraction(0)
    return pos - neg, n - pos - neg


def signature_nullity(d: PlanarDiagram) -> tuple[int, int]:
    """Signature and nullity of the link.

    Examples
    --------
    >>> from oddkh_lab.diagram import parse_pd
    >>> signature_nullity(parse_pd("X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"))
    (2, 0)
    """
    data = goeritz(d)
    sig, null = _signature_and_nullity(data.matrix)
    return sig - data.correction, null


def determinant(d: PlanarDiagram) -> int:
    """|det| of the Goeritz matrix.

    Raises
    ------
    DisconnectedDiagram
        For split diagrams, whose determinant would be 0 by convention.
    """
    m = goeritz(d).matrix
    if m.rows == 0:
        return 1
    sf = smith_normal_form(m)
    if sf.rank < m.rows:
        return 0
    out = 1
    for f in sf.factors:
        out *= f
    return out


def branched_h1(d: PlanarDiagram) -> tuple[int, ...]:
    """Invariant factors of H_1 of the branched double cover.

    Cyclic factors are listed in divisibility order; each free summand
    appears as 0 at the end.

    Raises
    ------
    DisconnectedDiagram
        For split diagrams.
    """
    m = goeritz(d).matrix
    sf = smith_normal_form(m)
    return sf.torsion + (0,) * (m.rows - sf.rank)


# ---------------------------------------------------------------------------
# Laurent polynomials and the Jones polynomial
# ---------------------------------------------------------------------------


def _exp(e) -> int | Fraction:
    e = Fraction(e)
    return int(e) if e.denominator == 1 else e


class LaurentPoly:
    """Integer Laurent polynomial in x with integer or half-integer exponents."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable | None = None):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for e, c in items:
            e = _exp(e)
            acc[e] = acc.get(e, 0) + int(c)
        self._terms = {e: c for e, c in acc.items() if c}

    @classmethod
    def monomial(cls, exponent, coeff: int = 1) -> "LaurentPoly":
        return cls({exponent: coeff})

    @property
    def terms(self) -> dict:
        return dict(sorted(self._terms.items()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _exp(e1 + e2)
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers are only defined for monomials")
        out = LaurentPoly({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    def __call__(self, x: int):
        """Evaluate at an integer; half-integer exponents are allowed only at x = 1."""
        total = 0
        for e, c in self._terms.items():
            if isinstance(e, Fraction):
                if x != 1:
                    raise ValueError("half-integer exponent cannot be evaluated at %r" % x)
                total += c
            else:
                total += c * Fraction(x) ** e
        return int(total) if Fraction(total).denominator == 1 else total

    def abs_at_t_minus_one(self) -> int:
        """|J| at t = x^2 = -1, i.e. the modulus of J(i); exact in the Gaussian integers."""
        re = im = 0
        for e, c in self._terms.items():
            if isinstance(e, Fraction):
                raise ValueError("half-integer exponent cannot be evaluated at x = i")
            k = e % 4
            if k == 0:
                re += c
            elif k == 1:
                im += c
            elif k == 2:
                re -= c
            else:
                im -= c
        n = re * re + im * im
        r = isqrt(n)
        if r * r != n:
            raise ValueError("|J(i)| is not an integer")
        return r

    def abs_coefficient_sum(self) -> int:
        return sum(abs(c) for c in self._terms.values())

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in sorted(self._terms.items())}

    def __repr__(self) -> str:
        return "LaurentPoly(%s)" % self.terms

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            mono = "" if e == 0 else ("x" if e == 1 else "x^%s" % e)
            if mono and abs(c) == 1:
                coeff = "-" if c < 0 else ""
            else:
                coeff = str(c)
            parts.append(coeff + mono)
        return " + ".join(parts).replace("+ -", "- ")


def state_circle_counts(d: PlanarDiagram) -> list[int]:
    """Number of circles of every resolution, indexed by the vertex as an integer.

    Bit ``i`` of the index is the smoothing at crossing ``i``.
    """
    m = d.m
    if m == 0:
        return [max(d.components, 1)]
    other_end = d.other_end
    counts = []
    for index in range(1 << m):
        uf = _UnionFind(4 * m)
        for c in range(m):
            for p, q in SMOOTHING_PAIRS[(index >> c) & 1]:
                uf.union(4 * c + p, 4 * c + q)
        for s in range(4 * m):
            uf.union(s, other_end[s])
        counts.append(len({uf.find(s) for s in range(4 * m)}))
    return counts


def kauffman_bracket(d: PlanarDiagram) -> LaurentPoly:
    """Kauffman bracket in the variable A, normalized so a single circle is 1.

    The 0-smoothing of each crossing carries weight A, the 1-smoothing A^-1.
    """
    delta = LaurentPoly({2: -1, -2: -1})
    by_circles: dict[tuple[int, int], int] = {}
    for index, circles in enumerate(state_circle_counts(d)):
        ones = bin(index).count("1")
        key = (d.m - 2 * ones, circles)
        by_circles[key] = by_circles.get(key, 0) + 1
    total = LaurentPoly()
    for (a_exp, circles), count in by_circles.items():
        total = total + LaurentPoly({a_exp: count}) * delta ** (circles - 1)
    return total


def jones(d: PlanarDiagram) -> LaurentPoly:
    """Jones polynomial J(x) with J(unknot) = 1 and J(right trefoil) = x^2 + x^6 - x^8.

    Computed as the writhe-normalized Kauffman bracket ``(-A^3)^(-w) <D>``
    followed by the substitution ``A^-2 = -x``.
    """
    w = d.writhe()
    f = kauffman_bracket(d) * LaurentPoly({-3 * w: (-1) ** (w % 2)})
    out = {}
    for a_exp, c in f.terms.items():
        if a_exp % 2:
            raise ValueError("odd power of A in the normalized bracket")
        half = -a_exp // 2
        out[half] = c * (-1) ** (half % 2)
    return LaurentPoly(out)
