"""Composition of homology orientations, reduced to linear algebra.

An oriented triple is (A, B, C, mu) with mu an orientation of A + B + C.
Every space carries a fixed reference basis and mu is stored as a sign
relative to the concatenation in the order B, A, C.  Gluing two triples along
``f: A2 -> B1 + B2`` produces

    (A1, coker f, C1 + C2 + ker f, mu2 o mu1)

where the new sign is

    mu1 * mu2 * (-1)^s * sign det[f(S) | tau] * sign det[K | S]
    s = b1 a2 + b1 c2 + a2 c2 + (d^2 - d)/2,   d = rank f.

Here S spans a complement of ker f (so f(S) orients im f), tau lifts the
reference basis of coker f, and K is the reference basis of ker f.  All
choices other than the references cancel; ``compose`` can randomize them to
show it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch
from .fieldmat import Field

__all__ = [
    "OrientedTriple",
    "GluingMap",
    "Composite",
    "compose",
    "identity_triple",
    "unit_gluing",
    "check_unit_law",
    "AssociativityReport",
    "check_associativity",
    "random_triple",
    "random_gluing",
]

Q = Field(0)


@dataclass(frozen=True)
class OrientedTriple:
    """Dimensions of A, B, C and the sign of mu against the reference basis (B, A, C)."""

    a: int
    b: int
    c: int
    sign: int = 1

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("dimensions must be non-negative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass
class GluingMap:
    """Matrix of ``f12: A2 -> B1 + B2`` with rows split as (b1, b2)."""

    matrix: list
    b1: int
    b2: int
    a2: int

    def __post_init__(self):
        self.matrix = [[Fraction(x) for x in row] for row in self.matrix]
        if len(self.matrix) != self.b1 + self.b2:
            raise DimensionMismatch("gluing map has %d rows, expected b1 + b2 = %d"
                                    % (len(self.matrix), self.b1 + self.b2))
        if any(len(row) != self.a2 for row in self.matrix):
            raise DimensionMismatch("gluing map must have a2 = %d columns" % self.a2)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], b1: int, b2: int, a2: int) -> "GluingMap":
        return cls([list(r) for r in rows], b1, b2, a2)

    def apply(self, x: Sequence) -> list:
        return [sum((m * v for m, v in zip(row, x)), Fraction(0)) for row in self.matrix]

    @property
    def rank(self) -> int:
        return Q.rank(self.matrix) if self.matrix and self.a2 else 0


def _columns(m, ncols: int) -> list[list]:
    return [[row[j] for row in m] for j in range(ncols)]


def _from_columns(cols: Sequence[Sequence], nrows: int) -> list[list]:
    return [[c[i] for c in cols] for i in range(nrows)]


def _det_sign(cols: Sequence[Sequence]) -> int:
    """Sign of the determinant of the square matrix with the given columns."""
    n = len(cols)
    if n == 0:
        return 1
    d = Q.det(_from_columns(cols, n))
    if d == 0:
        raise ArithmeticError("basis change is singular")
    return 1 if d > 0 else -1


def _solve_columns(basis: Sequence[Sequence], targets: Sequence[Sequence], n: int) -> list[list]:
    """Coordinates of each target in terms of ``basis`` (columns of length n)."""
    mat = _from_columns(basis, n) if basis else [[] for _ in range(n)]
    out = []
    for t in targets:
        x = Q.solve(mat, t, len(basis))
        if x is None:
            raise ArithmeticError("vector is not in the span")
        out.append(x)
    return out


@dataclass
class Composite:
    """Result of gluing, with the data used to identify its spaces.

    Attributes
    ----------
    triple : OrientedTriple
    f : GluingMap
    image_basis : list
        Columns S in A2 whose images span im f.
    coker_lift : list
        Reference basis of coker f, as columns in B1 + B2.
    coker_proj : list
        Matrix B1 + B2 -> coker f in reference coordinates (kills im f).
    kernel : list
        Reference basis of ker f, as columns in A2.
    """

    triple: OrientedTriple
    f: GluingMap
    image_basis: list
    coker_lift: list
    coker_proj: list
    kernel: list

    def section(self, v: Sequence) -> list:
        """Some x in A2 with f x = v, for v in im f."""
        x = Q.solve(self.f.matrix, list(v), self.f.a2)
        if x is None:
            raise ArithmeticError("vector is not in the image")
        return x

    def to_coker(self, v: Sequence) -> list:
        return [sum((m * x for m, x in zip(row, v)), Fraction(0)) for row in self.coker_proj]


def _reference_data(f: GluingMap):
    """Deterministic image basis, cokernel lift/projection and kernel basis."""
    n, a2 = f.b1 + f.b2, f.a2
    cols = _columns(f.matrix, a2)
    image_basis, image = [], []
    for j, col in enumerate(cols):
        if Q.span_dim(image + [col]) > len(image):
            image.append(col)
            e = [Fraction(0)] * a2
            e[j] = Fraction(1)
            image_basis.append(e)
    lift = []
    for i in range(n):
        e = [Fraction(int(i == k)) for k in range(n)]
        if Q.span_dim(image + lift + [e]) > len(image) + len(lift):
            lift.append(e)
    kernel = Q.nullspace(f.matrix, a2) if n else [
        [Fraction(int(i == j)) for i in range(a2)] for j in range(a2)
    ]
    if not a2:
        kernel = []
    return image_basis, image, lift, kernel


def _projection(image: list, lift: list, n: int) -> list:
    """Rows of the map B -> coker in lift coordinates."""
    if not lift:
        return []
    full = _from_columns(image + lift, n)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(full)]
    red, _ = Q.rref(aug)
    inv = [row[n:] for row in red]
    return inv[len(image):]


def compose(t1: OrientedTriple, t2: OrientedTriple, f: GluingMap,
            rng: random.Random | None = None) -> Composite:
    """Glue ``t1`` then ``t2`` along ``f: A2 -> B1 + B2``.

    With ``rng`` the auxiliary choices (the spanning set S of a complement to
    ker f, the section of f on its image, and the lift of the cokernel) are
    randomized; the resulting sign must not change.
    """
    if f.b1 != t1.b or f.b2 != t2.b or f.a2 != t2.a:
        raise DimensionMismatch(
            "gluing map %dx%d with split (%d, %d) does not fit b1=%d, b2=%d, a2=%d"
            % (f.b1 + f.b2, f.a2, f.b1, f.b2, t1.b, t2.b, t2.a)
        )
    n, a2 = f.b1 + f.b2, f.a2
    image_basis, image, lift, kernel = _reference_data(f)
    d = len(image)
    s_cols = [list(col) for col in image_basis]
    tau = [list(col) for col in lift]
    if rng is not None and d:
        # S -> S M + K R; tau -> tau + (image) R'
        m = _random_invertible(rng, d)
        s_cols = [[sum(s_cols[k][i] * m[k][j] for k in range(d)) for i in range(a2)] for j in range(d)]
        for col in s_cols:
            for kv in kernel:
                c = rng.randint(-2, 2)
                for i in range(a2):
                    col[i] += c * kv[i]
        for col in tau:
            for iv in image:
                c = rng.randint(-2, 2)
                for i in range(n):
                    col[i] += c * iv[i]
    img_cols = [f.apply(s) for s in s_cols]
    s_beta = _det_sign(img_cols + tau)
    s_zeta = _det_sign(kernel + s_cols)
    b1, a2_, c2 = t1.b, t2.a, t2.c
    s = b1 * a2_ + b1 * c2 + a2_ * c2 + (d * d - d) // 2
    sign = t1.sign * t2.sign * (-1) ** s * s_beta * s_zeta
    triple = OrientedTriple(t1.a, n - d, t1.c + t2.c + a2 - d, sign)
    return Composite(triple, f, image_basis, lift, _projection(image, lift, n), kernel)


def _random_invertible(rng: random.Random, n: int) -> list:
    while True:
        m = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if Q.det(m) != 0:
            return m


def identity_triple(a: int) -> OrientedTriple:
    """The unit for a space of dimension ``a``: A = B of dim a, C = 0, sign (-1)^((a^2+a)/2)."""
    if a < 0:
        raise ValueError("dimension must be non-negative")
    return OrientedTriple(a, a, 0, (-1) ** ((a * a + a) // 2))


def unit_gluing(t: OrientedTriple, p: Sequence[Sequence], side: str) -> GluingMap:
    """Gluing map pairing ``t`` with an identity triple via the convention x -> (x, -x).

    ``side="right"`` glues the unit first (unit then t): f = [I; -P] with P: A_t -> B_t.
    ``side="left"`` glues t first (t then unit): f = [P; -I] with P: B_unit -> B_t.
    """
    p = [[Fraction(x) for x in row] for row in p]
    if side == "right":
        a = t.a
        if len(p) != t.b or any(len(r) != a for r in p):
            raise DimensionMismatch("P must be b x a")
        rows = [[Fraction(int(i == j)) for j in range(a)] for i in range(a)] + [[-x for x in r] for r in p]
        return GluingMap(rows, a, t.b, a)
    if side == "left":
        a = len(p[0]) if p else 0
        if len(p) != t.b:
            raise DimensionMismatch("P must have b rows")
        rows = [list(r) for r in p] + [[Fraction(-int(i == j)) for j in range(a)] for i in range(a)]
        return GluingMap(rows, t.b, a, a)
    raise ValueError("side must be 'left' or 'right'")


def check_unit_law(t: OrientedTriple, p: Sequence[Sequence], side: str,
                   rng: random.Random | None = None) -> bool:
    """Whether gluing ``t`` with a unit along the canonical map returns ``t``.

    The cokernel is identified with B_t by (b_1, b_2) -> b_2 + P b_1 (right)
    or b_1 + P b_2 (left), which kills the image of x -> (x, -x).
    """
    if side == "right":
        u = identity_triple(t.a)
        comp = compose(u, t, unit_gluing(t, p, side), rng)
        a = t.a
        ident = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(t.b)]
                 for i, row in enumerate(p)] if t.b else []
        ident = [[row[j] for j in range(a)] + row[a:] for row in ident]
    else:
        a = len(p[0]) if p else 0
        u = identity_triple(a)
        comp = compose(t, u, unit_gluing(t, p, side), rng)
        ident = [[Fraction(int(i == j)) for j in range(t.b)] + [Fraction(x) for x in row]
                 for i, row in enumerate(p)]
    out = comp.triple
    if out.dims != t.dims:
        return False
    # reference cokernel basis pushed to B_t
    images = [[sum((r[k] * col[k] for k in range(len(col))), Fraction(0)) for r in ident]
              for col in comp.coker_lift]
    return out.sign * _det_sign(images) == t.sign


# ---------------------------------------------------------------------------
# Associativity
# ---------------------------------------------------------------------------


@dataclass
class AssociativityReport:
    left: OrientedTriple
    right: OrientedTriple
    transported_sign: int
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.left.dims == self.right.dims and self.transported_sign == self.right.sign


def _split_apply(f: GluingMap, x: Sequence) -> tuple[list, list]:
    y = f.apply(x)
    return y[: f.b1], y[f.b1:]


def induced_maps(c12: Composite, c23: Composite) -> tuple[GluingMap, GluingMap]:
    """The maps ``f12,3: A3 -> coker f12 + B3`` and ``f1,23: A2 -> B1 + coker f23``."""
    f12, f23 = c12.f, c23.f
    b1, b2, b3 = f12.b1, f12.b2, f23.b2
    a2, a3 = f12.a2, f23.a2
    z1 = [Fraction(0)] * b1
    z3 = [Fraction(0)] * b3
    cols = []
    for j in range(a3):
        e = [Fraction(int(i == j)) for i in range(a3)]
        x2, x3 = _split_apply(f23, e)
        cols.append(c12.to_coker(z1 + x2) + x3)
    f12_3 = GluingMap(_from_columns(cols, c12.triple.b + b3), c12.triple.b, b3, a3)
    cols = []
    for j in range(a2):
        e = [Fraction(int(i == j)) for i in range(a2)]
        y1, y2 = _split_apply(f12, e)
        cols.append(y1 + c23.to_coker(y2 + z3))
    f1_23 = GluingMap(_from_columns(cols, b1 + c23.triple.b), b1, c23.triple.b, a2)
    return f12_3, f1_23


def check_associativity(t1: OrientedTriple, t2: OrientedTriple, t3: OrientedTriple,
                        f12: GluingMap, f23: GluingMap,
                        rng: random.Random | None = None) -> AssociativityReport:
    """Compare (t3 o (t2 o t1)) with ((t3 o t2) o t1) under the canonical identifications.

    Both sides live on A1, coker f and C1 + C2 + C3 + ker f where
    f = f12 + f23 : A2 + A3 -> B1 + B2 + B3.  The cokernels are identified
    through B1 + B2 + B3 and the kernels through the sections a -> (-b, a)
    and a -> (a, -c); the left sign is transported along these maps and
    the C3 block is moved past ker f12.
    """
    if f12.b2 != f23.b1 or f12.a2 != t2.a or f23.a2 != t3.a:
        raise DimensionMismatch("gluing maps do not chain")
    c12 = compose(t1, t2, f12, rng)
    c23 = compose(t2, t3, f23, rng)
    f12_3, f1_23 = induced_maps(c12, c23)
    left = compose(c12.triple, t3, f12_3, rng)
    right = compose(t1, c23.triple, f1_23, rng)
    b1, b2, b3 = f12.b1, f12.b2, f23.b2
    a2, a3 = f12.a2, f23.a2

    # cokernels: lift the left reference basis to B1+B2+B3, read it in right coordinates
    bl = c12.triple.b
    m_cok = []
    for col in left.coker_lift:
        u, x3 = col[:bl], col[bl:]
        x12 = [sum((c12.coker_lift[k][i] * u[k] for k in range(bl)), Fraction(0)) for i in range(b1 + b2)]
        z1, z2 = x12[:b1], x12[b1:]
        m_cok.append(right.to_coker(z1 + c23.to_coker(z2 + x3)))
    cok_sign = _det_sign(m_cok)

    # kernels as subspaces of A2 + A3
    za2 = [Fraction(0)] * a2
    za3 = [Fraction(0)] * a3
    lhs = [list(k) + za3 for k in c12.kernel]
    for a in left.kernel:
        x2, _ = _split_apply(f23, a)
        b = c12.section([Fraction(0)] * b1 + x2)
        lhs.append([-x for x in b] + list(a))
    rhs = [za2 + list(k) for k in c23.kernel]
    for a in right.kernel:
        _, y2 = _split_apply(f12, a)
        c = c23.section(y2 + [Fraction(0)] * b3)
        rhs.append(list(a) + [-x for x in c])
    ker_sign = _det_sign(_solve_columns(rhs, lhs, a2 + a3)) if lhs else 1
    if len(lhs) != len(rhs):
        raise ArithmeticError("kernel dimensions disagree")

    k12 = len(c12.kernel)
    transported = left.triple.sign * (-1) ** (k12 * t3.c) * cok_sign * ker_sign
    return AssociativityReport(left.triple, right.triple, transported,
                               {"coker_sign": cok_sign, "kernel_sign": ker_sign,
                                "f12_3": f12_3.matrix, "f1_23": f1_23.matrix})


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_triple(rng: random.Random, max_dim: int = 3, a: int | None = None, b: int | None = None) -> OrientedTriple:
    return OrientedTriple(
        rng.randint(0, max_dim) if a is None else a,
        rng.randint(0, max_dim) if b is None else b,
        rng.randint(0, max_dim),
        rng.choice((1, -1)),
    )


def random_gluing(rng: random.Random, b1: int, b2: int, a2: int, lo: int = -2, hi: int = 2) -> GluingMap:
    return GluingMap([[rng.randint(lo, hi) for _ in range(a2)] for _ in range(b1 + b2)], b1, b2, a2)
