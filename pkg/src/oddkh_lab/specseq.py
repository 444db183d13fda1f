"""Spectral sequences of finitely filtered complexes over a field, and a
checker for the triangle detection lemma.

A filtered complex is a finite basis in which each vector has a degree and a
filtration level, with a differential that raises degree by one and never
lowers the level.  ``F^p`` is the span of basis vectors of level >= p and

    E^r_p = (Z^r_p + F^{p+1}) / (dB^r_p + F^{p+1}),
    Z^r_p = {x in F^p : dx in F^{p+r}},   dB^r_p = d(F^{p-r+1}) n F^p,

computed inside the level-p coordinates.  ``d^r`` sends the class of x to
the class of dx at level p + r.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import NotAComplex, NotFiltered
from .fieldmat import Field

__all__ = [
    "FilteredComplex",
    "Page",
    "page",
    "converged",
    "brute_force_page_dims",
    "random_filtered_complex",
    "TriangleInstance",
    "TriangleReport",
    "verify_triangle",
    "cone_triangle",
    "random_chain_map",
]


# ---------------------------------------------------------------------------
# Filtered complexes
# ---------------------------------------------------------------------------


@dataclass
class FilteredComplex:
    """Finite filtered cochain complex over Q or F_p.

    Attributes
    ----------
    degrees, levels : list of int
        Per basis vector.
    columns : list of dict
        ``columns[j]`` is the image of basis vector j as ``{i: coefficient}``.
    field : Field
    """

    degrees: list
    levels: list
    columns: list
    field: Field

    def __post_init__(self):
        n = len(self.degrees)
        if len(self.levels) != n or len(self.columns) != n:
            raise ValueError("degrees, levels and columns must have equal length")
        for j, col in enumerate(self.columns):
            for i in col:
                if self.levels[i] < self.levels[j]:
                    raise NotFiltered(
                        "differential lowers filtration: basis %d (level %d) -> %d (level %d)"
                        % (j, self.levels[j], i, self.levels[i])
                    )
                if self.degrees[i] != self.degrees[j] + 1:
                    raise ValueError("differential must raise degree by one")
        for j, col in enumerate(self.columns):
            if self._apply(col):
                raise NotAComplex("d o d is nonzero on basis vector %d" % j, degree=self.degrees[j])

    @classmethod
    def from_entries(cls, degrees: Sequence[int], levels: Sequence[int],
                     entries: Mapping[tuple[int, int], int], characteristic: int = 0) -> "FilteredComplex":
        """Build from ``{(row, col): value}`` entries of the differential."""
        f = Field(characteristic)
        cols: list = [dict() for _ in degrees]
        for (r, c), v in entries.items():
            v = f(v)
            if v:
                cols[c][r] = v
        return cls(list(degrees), list(levels), cols, f)

    @classmethod
    def from_dense(cls, degrees, levels, matrix, characteristic: int = 0) -> "FilteredComplex":
        entries = {(i, j): x for i, row in enumerate(matrix) for j, x in enumerate(row) if x}
        return cls.from_entries(degrees, levels, entries, characteristic)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def level_range(self) -> tuple[int, int]:
        if not self.levels:
            return (0, 0)
        return (min(self.levels), max(self.levels))

    def _apply(self, vec: Mapping[int, object]) -> dict:
        """d applied to a sparse vector."""
        p = self.field.p
        out: dict = {}
        for j, a in vec.items():
            for i, b in self.columns[j].items():
                out[i] = out.get(i, 0) + a * b
        if p:
            return {i: v % p for i, v in out.items() if v % p}
        return {i: v for i, v in out.items() if v}

    def homology_dims(self) -> dict[int, int]:
        """Dimensions of the total homology per degree."""
        f = self.field
        out = {}
        for deg in sorted(set(self.degrees)):
            src = [j for j, d in enumerate(self.degrees) if d == deg]
            tgt = [i for i, d in enumerate(self.degrees) if d == deg + 1]
            prev = [j for j, d in enumerate(self.degrees) if d == deg - 1]
            rank_out = _rank_of_columns(f, [self.columns[j] for j in src], tgt)
            rank_in = _rank_of_columns(f, [self.columns[j] for j in prev], src)
            out[deg] = len(src) - rank_out - rank_in
        return out


def _rank_of_columns(f: Field, cols, rows) -> int:
    if not cols or not rows:
        return 0
    pos = {r: k for k, r in enumerate(rows)}
    mat = [[f(0)] * len(rows) for _ in cols]
    for k, col in enumerate(cols):
        for i, v in col.items():
            mat[k][pos[i]] = v
    return f.rank(mat)


# ---------------------------------------------------------------------------
# Sparse echelon bookkeeping
# ---------------------------------------------------------------------------


class _Echelon:
    """Row echelon basis of a subspace, with labels tracking representatives."""

    def __init__(self, f: Field):
        self.f = f
        self.rows: dict = {}  # pivot coordinate -> (vector, label)

    def reduce(self, vec: dict, label: dict | None = None):
        f = self.f
        p = f.p
        vec = dict(vec)
        label = dict(label) if label else {}
        while vec:
            piv = min(vec)
            if piv not in self.rows:
                break
            row, rlabel = self.rows[piv]
            c = vec[piv]
            for i, v in row.items():
                x = vec.get(i, 0) - c * v
                if p:
                    x %= p
                if x:
                    vec[i] = x
                else:
                    vec.pop(i, None)
            for k, v in rlabel.items():
                x = label.get(k, 0) - c * v
                if p:
                    x %= p
                if x:
                    label[k] = x
                else:
                    label.pop(k, None)
        return vec, label

    def add(self, vec: dict, label: dict | None = None) -> bool:
        vec, label = self.reduce(vec, label)
        if not vec:
            return False
        piv = min(vec)
        inv = self.f.inv(vec[piv])
        p = self.f.p
        norm = lambda x: (x * inv) % p if p else x * inv  # noqa: E731
        self.rows[piv] = ({i: norm(v) for i, v in vec.items()}, {k: norm(v) for k, v in label.items()})
        return True

    def __len__(self):
        return len(self.rows)


def _kernel(f: Field, columns: list, restrict_rows) -> list[dict]:
    """Kernel of the map sending e_j to columns[j] restricted to rows in ``restrict_rows``.

    Returns kernel vectors as sparse dicts over column positions.
    """
    ech = _Echelon(f)
    kernel = []
    for j, col in enumerate(columns):
        img = {i: v for i, v in col.items() if i in restrict_rows}
        vec, label = ech.reduce(img, {j: f(1)})
        if vec:
            ech.add(vec, label)
        else:
            # img - sum(...) = 0 means the label combination is in the kernel
            kernel.append(label)
    return kernel


# ---------------------------------------------------------------------------
# Pages
# ---------------------------------------------------------------------------


@dataclass
class Page:
    """One page of the spectral sequence.

    Attributes
    ----------
    r : int
    dims : dict
        ``(p, degree) -> dim E^r_{p}`` in that degree (zero entries omitted).
    differentials : dict
        ``(p, degree) -> matrix`` of d^r from (p, degree) to (p + r, degree + 1),
        as a list of rows over the field.
    """

    r: int
    dims: dict
    differentials: dict = field(repr=False)
    field: Field = field(repr=False, default_factory=Field)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dims_by_degree(self) -> dict[int, int]:
        out: dict = {}
        for (_, deg), n in self.dims.items():
            out[deg] = out.get(deg, 0) + n
        return dict(sorted(out.items()))

    def dims_by_level(self) -> dict[int, int]:
        out: dict = {}
        for (p, _), n in self.dims.items():
            out[p] = out.get(p, 0) + n
        return dict(sorted(out.items()))

    def homology_dims(self) -> dict:
        """Dimensions of H(E^r, d^r) at every (p, degree)."""
        f = self.field
        out = {}
        for key, n in self.dims.items():
            p, deg = key
            out_rank = f.rank(self.differentials[key]) if key in self.differentials else 0
            src = (p - self.r, deg - 1)
            in_rank = f.rank(self.differentials[src]) if src in self.differentials else 0
            h = n - out_rank - in_rank
            if h:
                out[key] = h
        return out


def page(fc: FilteredComplex, r: int) -> Page:
    """The page E^r with its differential d^r.

    Raises
    ------
    NotAComplex
        If the induced d^r does not square to zero (signals a bug).
    """
    if r < 0:
        raise ValueError("page index must be non-negative")
    f = fc.field
    n = fc.dim
    idx_by = {}
    for j in range(n):
        idx_by.setdefault((fc.levels[j], fc.degrees[j]), []).append(j)
    levels = sorted(set(fc.levels))
    degrees = sorted(set(fc.degrees))

    reps: dict = {}     # (p, deg) -> list of full representative vectors
    echelons: dict = {}  # (p, deg) -> echelon of (boundaries, then representatives) in level-p coords
    dims = {}
    for p in levels:
        for deg in degrees:
            here = set(idx_by.get((p, deg), ()))
            if not here:
                continue
            ech = _Echelon(f)
            # boundaries: d x with x in F^{p-r+1} of degree deg-1 and dx in F^p
            src = [j for j in range(n) if fc.degrees[j] == deg - 1 and fc.levels[j] >= p - r + 1]
            low_rows = {i for i in range(n) if fc.degrees[i] == deg and p - r + 1 <= fc.levels[i] < p}
            cols = [fc.columns[j] for j in src]
            for combo in _kernel(f, cols, low_rows):
                x = {src[k]: v for k, v in combo.items()}
                dx = fc._apply(x)
                proj = {i: v for i, v in dx.items() if i in here}
                if proj:
                    ech.add(proj)
            # cycles: x in F^p of degree deg with dx in F^{p+r}
            src = [j for j in range(n) if fc.degrees[j] == deg and fc.levels[j] >= p]
            mid_rows = {i for i in range(n) if fc.degrees[i] == deg + 1 and p <= fc.levels[i] < p + r}
            cols = [fc.columns[j] for j in src]
            chosen = []
            for combo in _kernel(f, cols, mid_rows):
                x = {src[k]: v for k, v in combo.items()}
                proj = {i: v for i, v in x.items() if i in here}
                if proj and ech.add(proj, {len(chosen): f(1)}):
                    chosen.append(x)
            if chosen:
                dims[(p, deg)] = len(chosen)
                reps[(p, deg)] = chosen
                echelons[(p, deg)] = ech

    diffs = {}
    for (p, deg), chosen in reps.items():
        tgt = (p + r, deg + 1)
        if tgt not in reps:
            continue
        ech = echelons[tgt]
        there = set(idx_by.get(tgt, ()))
        mat = [[f(0)] * len(chosen) for _ in range(len(reps[tgt]))]
        for k, x in enumerate(chosen):
            dx = fc._apply(x)
            proj = {i: v for i, v in dx.items() if i in there}
            rest, label = ech.reduce(proj)
            if rest:  # pragma: no cover - dx of a representative is a cycle at level p + r
                raise NotAComplex("image of d^%d is not a class at level %d" % (r, p + r), degree=deg)
            for j, v in label.items():
                mat[j][k] = (-v) % f.p if f.p else -v
        if any(x for row in mat for x in row):
            diffs[(p, deg)] = mat
    result = Page(r, dims, diffs, f)
    for (p, deg), mat in diffs.items():
        nxt = diffs.get((p + r, deg + 1))
        if nxt is not None and not f.is_zero(f.mul(nxt, mat)):
            raise NotAComplex("d^%d o d^%d is nonzero at level %d" % (r, r, p), degree=deg)
    return result


def converged(fc: FilteredComplex) -> Page:
    """The limiting page E^infinity (reached once r exceeds the filtration length)."""
    lo, hi = fc.level_range
    return page(fc, hi - lo + 1)


def brute_force_page_dims(fc: FilteredComplex, r: int) -> dict:
    """Independent dense computation of dim E^r_{p} per degree.

    Uses ``dim(Z + F^{p+1}) - dim(B + F^{p+1})`` with full-length vectors,
    where Z and B are found from dense null spaces.
    """
    f = fc.field
    n = fc.dim
    dense = [[f(0)] * n for _ in range(n)]
    for j, col in enumerate(fc.columns):
        for i, v in col.items():
            dense[i][j] = v
    out = {}
    for p in sorted(set(fc.levels)):
        for deg in sorted(set(fc.degrees)):
            if not any(fc.levels[j] == p and fc.degrees[j] == deg for j in range(n)):
                continue
            higher = [_unit(f, n, i) for i in range(n) if fc.levels[i] >= p + 1 and fc.degrees[i] == deg]
            # Z: x in F^p (degree deg) with dx in F^{p+r}
            zs = [j for j in range(n) if fc.levels[j] >= p and fc.degrees[j] == deg]
            zrows = [i for i in range(n) if fc.levels[i] < p + r]
            zmat = [[dense[i][j] for j in zs] for i in zrows]
            zvecs = [_embed(f, n, zs, v) for v in f.nullspace(zmat, len(zs))] if zs else []
            # B: d x with x in F^{p-r+1} (degree deg-1), dx in F^p
            bs = [j for j in range(n) if fc.levels[j] >= p - r + 1 and fc.degrees[j] == deg - 1]
            brows = [i for i in range(n) if fc.levels[i] < p]
            bmat = [[dense[i][j] for j in bs] for i in brows]
            bvecs = []
            for v in (f.nullspace(bmat, len(bs)) if bs else []):
                x = _embed(f, n, bs, v)
                bvecs.append([sum(dense[i][j] * x[j] for j in range(n)) for i in range(n)])
                if f.p:
                    bvecs[-1] = [y % f.p for y in bvecs[-1]]
            dim = f.span_dim(zvecs + higher) - f.span_dim(bvecs + higher)
            if dim:
                out[(p, deg)] = dim
    return out


def _unit(f, n, i):
    v = [f(0)] * n
    v[i] = f(1)
    return v


def _embed(f, n, idx, vals):
    v = [f(0)] * n
    for k, x in zip(idx, vals):
        v[k] = x
    return v


def random_filtered_complex(rng: random.Random, characteristic: int = 0, max_dim: int = 12,
                            max_levels: int = 4, max_degree: int = 3) -> FilteredComplex:
    """A random filtered complex built as d = P D P^-1 from a split complex.

    A direct sum of random two-term pieces (x -> y) and single generators is
    conjugated by a random filtration-preserving change of basis within each
    degree, which keeps d filtered and d o d = 0.
    """
    f = Field(characteristic)
    n = rng.randint(1, max_dim)
    degrees = [rng.randint(0, max_degree) for _ in range(n)]
    levels = [rng.randint(0, max_levels - 1) for _ in range(n)]
    # pair sources with targets one degree up and not lower in level
    cols: list = [dict() for _ in range(n)]
    used = set()
    order = list(range(n))
    rng.shuffle(order)
    for j in order:
        if j in used:
            continue
        cands = [i for i in range(n) if i not in used and i != j
                 and degrees[i] == degrees[j] + 1 and levels[i] >= levels[j]]
        if cands and rng.random() < 0.7:
            i = rng.choice(cands)
            used.update((i, j))
            cols[j][i] = f(rng.choice([1, 2, 3, -1]) or 1)
    # change of basis: upper-triangular with respect to (degree, level) blocks
    basis_change = [[f(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and degrees[i] == degrees[j] and levels[i] >= levels[j] and rng.random() < 0.3:
                basis_change[i][j] = f(rng.randint(-2, 2))
    # keep it invertible: unitriangular after sorting by (level, index)
    keyed = sorted(range(n), key=lambda k: (levels[k], k))
    rank_of = {k: r for r, k in enumerate(keyed)}
    for i in range(n):
        for j in range(n):
            if i != j and rank_of[i] < rank_of[j]:
                basis_change[i][j] = f(0)
    dense = [[f(0)] * n for _ in range(n)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            dense[i][j] = v
    inv = _unitriangular_inverse(f, basis_change)
    conj = f.mul(f.mul(basis_change, dense), inv)
    return FilteredComplex.from_dense(degrees, levels, conj, characteristic)


def _unitriangular_inverse(f: Field, a):
    n = len(a)
    aug = [list(a[i]) + [f(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = f.rref(aug)
    return [row[n:] for row in red]


# ---------------------------------------------------------------------------
# Triangle detection
# ---------------------------------------------------------------------------


@dataclass
class TriangleInstance:
    """Three-periodic data (C_i, f_i, h_i) over a field.

    Attributes
    ----------
    differentials : list of 3 square matrices
        ``d_i`` on C_i, with d_i o d_i = 0.
    f : list of 3 matrices
        ``f_i: C_i -> C_{i+1}`` (shape dim C_{i+1} x dim C_i).
    h : list of 3 matrices
        ``h_i: C_i -> C_{i+2}``.
    """

    differentials: list
    f: list
    h: list
    field: Field = field(default_factory=Field)

    def dim(self, i: int) -> int:
        return len(self.differentials[i % 3])


@dataclass
class TriangleReport:
    hypotheses_hold: bool
    failures: list
    exact: bool | None = None
    quasi_isomorphism: bool | None = None

    @property
    def ok(self) -> bool:
        return self.hypotheses_hold and bool(self.exact) and bool(self.quasi_isomorphism)


def _mul(f: Field, a, b, rows: int, cols: int):
    if rows == 0 or cols == 0:
        return f.zeros(rows, cols)
    if not b:
        return f.zeros(rows, cols)
    return f.mul(a, b, cols)


def _plus(f: Field, *mats):
    out = mats[0]
    for m in mats[1:]:
        out = f.add(out, m)
    return out


def _columns(a, ncols):
    return [[row[j] for row in a] for j in range(ncols)]


class _Spaces:
    """Cycles, boundaries and homology dimension of one complex."""

    def __init__(self, f: Field, d):
        n = len(d)
        self.n = n
        self.d = d
        self.cycles = f.nullspace(d, n) if n else []
        self.boundaries = [c for c in _columns(d, n) if any(c)]
        self.b_dim = f.span_dim(self.boundaries) if self.boundaries else 0
        self.h_dim = len(self.cycles) - self.b_dim


def _apply_vec(f: Field, a, v):
    p = f.p
    out = [sum(x * y for x, y in zip(row, v)) for row in a]
    return [x % p for x in out] if p else out


def _preserves(f: Field, a, sp: _Spaces) -> bool:
    """Whether ``a`` maps cycles to cycles and boundaries to boundaries, so it induces a map on H."""
    if not sp.n:
        return True
    for z in sp.cycles:
        if any(_apply_vec(f, sp.d, _apply_vec(f, a, z))):
            return False
    for b in sp.boundaries:
        if f.span_dim(sp.boundaries + [_apply_vec(f, a, b)]) != sp.b_dim:
            return False
    return True


def _induced_rank(f: Field, a, src: _Spaces, tgt: _Spaces) -> int:
    """Rank of the map induced on homology by a map sending cycles to cycles."""
    images = [_apply_vec(f, a, z) for z in src.cycles] if tgt.n else []
    total = f.span_dim(images + tgt.boundaries) if (images or tgt.boundaries) and tgt.n else 0
    return total - tgt.b_dim


def verify_triangle(ti: TriangleInstance) -> TriangleReport:
    """Check the hypotheses of the triangle detection lemma and, if they hold, its conclusions.

    Hypotheses: each f_i is a chain map, ``f_{i+1} f_i + d h_i + h_i d = 0``,
    and ``f_{i+2} h_i + h_{i+1} f_i`` commutes or anticommutes with d and is
    an isomorphism on homology.  Conclusions: exactness of the homology
    triangle at every C_i, and that ``f_i + h_i : C_i -> Cone(f_{i+1})`` is
    an anti-chain map inducing an isomorphism on homology.
    """
    f = ti.field
    d = ti.differentials
    dims = [len(x) for x in d]
    failures = []
    for i in range(3):
        if dims[i] and not f.is_zero(_mul(f, d[i], d[i], dims[i], dims[i])):
            failures.append(("d o d != 0", i))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        lhs = _mul(f, ti.f[i], d[i], dims[j], dims[i])
        rhs = _mul(f, d[j], ti.f[i], dims[j], dims[i])
        if not f.is_zero(f.add(lhs, rhs, -1)):
            failures.append(("f_i is not a chain map", i))
        total = _plus(
            f,
            _mul(f, ti.f[j], ti.f[i], dims[k], dims[i]),
            _mul(f, d[k], ti.h[i], dims[k], dims[i]),
            _mul(f, ti.h[i], d[i], dims[k], dims[i]),
        )
        if not f.is_zero(total):
            failures.append(("f_{i+1} f_i + d h_i + h_i d != 0", i))
    spaces = [_Spaces(f, d[i]) for i in range(3)]
    if not failures:
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            psi = f.add(
                _mul(f, ti.f[k], ti.h[i], dims[i], dims[i]),
                _mul(f, ti.h[j], ti.f[i], dims[i], dims[i]),
            )
            if not _preserves(f, psi, spaces[i]):
                failures.append(("f_{i+2} h_i + h_{i+1} f_i does not preserve cycles and boundaries", i))
            elif _induced_rank(f, psi, spaces[i], spaces[i]) != spaces[i].h_dim:
                failures.append(("f_{i+2} h_i + h_{i+1} f_i is not an isomorphism on homology", i))
    if failures:
        return TriangleReport(False, failures)

    exact = True
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        # image of H(f_i) inside H(C_j) versus kernel of H(f_j)
        img = [_apply_vec(f, ti.f[i], z) for z in spaces[i].cycles]
        img_dim = (f.span_dim(img + spaces[j].boundaries) if (img or spaces[j].boundaries) and dims[j] else 0) - spaces[j].b_dim
        ker_dim = spaces[j].h_dim - _induced_rank(f, ti.f[j], spaces[j], spaces[k])
        comp = [_apply_vec(f, ti.f[j], v) for v in img]
        inside = (f.span_dim(comp + spaces[k].boundaries) if (comp or spaces[k].boundaries) and dims[k] else 0) == spaces[k].b_dim
        if not (inside and img_dim == ker_dim):
            exact = False
            failures.append(("homology triangle not exact", j))

    quasi = True
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        # Cone(f_j) on C_j + C_k with D(a, b) = (-d a, f_j a + d b)
        n = dims[j] + dims[k]
        cone = f.zeros(n, n)
        for r in range(dims[j]):
            for c in range(dims[j]):
                cone[r][c] = -d[j][r][c] if not f.p else (-d[j][r][c]) % f.p
        for r in range(dims[k]):
            for c in range(dims[j]):
                cone[dims[j] + r][c] = ti.f[j][r][c]
            for c in range(dims[k]):
                cone[dims[j] + r][dims[j] + c] = d[k][r][c]
        phi = [list(row) for row in ti.f[i]] + [list(row) for row in ti.h[i]]
        if dims[i] == 0:
            phi = [[] for _ in range(n)]
        anti = f.add(_mul(f, cone, phi, n, dims[i]), _mul(f, phi, d[i], n, dims[i]))
        cone_spaces = _Spaces(f, cone)
        if not f.is_zero(anti):
            quasi = False
            failures.append(("f_i + h_i is not an anti-chain map to the cone", i))
            continue
        rank = _induced_rank(f, phi, spaces[i], cone_spaces) if n else 0
        if not (rank == spaces[i].h_dim == cone_spaces.h_dim):
            quasi = False
            failures.append(("f_i + h_i is not a quasi-isomorphism", i))
    return TriangleReport(True, failures, exact, quasi)


def random_chain_map(f: Field, d_src, d_tgt, par_src, par_tgt, rng: random.Random):
    """A random parity-preserving chain map, drawn from the solution space of g d = d g."""
    ns, nt = len(d_src), len(d_tgt)
    slots = [(r, c) for r in range(nt) for c in range(ns) if par_tgt[r] == par_src[c]]
    if not slots:
        return f.zeros(nt, ns)
    pos = {s: k for k, s in enumerate(slots)}
    equations = []
    # (g d_src - d_tgt g)[r][c] = 0 for all r, c
    for r in range(nt):
        for c in range(ns):
            row = [f(0)] * len(slots)
            for k in range(ns):
                if (r, k) in pos and d_src[k][c]:
                    row[pos[(r, k)]] += d_src[k][c]
            for k in range(nt):
                if (k, c) in pos and d_tgt[r][k]:
                    row[pos[(k, c)]] -= d_tgt[r][k]
            if f.p:
                row = [x % f.p for x in row]
            if any(row):
                equations.append(row)
    basis = f.nullspace(equations, len(slots)) if equations else [
        [f(int(a == b)) for a in range(len(slots))] for b in range(len(slots))
    ]
    g = f.zeros(nt, ns)
    for vec in basis:
        coeff = f(rng.randint(-2, 2))
        for (r, c), k in pos.items():
            g[r][c] += coeff * vec[k]
    if f.p:
        g = [[x % f.p for x in row] for row in g]
    return g


def _random_complex(f: Field, rng: random.Random, max_dim: int):
    """Random Z/2-graded complex as a conjugated sum of 2-term pieces."""
    n = rng.randint(0, max_dim)
    parity = [rng.randint(0, 1) for _ in range(n)]
    d = f.zeros(n, n)
    free = list(range(n))
    rng.shuffle(free)
    while len(free) >= 2 and rng.random() < 0.7:
        a = free.pop()
        b = next((x for x in free if parity[x] != parity[a]), None)
        if b is None:
            break
        free.remove(b)
        d[b][a] = f(rng.choice([1, 2, -1]))
    # conjugate by a random parity-preserving unitriangular matrix
    u = f.identity(n)
    for i in range(n):
        for j in range(i):
            if parity[i] == parity[j] and rng.random() < 0.4:
                u[i][j] = f(rng.randint(-2, 2))
    uinv = _unitriangular_inverse(f, u) if n else []
    d = f.mul(f.mul(u, d), uinv) if n else d
    return d, parity


def cone_triangle(f: Field, d_a, par_a, d_b, par_b, g) -> TriangleInstance:
    """The standard triangle A -> B -> Cone(g) -> A built from a chain map g.

    Cone(g) = A + B with D(a, b) = (-d a, g a + d b).  The maps are g, the
    inclusion of B, and (a, b) -> eps(a) with eps = (-1)^parity; the
    homotopies are h_0(a) = (-a, 0), h_1 = 0 and h_2(a, b) = -eps(b).
    """
    na, nb = len(d_a), len(d_b)
    p = f.p

    def neg(x):
        return (-x) % p if p else -x

    n = na + nb
    cone = f.zeros(n, n)
    for r in range(na):
        for c in range(na):
            cone[r][c] = neg(d_a[r][c])
    for r in range(nb):
        for c in range(na):
            cone[na + r][c] = g[r][c]
        for c in range(nb):
            cone[na + r][na + c] = d_b[r][c]
    eps_a = [f(-1 if par_a[i] else 1) for i in range(na)]
    eps_b = [f(-1 if par_b[i] else 1) for i in range(nb)]
    incl = f.zeros(n, nb)
    for i in range(nb):
        incl[na + i][i] = f(1)
    proj = f.zeros(na, n)
    for i in range(na):
        proj[i][i] = eps_a[i]
    h0 = f.zeros(n, na)
    for i in range(na):
        h0[i][i] = f(-1)
    h1 = f.zeros(na, nb)
    h2 = f.zeros(nb, n)
    for i in range(nb):
        h2[i][na + i] = neg(eps_b[i])
    return TriangleInstance([d_a, d_b, cone], [g, incl, proj], [h0, h1, h2], f)


def random_cone_triangle(rng: random.Random, characteristic: int = 2, max_dim: int = 4,
                         zero_differentials: bool | None = None) -> TriangleInstance:
    """A random cone triangle satisfying the lemma's hypotheses.

    Away from characteristic 2 the composite ``f_{i+2} h_i + h_{i+1} f_i``
    on the cone only induces a map on homology when A and B carry zero
    differential, so that is the default there.
    """
    f = Field(characteristic)
    if zero_differentials is None:
        zero_differentials = characteristic != 2
    d_a, par_a = _random_complex(f, rng, max_dim)
    d_b, par_b = _random_complex(f, rng, max_dim)
    if zero_differentials:
        d_a, d_b = f.zeros(len(d_a), len(d_a)), f.zeros(len(d_b), len(d_b))
    g = random_chain_map(f, d_a, d_b, par_a, par_b, rng)
    return cone_triangle(f, d_a, par_a, d_b, par_b, g)


def _identity_defect(ti: TriangleInstance, i: int, h):
    f = ti.field
    j, k = (i + 1) % 3, (i + 2) % 3
    rows, cols = ti.dim(k), ti.dim(i)
    return _plus(
        f,
        _mul(f, ti.f[j], ti.f[i], rows, cols),
        _mul(f, ti.differentials[k], h, rows, cols),
        _mul(f, h, ti.differentials[i], rows, cols),
    )


def corrupt_triangle(ti: TriangleInstance, rng: random.Random) -> TriangleInstance:
    """Perturb one entry of some h_i (or of f_0) so a hypothesis identity fails."""
    f = ti.field
    for i in rng.sample(range(3), 3):
        rows, cols = ti.dim(i + 2), ti.dim(i)
        cells = [(r, c) for r in range(rows) for c in range(cols)]
        rng.shuffle(cells)
        for r, c in cells:
            h = [list(row) for row in ti.h[i]]
            h[r][c] = f(h[r][c] + rng.choice([1, -1]))
            if not f.is_zero(_identity_defect(ti, i, h)):
                hs = list(ti.h)
                hs[i] = h
                return TriangleInstance(ti.differentials, ti.f, hs, f)
    # every h perturbation is invisible; break the chain-map property of f_0 instead
    rows, cols = ti.dim(1), ti.dim(0)
    if rows == 0 or cols == 0:
        raise ValueError("instance too small to corrupt")
    fs = list(ti.f)
    g = [list(row) for row in fs[0]]
    r, c = rng.randrange(rows), rng.randrange(cols)
    g[r][c] = f(g[r][c] + 1)
    fs[0] = g
    return TriangleInstance(ti.differentials, fs, ti.h, f)
