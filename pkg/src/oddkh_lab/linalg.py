"""Exact linear algebra over the integers and finite/rational fields.

Matrices are stored sparsely as ``{row: {col: value}}`` with Python integers,
so all arithmetic is exact.  The main entry points are
:func:`smith_normal_form`, :func:`rank_over_field` and :func:`homology`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import InconsistentSystem, NonPrimeCharacteristic, NotAComplex

__all__ = [
    "IntMatrix",
    "SmithForm",
    "smith_normal_form",
    "rank_over_field",
    "is_prime",
    "IntChainComplex",
    "HomologyTable",
    "homology",
    "solve_gf2",
    "invariant_factors",
]


# ---------------------------------------------------------------------------
# Sparse integer matrices
# ---------------------------------------------------------------------------


class IntMatrix:
    """Sparse integer matrix.

    Parameters
    ----------
    rows, cols : int
        Shape.
    entries : mapping, optional
        ``{(i, j): value}`` or ``{i: {j: value}}``; zeros are dropped.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, int]] = {}
        if entries:
            items = entries.items()
            for key, val in items:
                if isinstance(val, Mapping):
                    for j, x in val.items():
                        self._put(data, key, j, x)
                else:
                    i, j = key
                    self._put(data, i, j, val)
        self._data = data

    def _put(self, data, i, j, x):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("entry (%d, %d) outside %dx%d matrix" % (i, j, self.rows, self.cols))
        x = int(x)
        if x:
            row = data.setdefault(i, {})
            x += row.get(j, 0)
            if x:
                row[j] = x
            else:
                del row[j]
                if not row:
                    del data[i]

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        m = cls(rows, cols)
        for i, row in enumerate(dense):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for j, x in enumerate(row):
                if x:
                    m._data.setdefault(i, {})[j] = int(x)
        return m

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("entry (%d, %d) outside %dx%d matrix" % (i, j, self.rows, self.cols))
        return self._data.get(i, {}).get(j, 0)

    def row_dicts(self) -> dict[int, dict[int, int]]:
        """A fresh copy of the nonzero rows."""
        return {i: dict(r) for i, r in self._data.items()}

    def items(self) -> Iterable[tuple[tuple[int, int], int]]:
        for i in sorted(self._data):
            row = self._data[i]
            for j in sorted(row):
                yield (i, j), row[j]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, row in self._data.items():
            for j, x in row.items():
                out[i][j] = x
        return out

    def transpose(self) -> "IntMatrix":
        t = IntMatrix(self.cols, self.rows)
        for i, row in self._data.items():
            for j, x in row.items():
                t._data.setdefault(j, {})[i] = x
        return t

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch %s @ %s" % (self.shape, other.shape))
        out = IntMatrix(self.rows, other.cols)
        odata = other._data
        for i, row in self._data.items():
            acc: dict[int, int] = {}
            for k, x in row.items():
                orow = odata.get(k)
                if orow:
                    for j, y in orow.items():
                        acc[j] = acc.get(j, 0) + x * y
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out._data[i] = acc
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):  # pragma: no cover - mutable-looking but value-typed
        return hash((self.shape, tuple(self.items())))

    def __repr__(self) -> str:
        return "IntMatrix(%d, %d, nnz=%d)" % (self.rows, self.cols, self.nnz)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors d_1 | d_2 | ... | d_r of an integer matrix.

    ``U`` and ``V`` are unimodular with ``U @ M @ V`` diagonal when the form
    was computed with transforms, otherwise ``None``.
    """

    factors: tuple[int, ...]
    U: IntMatrix | None = field(default=None, repr=False, compare=False)
    V: IntMatrix | None = field(default=None, repr=False, compare=False)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d > 1)


def invariant_factors(diagonal: Iterable[int]) -> tuple[int, ...]:
    """Turn the nonzero entries of any diagonal matrix into a divisibility chain."""
    vals = [abs(d) for d in diagonal if d]
    units = sum(1 for d in vals if d == 1)
    rest = [d for d in vals if d != 1]
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            a, b = rest[i], rest[j]
            g = gcd(a, b)
            rest[i], rest[j] = g, a // g * b
    out = [1] * units + sorted(rest)
    # gcd/lcm sweeps can create new units
    return tuple(sorted(out))


def _eliminate_units(rows: dict[int, dict[int, int]], cols: dict[int, set], modulus: int = 0) -> int:
    """Pivot on unit entries until none remain; returns the number of pivots.

    Works in place.  Columns are visited in order of increasing fill and, in
    each, the sparsest row holding a unit is used (an approximate Markowitz
    choice).  With ``modulus`` > 0 arithmetic is mod a prime and every
    nonzero entry counts as a unit.
    """
    pivots = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda j: len(cols[j])):
            holders = cols.get(c)
            if not holders:
                cols.pop(c, None)
                continue
            best = None
            for r in holders:
                x = rows[r][c]
                if modulus or x == 1 or x == -1:
                    n = len(rows[r])
                    if best is None or n < best[0] or (n == best[0] and r < best[1]):
                        best = (n, r)
            if best is None:
                continue
            r = best[1]
            _pivot(rows, cols, r, c, modulus)
            pivots += 1
            progress = True
    return pivots


def _pivot(rows, cols, r, c, modulus):
    """Clear column c using the unit at (r, c), then drop row r and column c."""
    prow = rows.pop(r)
    u = prow[c]
    inv = pow(u, -1, modulus) if modulus else u  # u is +-1 over the integers
    for j in prow:
        cols[j].discard(r)
    for r2 in list(cols[c]):
        row2 = rows[r2]
        factor = row2[c] * inv
        if modulus:
            factor %= modulus
        for j, x in prow.items():
            y = row2.get(j, 0) - factor * x
            if modulus:
                y %= modulus
            if y:
                row2[j] = y
                cols[j].add(r2)
            else:
                if j in row2:
                    del row2[j]
                cols[j].discard(r2)
        if not row2:
            del rows[r2]
    del cols[c]
    for j in list(prow):
        if j in cols and not cols[j]:
            del cols[j]


def _columns_of(rows: Mapping[int, Mapping[int, int]]) -> dict[int, set]:
    cols: dict[int, set] = {}
    for i, row in rows.items():
        for j in row:
            cols.setdefault(j, set()).add(i)
    return cols


def _sparse_diagonal(m: IntMatrix) -> list[int]:
    """Diagonal entries of some matrix equivalent to m (not yet a divisibility chain)."""
    rows = m.row_dicts()
    cols = _columns_of(rows)
    diag = [1] * _eliminate_units(rows, cols)
    while rows:
        # smallest magnitude pivot, Markowitz tie-break
        best = None
        for i, row in rows.items():
            ni = len(row) - 1
            for j, x in row.items():
                key = (abs(x), ni * (len(cols[j]) - 1), i, j)
                if best is None or key < best:
                    best = key
        _, _, r, c = best
        p = rows[r][c]
        clean = True
        for r2 in list(cols[c]):
            if r2 == r:
                continue
            row2 = rows[r2]
            q = _round_div(row2[c], p)
            if q:
                for j, x in rows[r].items():
                    y = row2.get(j, 0) - q * x
                    if y:
                        row2[j] = y
                        cols.setdefault(j, set()).add(r2)
                    else:
                        row2.pop(j, None)
                        cols[j].discard(r2)
            if c in row2:
                clean = False
            if not row2:
                del rows[r2]
        prow = rows[r]
        for j in list(prow):
            if j == c:
                continue
            q = _round_div(prow[j], p)
            # a column operation; column c is nonzero only in row r when clean
            if clean and q:
                y = prow[j] - q * p
                if y:
                    prow[j] = y
                else:
                    del prow[j]
                    cols[j].discard(r)
            if j in prow:
                clean = False
        if clean:
            del rows[r]
            del cols[c]
            diag.append(p)
        for j in [j for j, s in cols.items() if not s]:
            del cols[j]
    return diag


def _round_div(a: int, b: int) -> int:
    """Nearest-integer quotient, keeping remainders small."""
    q, rem = divmod(a, b)
    if 2 * abs(rem) > abs(b):
        q += 1
    return q


def _dense_snf(m: IntMatrix):
    """Textbook Smith form with transforms; returns (factors, U, V)."""
    a = m.to_dense()
    nr, nc = m.rows, m.cols
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        if q:
            a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        if q:
            for row in a:
                row[dst] -= q * row[src]
            for row in V:
                row[dst] -= q * row[src]

    factors = []
    t = 0
    while t < min(nr, nc):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, _round_div(a[i][t], a[t][t]))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, _round_div(a[t][j], a[t][t]))
                    if a[t][j]:
                        done = False
            if done:
                # divisibility: fold in any row whose entries the pivot misses
                bad = next(
                    (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % a[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad, -1)
                continue
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc)
                       if a[i][j] and (i == t or j == t)]
            _, i, j = min(nonzero)
            swap_rows(t, i)
            swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        factors.append(a[t][t])
        t += 1
    return tuple(factors), IntMatrix.from_dense(U, nr), IntMatrix.from_dense(V, nc)


def smith_normal_form(m: IntMatrix, with_transforms: bool = False) -> SmithForm:
    """Invariant factors of ``m``, optionally with unimodular ``U``, ``V``.

    Examples
    --------
    >>> smith_normal_form(IntMatrix.from_dense([[2, 4], [4, 2]])).factors
    (2, 6)
    """
    if with_transforms:
        factors, U, V = _dense_snf(m)
        return SmithForm(factors, U, V)
    return SmithForm(invariant_factors(_sparse_diagonal(m)))


# ---------------------------------------------------------------------------
# Ranks over fields
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    if n >= 3317044064679887385961981:  # pragma: no cover - beyond the proven bound
        raise NonPrimeCharacteristic("cannot certify primality of %d" % n)
    return True


def _check_characteristic(p: int) -> None:
    if p != 0 and not is_prime(p):
        raise NonPrimeCharacteristic("characteristic must be 0 or a prime, got %d" % p)


def rank_over_field(m: IntMatrix, characteristic: int = 0) -> int:
    """Rank of an integer matrix over Q (``characteristic=0``) or F_p.

    Raises
    ------
    NonPrimeCharacteristic
        If ``characteristic`` is neither 0 nor prime.
    """
    _check_characteristic(characteristic)
    if characteristic:
        p = characteristic
        rows = {}
        for i, row in m.row_dicts().items():
            row = {j: x % p for j, x in row.items() if x % p}
            if row:
                rows[i] = row
        cols = _columns_of(rows)
        return _eliminate_units(rows, cols, p)
    # fraction-free elimination over Z, which has the same rank as over Q
    rows = m.row_dicts()
    cols = _columns_of(rows)
    rank = _eliminate_units(rows, cols)
    while rows:
        r = min(rows, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(r)
        c = min(prow, key=lambda j: (abs(prow[j]), j))
        p = prow[c]
        for j in prow:
            cols[j].discard(r)
        for r2 in list(cols[c]):
            row2 = rows[r2]
            a = row2[c]
            g = gcd(a, p)
            sa, sp = p // g, a // g
            new = {}
            for j in set(row2) | set(prow):
                y = sa * row2.get(j, 0) - sp * prow.get(j, 0)
                if y:
                    new[j] = y
            content = 0
            for y in new.values():
                content = gcd(content, y)
            for j in row2:
                cols[j].discard(r2)
            if new:
                rows[r2] = {j: y // content for j, y in new.items()}
                for j in new:
                    cols.setdefault(j, set()).add(r2)
            else:
                del rows[r2]
        rank += 1
        for j in [j for j, s in cols.items() if not s]:
            del cols[j]
    return rank


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------


class IntChainComplex:
    """Graded free abelian chain complex.

    Parameters
    ----------
    ranks : mapping
        Degree -> rank of the free module in that degree.
    differentials : mapping
        Degree n -> matrix of the map from degree n to degree ``n + step``,
        of shape ``(ranks[n + step], ranks[n])``.  Missing entries are zero.
    step : int
        -1 for homological (boundary lowers degree), +1 for cohomological.
    """

    def __init__(self, ranks: Mapping[int, int], differentials: Mapping[int, IntMatrix] | None = None,
                 step: int = -1):
        if step not in (-1, 1):
            raise ValueError("step must be -1 or +1")
        self.step = step
        self.ranks = {n: int(r) for n, r in ranks.items() if r}
        self.differentials: dict[int, IntMatrix] = {}
        for n, d in (differentials or {}).items():
            target = self.ranks.get(n + step, 0)
            source = self.ranks.get(n, 0)
            if d.shape != (target, source):
                raise ValueError(
                    "differential from degree %d has shape %s, expected %s"
                    % (n, d.shape, (target, source))
                )
            if not d.is_zero():
                self.differentials[n] = d

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def differential(self, n: int) -> IntMatrix:
        d = self.differentials.get(n)
        if d is None:
            return IntMatrix(self.ranks.get(n + self.step, 0), self.ranks.get(n, 0))
        return d

    def check(self) -> None:
        """Raise :class:`NotAComplex` unless every composite of differentials vanishes."""
        for n, d in self.differentials.items():
            nxt = self.differentials.get(n + self.step)
            if nxt is not None and not (nxt @ d).is_zero():
                raise NotAComplex("d o d is nonzero starting in degree %d" % n, degree=n)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * r for n, r in self.ranks.items())


@dataclass(frozen=True)
class HomologyTable:
    """Per-degree free rank and torsion coefficients."""

    groups: dict[int, tuple[int, tuple[int, ...]]]

    def free(self, n: int) -> int:
        return self.groups.get(n, (0, ()))[0]

    def torsion(self, n: int) -> tuple[int, ...]:
        return self.groups.get(n, (0, ()))[1]

    def total_rank(self) -> int:
        return sum(f for f, _ in self.groups.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * f for n, (f, _) in self.groups.items())

    def nonzero(self) -> dict[int, tuple[int, tuple[int, ...]]]:
        return {n: g for n, g in sorted(self.groups.items()) if g[0] or g[1]}


def homology(c: IntChainComplex, characteristic: int = 0, method: str = "rank",
             check: bool = True) -> HomologyTable:
    """Homology of a chain complex.

    Parameters
    ----------
    c : IntChainComplex
    characteristic : int
        0 for integral homology (free rank plus torsion); a prime p for
        homology with F_p coefficients (dimensions only).
    method : {"rank", "kernel"}
        ``"rank"`` takes free ranks from matrix ranks and torsion from the
        Smith form of each incoming differential.  ``"kernel"`` computes an
        integral kernel basis, rewrites the incoming image in it, and takes
        that Smith form; it is slower and used as a cross-check.
    check : bool
        Verify that consecutive differentials compose to zero first.

    Raises
    ------
    NotAComplex
        If ``check`` and some composite of differentials is nonzero.
    """
    _check_characteristic(characteristic)
    if check:
        c.check()
    if method not in ("rank", "kernel"):
        raise ValueError("unknown homology method %r" % method)
    step = c.step
    degrees = set(c.ranks)
    if characteristic:
        ranks = {n: rank_over_field(d, characteristic) for n, d in c.differentials.items()}
        groups = {}
        for n in sorted(degrees):
            free = c.ranks[n] - ranks.get(n, 0) - ranks.get(n - step, 0)
            groups[n] = (free, ())
        return HomologyTable(groups)
    if method == "kernel":
        return _homology_kernel(c)
    forms = {n: smith_normal_form(d) for n, d in c.differentials.items()}
    groups = {}
    for n in sorted(degrees):
        out_rank = forms[n].rank if n in forms else 0
        incoming = forms.get(n - step)
        in_rank = incoming.rank if incoming else 0
        tors = incoming.torsion if incoming else ()
        groups[n] = (c.ranks[n] - out_rank - in_rank, tors)
    return HomologyTable(groups)


def _homology_kernel(c: IntChainComplex) -> HomologyTable:
    step = c.step
    groups = {}
    for n in sorted(c.ranks):
        dim = c.ranks[n]
        out = smith_normal_form(c.differential(n), with_transforms=True)
        r = out.rank
        V = out.V.to_dense()
        kernel_cols = list(range(r, dim))
        incoming = c.differential(n - step)
        if not kernel_cols:
            groups[n] = (0, ())
            continue
        # columns of V beyond the rank span the kernel; V is unimodular
        Vinv = _unimodular_inverse(V)
        coords = IntMatrix.from_dense([Vinv[i] for i in kernel_cols], dim) @ incoming
        sf = smith_normal_form(coords)
        groups[n] = (len(kernel_cols) - sf.rank, sf.torsion)
    return HomologyTable(groups)


def _unimodular_inverse(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact inverse of a unimodular integer matrix by Gauss-Jordan over Q."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    out = []
    for row in aug:
        vals = row[n:]
        if any(v.denominator != 1 for v in vals):
            raise ValueError("matrix is not unimodular")
        out.append([int(v) for v in vals])
    return out


# ---------------------------------------------------------------------------
# Linear systems over F_2
# ---------------------------------------------------------------------------


def solve_gf2(equations: Iterable[tuple[int, int]], nvars: int) -> list[int]:
    """Solve a linear system over F_2.

    Parameters
    ----------
    equations : iterable of (mask, rhs)
        Each equation says that the XOR of the variables whose bits are set
        in ``mask`` equals ``rhs``.
    nvars : int

    Returns
    -------
    list of int
        A solution with every free variable set to 0.

    Raises
    ------
    InconsistentSystem
        If the equations have no common solution.
    """
    pivots: dict[int, tuple[int, int]] = {}  # leading bit -> (mask, rhs)
    for mask, rhs in equations:
        rhs &= 1
        while mask:
            lead = mask.bit_length() - 1
            if lead not in pivots:
                break
            pm, pr = pivots[lead]
            mask ^= pm
            rhs ^= pr
        if mask:
            pivots[mask.bit_length() - 1] = (mask, rhs)
        elif rhs:
            raise InconsistentSystem("F2 system has no solution")
    sol = [0] * nvars
    for lead in sorted(pivots):
        mask, rhs = pivots[lead]
        rest = mask & ~(1 << lead)
        val = rhs
        while rest:
            low = rest & -rest
            val ^= sol[low.bit_length() - 1]
            rest ^= low
        sol[lead] = val
    return sol
