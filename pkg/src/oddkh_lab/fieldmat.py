"""Dense matrices over Q (as Fractions) or a prime field F_p (as ints mod p).

A small toolkit for the spectral sequence engine and the orientation
calculus, where matrices are modest in size but must be exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .linalg import is_prime
from .errors import NonPrimeCharacteristic

__all__ = ["Field", "Matrix"]

Matrix = list  # list of rows


class Field:
    """Arithmetic in Q (``p == 0``) or F_p."""

    def __init__(self, p: int = 0):
        if p and not is_prime(p):
            raise NonPrimeCharacteristic("characteristic must be 0 or a prime, got %d" % p)
        self.p = p

    def __repr__(self) -> str:
        return "Field(%d)" % self.p

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __call__(self, x):
        if self.p:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if self.p:
            return pow(x, -1, self.p)
        return 1 / x

    def zero(self):
        return self(0)

    # -- matrices ----------------------------------------------------------

    def matrix(self, rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
        out = [[self(x) for x in row] for row in rows]
        if ncols is not None and any(len(r) != ncols for r in out):
            raise ValueError("ragged matrix")
        return out

    def zeros(self, r: int, c: int) -> Matrix:
        z = self(0)
        return [[z] * c for _ in range(r)]

    def identity(self, n: int) -> Matrix:
        return [[self(int(i == j)) for j in range(n)] for i in range(n)]

    def mul(self, a: Matrix, b: Matrix, cols: int | None = None) -> Matrix:
        """Product a @ b; pass ``cols`` when b has no rows."""
        if cols is None:
            cols = len(b[0]) if b else 0
        p = self.p
        out = []
        for row in a:
            acc = [0] * cols
            for k, x in enumerate(row):
                if x:
                    bk = b[k]
                    for j in range(cols):
                        if bk[j]:
                            acc[j] += x * bk[j]
            out.append([v % p for v in acc] if p else [Fraction(v) for v in acc])
        return out

    def add(self, a: Matrix, b: Matrix, scale=1) -> Matrix:
        p = self.p
        out = []
        for ra, rb in zip(a, b):
            row = [x + scale * y for x, y in zip(ra, rb)]
            out.append([v % p for v in row] if p else row)
        return out

    def is_zero(self, a: Matrix) -> bool:
        return all(not x for row in a for x in row)

    def transpose(self, a: Matrix, nrows_if_empty: int = 0) -> Matrix:
        if not a:
            return [[] for _ in range(nrows_if_empty)]
        return [list(col) for col in zip(*a)]

    def rref(self, a: Matrix) -> tuple[Matrix, list[int]]:
        """Reduced row echelon form and pivot columns."""
        m = [list(r) for r in a]
        p = self.p
        pivots = []
        r = 0
        ncols = len(m[0]) if m else 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = self.inv(m[r][c])
            m[r] = [(x * inv) % p if p else x * inv for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [((x - f * y) % p if p else x - f * y) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        return m[:r], pivots

    def rank(self, a: Matrix) -> int:
        return len(self.rref(a)[1]) if a and a[0] else 0

    def span_dim(self, vectors: Sequence[Sequence]) -> int:
        vectors = [list(v) for v in vectors]
        return self.rank(vectors) if vectors else 0

    def nullspace(self, a: Matrix, ncols: int) -> list[list]:
        """Basis of {x : a x = 0} as a list of vectors of length ncols."""
        if not a:
            return [[self(int(i == j)) for i in range(ncols)] for j in range(ncols)]
        red, pivots = self.rref(a)
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [self(0)] * ncols
            v[f] = self(1)
            for row, pc in zip(red, pivots):
                v[pc] = (-row[f]) % self.p if self.p else -row[f]
            basis.append(v)
        return basis

    def det(self, a: Matrix):
        n = len(a)
        m = [list(r) for r in a]
        p = self.p
        det = self(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c]), None)
            if piv is None:
                return self(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det = det * m[c][c]
            inv = self.inv(m[c][c])
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] * inv
                    m[i] = [((x - f * y) % p if p else x - f * y) for x, y in zip(m[i], m[c])]
        return det % p if p else det

    def solve(self, a: Matrix, b: Sequence, ncols: int):
        """Some x with a x = b, or None."""
        aug = [list(row) + [bi] for row, bi in zip(a, b)]
        red, pivots = self.rref(aug) if aug else ([], [])
        if ncols in pivots:
            return None
        x = [self(0)] * ncols
        for row, pc in zip(red, pivots):
            x[pc] = row[ncols]
        return x
