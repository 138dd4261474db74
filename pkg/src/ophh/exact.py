"""Exact sparse linear algebra over the integers and rationals.

Everything here is exact: entries are Python ints or ``fractions.Fraction``.
No floating point is used anywhere in the package.  Matrices are stored as
sparse triplets but the algorithms work on dense copies internally; all
matrices in this problem domain are desk-scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence


Scalar = int | Fraction


def _norm(v) -> Scalar:
    """Collapse integral Fractions to int; leave everything else alone."""
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


class ExactMatrix:
    """Immutable sparse matrix with exact scalar entries.

    Only nonzero entries are stored.  Scalars are ints or Fractions.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry index {(i, j)} out of bounds")
            v = _norm(v)
            if v != 0:
                clean[(i, j)] = v
        self.entries = clean

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[Scalar]]) -> "ExactMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def from_cols(cls, columns: Sequence[Sequence[Scalar]], rows: int | None = None) -> "ExactMatrix":
        ncols = len(columns)
        if rows is None:
            rows = len(columns[0]) if ncols else 0
        ent = {}
        for j, col in enumerate(columns):
            for i, v in enumerate(col):
                if v:
                    ent[(i, j)] = v
        return cls(rows, ncols, ent)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, {})

    # -- queries ---------------------------------------------------------------

    def get(self, i: int, j: int) -> Scalar:
        return self.entries.get((i, j), 0)

    def to_rows(self) -> list[list[Scalar]]:
        data = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            data[i][j] = v
        return data

    def column(self, j: int) -> list[Scalar]:
        return [self.get(i, j) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not self.entries

    def is_integer(self) -> bool:
        return all(isinstance(v, int) for v in self.entries.values())

    def is_diagonal(self) -> bool:
        return all(i == j for (i, j) in self.entries)

    def diagonal(self) -> list[Scalar]:
        n = min(self.rows, self.cols)
        return [self.get(i, i) for i in range(n)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return ExactMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scale(-1)

    def scale(self, c: Scalar) -> "ExactMatrix":
        if c == 0:
            return ExactMatrix.zero(self.rows, self.cols)
        return ExactMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        # group other's entries by row for sparse product
        by_row: dict[int, list[tuple[int, Scalar]]] = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        ent: dict[tuple[int, int], Scalar] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                ent[key] = ent.get(key, 0) + a * b
        return ExactMatrix(self.rows, other.cols, ent)

    def matvec(self, v: Sequence[Scalar]) -> list[Scalar]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        for (i, j), a in self.entries.items():
            if v[j]:
                out[i] = out[i] + a * v[j]
        return [_norm(x) for x in out]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i + self.rows, j)] = v
        return ExactMatrix(self.rows + other.rows, self.cols, ent)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i, j + self.cols)] = v
        return ExactMatrix(self.rows, self.cols + other.cols, ent)

    def det(self) -> Scalar:
        """Exact determinant (Bareiss fraction-free elimination for ints,
        plain Gaussian elimination over Q otherwise)."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [[Fraction(v) for v in row] for row in self.to_rows()]
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            inv = 1 / m[c][c]
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] * inv
                    for k in range(c, n):
                        m[r][k] -= f * m[c][k]
        return _norm(det)


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == D with U, V unimodular and D diagonal, d_i | d_{i+1}."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix

    def invariant_factors(self) -> list[int]:
        return [d for d in self.D.diagonal() if d != 0]


def snf(A: ExactMatrix) -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    Pivoting always selects a minimal-absolute-value nonzero entry, which
    keeps entry growth manageable on the small matrices we deal with.
    """
    if not A.is_integer():
        raise ValueError("snf requires integer entries")
    n, m = A.rows, A.cols
    M = A.to_rows()
    U = ExactMatrix.identity(n).to_rows()
    V = ExactMatrix.identity(m).to_rows()

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        Ms, Md = M[src], M[dst]
        for k in range(m):
            Md[k] += q * Ms[k]
        Us, Ud = U[src], U[dst]
        for k in range(n):
            Ud[k] += q * Us[k]

    def add_col(dst, src, q):
        for row in M:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    def min_pivot(t):
        best = None
        for i in range(t, n):
            row = M[i]
            for j in range(t, m):
                v = row[j]
                if v and (best is None or abs(v) < abs(best[2])):
                    best = (i, j, v)
        return best

    t = 0
    r = min(n, m)
    while t < r:
        piv = min_pivot(t)
        if piv is None:
            break
        i, j, _ = piv
        swap_rows(t, i)
        swap_cols(t, j)
        # clear row t and column t; re-pivot whenever a remainder pops up
        while True:
            p = M[t][t]
            dirty = False
            for i in range(t + 1, n):
                if M[i][t]:
                    q = M[i][t] // p
                    add_row(i, t, -q)
                    if M[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, m):
                if M[t][j]:
                    q = M[t][j] // p
                    add_col(j, t, -q)
                    if M[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if not dirty:
                break
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        diag = [M[i][i] for i in range(r)]
        for i in range(r - 1):
            a, b = diag[i], diag[i + 1]
            if a and b and b % a != 0:
                # fold entry i+1 into column i and re-diagonalize the block
                add_col(i, i + 1, 1)
                while True:
                    p = M[i][i]
                    q0 = M[i + 1][i]
                    if q0 == 0:
                        break
                    if p == 0 or (abs(q0) < abs(p)):
                        swap_rows(i, i + 1)
                        continue
                    add_row(i + 1, i, -(q0 // p))
                # clear the fill-in in row i
                p = M[i][i]
                while M[i][i + 1]:
                    q = M[i][i + 1] // p
                    add_col(i + 1, i, -q)
                    if M[i][i + 1]:
                        swap_cols(i, i + 1)
                        p = M[i][i]
                while M[i + 1][i]:
                    q = M[i + 1][i] // M[i][i]
                    add_row(i + 1, i, -q)
                    if M[i + 1][i]:
                        swap_rows(i, i + 1)
                changed = True

    # positive diagonal
    for i in range(r):
        if M[i][i] < 0:
            for k in range(m):
                M[i][k] = -M[i][k]
            for k in range(n):
                U[i][k] = -U[i][k]

    # zeros must trail: sort diagonal so nonzero entries come first
    order = sorted(range(r), key=lambda i: (M[i][i] == 0,))
    if order != list(range(r)):
        perm_rows = order + list(range(r, n))
        M2 = [M[i] for i in perm_rows]
        U2 = [U[i] for i in perm_rows]
        M, U = M2, U2
        for row in M:
            row[:r] = [row[j] for j in order]
        for row in V:
            row[:r] = [row[j] for j in order]

    return SmithDecomposition(
        ExactMatrix.from_rows(U), ExactMatrix.from_rows(M), ExactMatrix.from_rows(V)
    )


def _rref(data: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    rows = len(data)
    cols = len(data[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if data[i][c]), None)
        if piv is None:
            continue
        data[r], data[piv] = data[piv], data[r]
        inv = 1 / data[r][c]
        data[r] = [v * inv for v in data[r]]
        for i in range(rows):
            if i != r and data[i][c]:
                f = data[i][c]
                data[i] = [a - f * b for a, b in zip(data[i], data[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return data, pivots


def _to_fraction_rows(A: ExactMatrix) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in A.to_rows()]


def rank(A: ExactMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    _, pivots = _rref(_to_fraction_rows(A))
    return len(pivots)


def kernel_basis(A: ExactMatrix) -> list[list[Scalar]]:
    """Basis of ker A over Q, as exact coordinate vectors."""
    if A.cols == 0:
        return []
    if A.rows == 0:
        return [[1 if i == j else 0 for i in range(A.cols)] for j in range(A.cols)]
    R, pivots = _rref(_to_fraction_rows(A))
    pivot_set = set(pivots)
    free = [j for j in range(A.cols) if j not in pivot_set]
    basis = []
    for f in free:
        v: list[Scalar] = [0] * A.cols
        v[f] = 1
        for r, c in enumerate(pivots):
            if R[r][f]:
                v[c] = _norm(-R[r][f])
        basis.append(v)
    return basis


def solve_in_image(A: ExactMatrix, b: Sequence[Scalar]) -> Optional[list[Scalar]]:
    """Exact solution x of A @ x = b over Q, or None when b is not in im A.

    A dimension mismatch is a caller bug and raises ValueError.
    """
    if len(b) != A.rows:
        raise ValueError(f"rhs has length {len(b)}, expected {A.rows}")
    if A.rows == 0:
        return [0] * A.cols
    aug = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A.to_rows(), b)]
    R, pivots = _rref(aug)
    # a pivot in the augmented column means inconsistency
    if pivots and pivots[-1] == A.cols:
        return None
    x: list[Scalar] = [0] * A.cols
    for r, c in enumerate(pivots):
        x[c] = _norm(R[r][A.cols])
    return x


def integer_kernel_basis(A: ExactMatrix) -> list[list[int]]:
    """Basis of the saturated integer kernel lattice ker A ∩ Z^cols."""
    if not A.is_integer():
        raise ValueError("integer kernel requires integer entries")
    if A.cols == 0:
        return []
    if A.rows == 0 or A.is_zero():
        return [[1 if i == j else 0 for i in range(A.cols)] for j in range(A.cols)]
    dec = snf(A)
    r = len(dec.invariant_factors())
    # columns of V past the rank span the kernel lattice
    return [dec.V.column(j) for j in range(r, A.cols)]
