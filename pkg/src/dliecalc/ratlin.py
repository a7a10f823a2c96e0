"""Exact dense linear algebra over the rationals.

Everything downstream (derivation spaces, cochain complexes, map
classification) reduces to rank / kernel / affine-solve over Q, so this
module works exclusively with `fractions.Fraction` and never touches
floats.  All outputs are canonical (reduced row echelon form, fixed
ordering) so results are bit-reproducible across runs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vec = tuple[Fraction, ...]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point input is not allowed; use Fraction or str")
    return Fraction(x)


def vector(entries: Iterable) -> Vec:
    return tuple(frac(x) for x in entries)


def zero_vec(n: int) -> Vec:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c, u: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in u)


def vec_concat(*parts: Vec) -> Vec:
    out: list[Fraction] = []
    for p in parts:
        out.extend(p)
    return tuple(out)


def is_zero_vec(u: Vec) -> bool:
    return all(a == 0 for a in u)


class Mat:
    """Immutable dense matrix over Q."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence], cols: int | None = None):
        rows = tuple(tuple(frac(x) for x in row) for row in data)
        self.data = rows
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else (cols or 0)
        for row in rows:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")

    @staticmethod
    def zero(rows: int, cols: int) -> "Mat":
        z = Fraction(0)
        return Mat([[z] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat([[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)])

    @staticmethod
    def from_columns(cols: Sequence[Vec]) -> "Mat":
        if not cols:
            return Mat.zero(0, 0)
        n = len(cols[0])
        return Mat([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    @staticmethod
    def from_rows(rows: Sequence[Vec]) -> "Mat":
        return Mat([list(r) for r in rows])

    def column(self, j: int) -> Vec:
        return tuple(self.data[i][j] for i in range(self.rows))

    def row(self, i: int) -> Vec:
        return self.data[i]

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Mat":
        return Mat([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
                   cols=self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.cols == other.cols and self.data == other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __add__(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return Mat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
                   cols=self.cols)

    def __sub__(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in subtraction")
        return Mat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
                   cols=self.cols)

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in row] for row in self.data], cols=self.cols)

    def scale(self, c) -> "Mat":
        c = frac(c)
        return Mat([[c * a for a in row] for row in self.data], cols=self.cols)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        ot = other.transpose().data
        return Mat([[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.data],
                   cols=other.cols)

    def apply(self, v: Vec) -> Vec:
        if len(v) != self.cols:
            raise ValueError("shape mismatch in matrix-vector product")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.data)

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.data for a in row)

    def vectorize(self) -> Vec:
        """Row-major flattening; used to treat operators as vectors."""
        return tuple(a for row in self.data for a in row)

    @staticmethod
    def from_vector(v: Vec, rows: int, cols: int) -> "Mat":
        if len(v) != rows * cols:
            raise ValueError("length mismatch in from_vector")
        return Mat([v[i * cols:(i + 1) * cols] for i in range(rows)])

    def commutator(self, other: "Mat") -> "Mat":
        return self @ other - other @ self

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(a) for a in row) for row in self.data)
        return f"Mat[{self.rows}x{self.cols}: {body}]"


def rref(M: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan over Q)."""
    a = [list(row) for row in M.data]
    nrows, ncols = M.rows, M.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return Mat(a), tuple(pivots)


def rank(M: Mat) -> int:
    _, pivots = rref(M)
    return len(pivots)


def kernel(M: Mat) -> list[Vec]:
    """Canonical basis of the null space of M.

    The basis is the RREF of the standard free-variable basis, ordered by
    pivot position, so it is deterministic for a fixed input.
    """
    R, pivots = rref(M)
    pivot_set = set(pivots)
    free = [j for j in range(M.cols) if j not in pivot_set]
    basis: list[Vec] = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -R.data[r][f]
        basis.append(tuple(v))
    return span_basis(basis)


def span_basis(vectors: Sequence[Vec]) -> list[Vec]:
    """Canonical (RREF) basis of the span of the given vectors."""
    vs = [v for v in vectors if not is_zero_vec(v)]
    if not vs:
        return []
    R, pivots = rref(Mat.from_rows(vs))
    return [R.row(i) for i in range(len(pivots))]


def in_span(basis: Sequence[Vec], v: Vec) -> bool:
    return coords_in_span(basis, v) is not None


def coords_in_span(basis: Sequence[Vec], v: Vec) -> Optional[Vec]:
    """Coefficients of v as a combination of the given vectors, or None."""
    if is_zero_vec(v):
        return zero_vec(len(basis))
    if not basis:
        return None
    M = Mat.from_columns(list(basis))
    sol = solve_affine(M, v)
    if sol is None:
        return None
    return sol[0]


def solve_affine(M: Mat, b: Vec) -> Optional[tuple[Vec, list[Vec]]]:
    """Solve Mx = b exactly.

    Returns None when the system is inconsistent, else a particular
    solution together with a canonical kernel basis describing the full
    solution set.
    """
    if len(b) != M.rows:
        raise ValueError(f"dimension mismatch: matrix has {M.rows} rows, vector has {len(b)}")
    aug = Mat([list(row) + [bv] for row, bv in zip(M.data, b)])
    R, pivots = rref(aug)
    if M.cols in pivots:
        return None
    x = [Fraction(0)] * M.cols
    for r, p in enumerate(pivots):
        x[p] = R.data[r][M.cols]
    return tuple(x), kernel(M)


class QuotientSpace:
    """Quotient of Q^n by the span of the given vectors.

    Carries a projection `proj` (n -> q) and a section `sec` (q -> n)
    with proj @ sec = id and ker(proj) = span(relations).  The section
    picks the non-pivot coordinates, which makes both maps canonical.
    """

    def __init__(self, ambient_dim: int, relations: Sequence[Vec]):
        self.ambient_dim = ambient_dim
        self.relations = span_basis(relations)
        if self.relations:
            R, pivots = rref(Mat.from_rows(self.relations))
            self._reduced = R
            self._pivots = pivots
        else:
            self._reduced = None
            self._pivots = ()
        pivot_set = set(self._pivots)
        self.coset_coords = tuple(j for j in range(ambient_dim) if j not in pivot_set)
        self.dim = len(self.coset_coords)
        if self.dim:
            self.proj = Mat.from_rows([self._project(unit_vec(ambient_dim, j))
                                       for j in range(ambient_dim)]).transpose()
        else:
            self.proj = Mat.zero(0, ambient_dim)
        self.sec = Mat.from_columns([unit_vec(ambient_dim, c) for c in self.coset_coords]) \
            if self.dim else Mat.zero(ambient_dim, 0)

    def _project(self, v: Vec) -> Vec:
        w = list(v)
        if self._reduced is not None:
            for r, p in enumerate(self._pivots):
                if w[p] != 0:
                    f = w[p]
                    row = self._reduced.row(r)
                    w = [x - f * y for x, y in zip(w, row)]
        return tuple(w[c] for c in self.coset_coords)
