"""Finite-dimensional commutative unital Q-algebras and their first-order data.

An algebra A is given by structure constants on a chosen basis.  From it we
derive the derivation Lie algebra Der(A), the first-order module of
principal parts P = (A (x) A) / I^2 with its two A-actions and the universal
map d = p - q, and the notion of a left A-module / P-module used everywhere
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .ratlin import (Mat, QuotientSpace, Vec, coords_in_span, frac, is_zero_vec,
                     kernel, unit_vec, vector, zero_vec)


@dataclass(frozen=True)
class Violation:
    """One failed law, with enough data to reproduce the failure."""
    law: str
    where: tuple
    lhs: tuple = ()
    rhs: tuple = ()

    def describe(self) -> str:
        s = f"{self.law} at {self.where}"
        if self.lhs or self.rhs:
            s += f": lhs={list(self.lhs)} rhs={list(self.rhs)}"
        return s


Report = list[Violation]


class FiniteAlgebra:
    """Commutative unital algebra over Q given by structure constants.

    mul[i][j] is the coefficient vector of e_i * e_j; `unit` is the
    coefficient vector of 1.
    """

    def __init__(self, labels: Sequence[str], mul: Sequence[Sequence[Sequence]], unit: Sequence,
                 name: str = ""):
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.mul = tuple(tuple(vector(mul[i][j]) for j in range(self.dim))
                         for i in range(self.dim))
        self.unit = vector(unit)
        self.name = name or "A"
        if len(self.unit) != self.dim:
            raise ValueError("unit vector has wrong length")
        # multiplication-by-e_i matrices, used constantly
        self._mult = [Mat.from_columns([self.mul[i][j] for j in range(self.dim)])
                      for i in range(self.dim)]

    def mult_matrix(self, a: Vec) -> Mat:
        """Matrix of multiplication by the element with coefficients a."""
        M = Mat.zero(self.dim, self.dim)
        for i, c in enumerate(a):
            if c != 0:
                M = M + self._mult[i].scale(c)
        return M

    def multiply_vec(self, a: Vec, b: Vec) -> Vec:
        return self.mult_matrix(a).apply(b)

    def element(self, coeffs) -> "AlgElement":
        return AlgElement(self, vector(coeffs))

    def basis_element(self, i: int) -> "AlgElement":
        return AlgElement(self, unit_vec(self.dim, i))

    def one(self) -> "AlgElement":
        return AlgElement(self, self.unit)

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.name}, dim={self.dim})"


@dataclass(frozen=True)
class AlgElement:
    parent: FiniteAlgebra
    coeffs: Vec

    def __post_init__(self):
        if len(self.coeffs) != self.parent.dim:
            raise ValueError("coefficient vector has wrong length")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._same_parent(other)
        return AlgElement(self.parent, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._same_parent(other)
        return AlgElement(self.parent, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "AlgElement") -> "AlgElement":
        self._same_parent(other)
        return AlgElement(self.parent, self.parent.multiply_vec(self.coeffs, other.coeffs))

    def scale(self, c) -> "AlgElement":
        c = frac(c)
        return AlgElement(self.parent, tuple(c * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return is_zero_vec(self.coeffs)

    def _same_parent(self, other: "AlgElement") -> None:
        if other.parent is not self.parent:
            raise ValueError("elements live in different algebras")


def multiply(a: AlgElement, b: AlgElement) -> AlgElement:
    return a * b


def validate_algebra(A: FiniteAlgebra) -> Report:
    """Check commutativity, associativity and the unit law; report witnesses."""
    out: Report = []
    n = A.dim
    for i in range(n):
        for j in range(i + 1, n):
            if A.mul[i][j] != A.mul[j][i]:
                out.append(Violation("commutativity", (i, j), A.mul[i][j], A.mul[j][i]))
    for i in range(n):
        for j in range(n):
            ij = A.mul[i][j]
            for l in range(n):
                lhs = A.multiply_vec(ij, unit_vec(n, l))
                rhs = A.multiply_vec(unit_vec(n, i), A.mul[j][l])
                if lhs != rhs:
                    out.append(Violation("associativity", (i, j, l), lhs, rhs))
    for i in range(n):
        e = unit_vec(n, i)
        prod = A.multiply_vec(A.unit, e)
        if prod != e:
            out.append(Violation("unit", (i,), prod, e))
    return out


class Derivation:
    """Q-linear derivation of A, stored as a matrix on coefficient vectors."""

    def __init__(self, algebra: FiniteAlgebra, matrix: Mat):
        if matrix.rows != algebra.dim or matrix.cols != algebra.dim:
            raise ValueError("derivation matrix has wrong shape")
        self.algebra = algebra
        self.matrix = matrix

    def __call__(self, a: Vec) -> Vec:
        return self.matrix.apply(a)

    def leibniz_violations(self) -> Report:
        out: Report = []
        A, n = self.algebra, self.algebra.dim
        for i in range(n):
            for j in range(n):
                lhs = self.matrix.apply(A.mul[i][j])
                rhs = tuple(x + y for x, y in zip(
                    A.multiply_vec(self.matrix.apply(unit_vec(n, i)), unit_vec(n, j)),
                    A.multiply_vec(unit_vec(n, i), self.matrix.apply(unit_vec(n, j)))))
                if lhs != rhs:
                    out.append(Violation("leibniz", (i, j), lhs, rhs))
        d1 = self.matrix.apply(A.unit)
        if not is_zero_vec(d1):
            out.append(Violation("derivation-of-unit", (), d1, zero_vec(n)))
        return out

    def is_derivation(self) -> bool:
        return not self.leibniz_violations()


def derivation_bracket(x: Derivation, y: Derivation) -> Derivation:
    if x.algebra is not y.algebra:
        raise ValueError("derivations of different algebras")
    d = Derivation(x.algebra, x.matrix.commutator(y.matrix))
    assert d.is_derivation()
    return d


@dataclass
class AModule:
    """Left A-module of finite Q-dimension; optionally a P-module.

    action[i] is the matrix of e_i acting on module coordinates.  When
    right_action is present the module is treated as an (A,A)-bimodule
    annihilated by I^2, i.e. a P-module.
    """

    algebra: FiniteAlgebra
    dim: int
    action: list[Mat]
    right_action: Optional[list[Mat]] = None
    name: str = ""

    def act(self, a: Vec, m: Vec) -> Vec:
        return self.action_matrix(a).apply(m)

    def action_matrix(self, a: Vec) -> Mat:
        M = Mat.zero(self.dim, self.dim)
        for i, c in enumerate(a):
            if c != 0:
                M = M + self.action[i].scale(c)
        return M

    def right_action_matrix(self, a: Vec) -> Mat:
        if self.right_action is None:
            raise ValueError("module carries no right action")
        M = Mat.zero(self.dim, self.dim)
        for i, c in enumerate(a):
            if c != 0:
                M = M + self.right_action[i].scale(c)
        return M

    def d_action_matrix(self, i: int) -> Mat:
        """Action of d(e_i): right minus left multiplication."""
        if self.right_action is None:
            raise ValueError("module carries no right action")
        return self.right_action[i] - self.action[i]


def regular_module(A: FiniteAlgebra) -> AModule:
    """A as a module over itself (left multiplication)."""
    return AModule(A, A.dim, [A.mult_matrix(unit_vec(A.dim, i)) for i in range(A.dim)],
                   name=f"{A.name} (regular)")


def _action_violations(A: FiniteAlgebra, dim: int, action: list[Mat], side: str) -> Report:
    out: Report = []
    n = A.dim
    for i in range(n):
        for j in range(n):
            composed = action[i] @ action[j] if side == "left" else action[j] @ action[i]
            expect = Mat.zero(dim, dim)
            for k, c in enumerate(A.mul[i][j]):
                if c != 0:
                    expect = expect + action[k].scale(c)
            if composed != expect:
                out.append(Violation(f"{side}-action-structure", (i, j)))
    unit_act = Mat.zero(dim, dim)
    for k, c in enumerate(A.unit):
        if c != 0:
            unit_act = unit_act + action[k].scale(c)
    if unit_act != Mat.identity(dim):
        out.append(Violation(f"{side}-action-unit", ()))
    return out


def check_amodule(M: AModule) -> Report:
    return _action_violations(M.algebra, M.dim, M.action, "left")


def check_pmodule(M: AModule) -> Report:
    """Verify the P-module laws: both actions, commuting, I^2-annihilation."""
    out = check_amodule(M)
    if M.right_action is None:
        out.append(Violation("missing-right-action", ()))
        return out
    out += _action_violations(M.algebra, M.dim, M.right_action, "right")
    n = M.algebra.dim
    for i in range(n):
        for j in range(n):
            if M.action[i] @ M.right_action[j] != M.right_action[j] @ M.action[i]:
                out.append(Violation("left-right-commute", (i, j)))
    for i in range(n):
        da = M.d_action_matrix(i)
        for j in range(n):
            prod = da @ M.d_action_matrix(j)
            if not prod.is_zero():
                for m in range(M.dim):
                    col = prod.column(m)
                    if not is_zero_vec(col):
                        out.append(Violation("I2-annihilation", (i, j, m), col, zero_vec(M.dim)))
                        break
    return out


def compute_derivations(A: FiniteAlgebra) -> tuple[list[Derivation], AModule]:
    """Canonical Q-basis of Der(A) plus the left A-module structure on it.

    The Leibniz rule is a linear system on the n^2 matrix entries; its
    kernel (in canonical RREF form) is the derivation space.
    """
    n = A.dim
    rows: list[Vec] = []
    # unknown D[r][c] at flat index r*n + c; D(v) = D @ v
    for i in range(n):
        for j in range(n):
            prod = A.mul[i][j]
            for r in range(n):
                coeff = [Fraction(0)] * (n * n)
                # D(e_i e_j)_r
                for c in range(n):
                    if prod[c] != 0:
                        coeff[r * n + c] += prod[c]
                # - (D(e_i) e_j)_r = - sum_c D[c][i] (e_c e_j)_r
                for c in range(n):
                    m = A.mul[c][j][r]
                    if m != 0:
                        coeff[c * n + i] -= m
                for c in range(n):
                    m = A.mul[i][c][r]
                    if m != 0:
                        coeff[c * n + j] -= m
                rows.append(tuple(coeff))
    basis_vecs = kernel(Mat.from_rows(rows)) if rows else []
    ders = [Derivation(A, Mat.from_vector(v, n, n)) for v in basis_vecs]
    m = len(ders)
    action: list[Mat] = []
    for i in range(n):
        Ma = A.mult_matrix(unit_vec(n, i))
        cols: list[Vec] = []
        for d in ders:
            scaled = Ma @ d.matrix      # (a.D)(b) = a * D(b)
            coords = coords_in_span(basis_vecs, scaled.vectorize())
            if coords is None:
                raise AssertionError("A-action does not preserve the derivation space")
            cols.append(coords)
        action.append(Mat.from_columns(cols) if cols else Mat.zero(0, 0))
    module = AModule(A, m, action, name=f"Der({A.name})")
    return ders, module


@dataclass
class PrincipalParts:
    """P = (A (x) A) / I^2 with its bimodule structure and universal maps."""

    algebra: FiniteAlgebra
    dim: int
    left_action: list[Mat]       # action of e_i via e_i (x) 1
    right_action: list[Mat]      # action of e_i via 1 (x) e_i
    d_map: Mat                   # A -> P, c |-> class(1 (x) c - c (x) 1)
    p_map: Mat                   # c |-> class(1 (x) c)
    q_map: Mat                   # c |-> class(c (x) 1)
    quotient: QuotientSpace      # from A (x) A (dim n^2) onto P
    i_basis: list[Vec]           # basis of I inside A (x) A
    i2_basis: list[Vec]          # basis of I^2 inside A (x) A

    def module(self) -> AModule:
        return AModule(self.algebra, self.dim, self.left_action, self.right_action,
                       name=f"P({self.algebra.name})")

    def tensor_mult_matrix(self, t: Vec) -> Mat:
        """Multiplication by the tensor t inside A (x) A."""
        n = self.algebra.dim
        M = Mat.zero(n * n, n * n)
        for idx, c in enumerate(t):
            if c != 0:
                i, j = divmod(idx, n)
                M = M + self._tensor_basis_mult(i, j).scale(c)
        return M

    def _tensor_basis_mult(self, i: int, j: int) -> Mat:
        n = self.algebra.dim
        cols: list[Vec] = []
        for k in range(n):
            ik = self.algebra.mul[i][k]
            for l in range(n):
                jl = self.algebra.mul[j][l]
                col = [Fraction(0)] * (n * n)
                for r in range(n):
                    if ik[r] == 0:
                        continue
                    for s in range(n):
                        if jl[s] != 0:
                            col[r * n + s] += ik[r] * jl[s]
                cols.append(tuple(col))
        return Mat.from_columns(cols)

    def multiply(self, u: Vec, v: Vec) -> Vec:
        """Product in P via lifts to A (x) A."""
        ul = self.quotient.sec.apply(u)
        vl = self.quotient.sec.apply(v)
        return self.quotient.proj.apply(self.tensor_mult_matrix(ul).apply(vl))


def build_principal_parts(A: FiniteAlgebra) -> PrincipalParts:
    """Construct P = (A (x) A)/I^2, I the kernel of the multiplication map."""
    n = A.dim
    # multiplication map mu: A (x) A -> A, columns indexed by (i, j)
    mu_cols = [A.mul[i][j] for i in range(n) for j in range(n)]
    mu = Mat.from_columns(mu_cols)
    i_basis = kernel(mu)
    # I^2 = span of pairwise products of a basis of I
    dummy = PrincipalParts(A, 0, [], [], Mat.zero(0, 0), Mat.zero(0, 0), Mat.zero(0, 0),
                           QuotientSpace(n * n, []), i_basis, [])
    products = [dummy.tensor_mult_matrix(u).apply(v) for u in i_basis for v in i_basis]
    from .ratlin import span_basis
    i2_basis = span_basis(products)
    quot = QuotientSpace(n * n, i2_basis)
    proj, sec = quot.proj, quot.sec

    def descend(tensor_mult: Mat) -> Mat:
        return proj @ tensor_mult @ sec

    left = [descend(_tensor_left(A, i)) for i in range(n)]
    right = [descend(_tensor_right(A, i)) for i in range(n)]
    # p(c) = 1 (x) c, q(c) = c (x) 1, d = p - q
    one = A.unit
    p_cols, q_cols = [], []
    for c in range(n):
        t_p = [Fraction(0)] * (n * n)
        t_q = [Fraction(0)] * (n * n)
        for i, oc in enumerate(one):
            if oc != 0:
                t_p[i * n + c] += oc
                t_q[c * n + i] += oc
        p_cols.append(proj.apply(tuple(t_p)))
        q_cols.append(proj.apply(tuple(t_q)))
    p_map = Mat.from_columns(p_cols)
    q_map = Mat.from_columns(q_cols)
    return PrincipalParts(A, quot.dim, left, right, p_map - q_map, p_map, q_map,
                          quot, i_basis, i2_basis)


def _tensor_left(A: FiniteAlgebra, i: int) -> Mat:
    """Multiplication by e_i (x) 1 on A (x) A."""
    n = A.dim
    Mi = A.mult_matrix(unit_vec(n, i))
    cols: list[Vec] = []
    for k in range(n):
        left = Mi.apply(unit_vec(n, k))
        for l in range(n):
            col = [Fraction(0)] * (n * n)
            for r in range(n):
                if left[r] != 0:
                    col[r * n + l] += left[r]
            cols.append(tuple(col))
    return Mat.from_columns(cols)


def _tensor_right(A: FiniteAlgebra, i: int) -> Mat:
    """Multiplication by 1 (x) e_i on A (x) A."""
    n = A.dim
    Mi = A.mult_matrix(unit_vec(n, i))
    cols: list[Vec] = []
    for k in range(n):
        for l in range(n):
            right = Mi.apply(unit_vec(n, l))
            col = [Fraction(0)] * (n * n)
            for s in range(n):
                if right[s] != 0:
                    col[k * n + s] += right[s]
            cols.append(tuple(col))
    return Mat.from_columns(cols)


def check_principal_parts(P: PrincipalParts) -> Report:
    """Internal consistency of the quotient: bimodule laws and d = p - q."""
    out = check_pmodule(P.module())
    if P.d_map != P.p_map - P.q_map:
        out.append(Violation("d-equals-p-minus-q", ()))
    return out


def kahler_differentials_dim(A: FiniteAlgebra) -> int:
    """dim of Omega^1 = I/I^2, computed from independent bases of I and I^2."""
    P = build_principal_parts(A)
    return len(P.i_basis) - len(P.i2_basis)
