"""Shared helpers for the test suite: connection sampling and sympy bridges."""

import random
from fractions import Fraction

import sympy

from dliecalc.conncat import LPsiConnection
from dliecalc.finalg import AModule, FiniteAlgebra
from dliecalc.lierinehart import LieRinehartAlgebra
from dliecalc.ratlin import Mat, QuotientSpace, kernel, unit_vec, vector


def lpsi_space(L: LieRinehartAlgebra, E: AModule) -> list[tuple[Mat, list[Mat]]]:
    """Basis of the linear space of valid (psi, nabla) pairs on (L, E).

    The defining laws (psi commutes with A, the twisted Leibniz rule,
    A-linearity of nabla in the L slot) are all linear in the entries.
    """
    na, m, d = L.algebra.dim, L.dim, E.dim
    blk = d * d
    total = blk * (1 + m)

    def unpack(v):
        psi = Mat.from_vector(v[:blk], d, d)
        nabla = [Mat.from_vector(v[blk * (1 + j):blk * (2 + j)], d, d)
                 for j in range(m)]
        return psi, nabla

    def nabla_of(nabla, x):
        out = Mat.zero(d, d)
        for i, c in enumerate(x):
            if c != 0:
                out = out + nabla[i].scale(c)
        return out

    cols = []
    for t in range(total):
        psi, nabla = unpack(unit_vec(total, t))
        rows: list = []
        for a in range(na):
            Aa = E.action[a]
            rows.extend((psi @ Aa - Aa @ psi).vectorize())
            for j in range(m):
                anchored = L.anchor[j].apply(unit_vec(na, a))
                leib = nabla[j] @ Aa - Aa @ nabla[j] \
                    - E.action_matrix(anchored) @ psi
                rows.extend(leib.vectorize())
                scaled = L.carrier.action[a].apply(unit_vec(m, j))
                rows.extend((nabla_of(nabla, scaled) - Aa @ nabla[j]).vectorize())
        cols.append(tuple(rows))
    return [unpack(v) for v in kernel(Mat.from_columns(cols))]


def random_lpsi(L: LieRinehartAlgebra, E: AModule,
                rng: random.Random) -> LPsiConnection:
    basis = lpsi_space(L, E)
    d, m = E.dim, L.dim
    psi, nabla = Mat.zero(d, d), [Mat.zero(d, d) for _ in range(m)]
    coeffs = [Fraction(rng.randint(-2, 2)) for _ in basis]
    if basis and all(c == 0 for c in coeffs):
        coeffs[0] = Fraction(1)
    for c, (p, nb) in zip(coeffs, basis):
        if c != 0:
            psi = psi + p.scale(c)
            nabla = [acc + b.scale(c) for acc, b in zip(nabla, nb)]
    return LPsiConnection(L, E, psi, nabla)


def identity_lpsi_space(L: LieRinehartAlgebra,
                        E: AModule) -> list[LPsiConnection]:
    """All basis-combinations with psi = identity (affine slice), as a
    particular pair plus the psi = 0 directions."""
    basis = lpsi_space(L, E)
    d = E.dim
    particular = None
    directions = []
    for psi, nabla in basis:
        if psi == Mat.identity(d) and particular is None:
            particular = (psi, nabla)
        elif psi.is_zero():
            directions.append(nabla)
    if particular is None:
        # look for any pair whose psi is a nonzero multiple of the identity
        for psi, nabla in basis:
            if psi.data and psi.data[0][0] != 0 \
                    and psi == Mat.identity(d).scale(psi.data[0][0]):
                c = 1 / psi.data[0][0]
                particular = (psi.scale(c), [nb.scale(c) for nb in nabla])
                break
    if particular is None:
        return []
    out = [LPsiConnection(L, E, particular[0], particular[1])]
    for nb in directions:
        out.append(LPsiConnection(L, E, particular[0],
                                  [a + b for a, b in zip(particular[1], nb)]))
    return out


def quotient_module(A: FiniteAlgebra, relations: list, name: str = "") -> AModule:
    """A / (ideal spanned by the relation vectors), as an A-module."""
    rel = [vector(r) for r in relations]
    closed = list(rel)
    for a in range(A.dim):
        closed.extend(A.mult_matrix(unit_vec(A.dim, a)).apply(r) for r in rel)
    q = QuotientSpace(A.dim, closed)
    action = [q.proj @ A.mult_matrix(unit_vec(A.dim, a)) @ q.sec
              for a in range(A.dim)]
    return AModule(A, q.dim, action, name=name or f"{A.name}/rel")


def to_sympy(M: Mat) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator)
                          for x in row] for row in M.data])


def from_sympy_vec(v) -> tuple:
    return vector(Fraction(sympy.nsimplify(x)) for x in v)
