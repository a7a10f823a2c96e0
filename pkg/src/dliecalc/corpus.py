"""Desk-scale test corpus: small algebras, Lie-Rinehart algebras, cocycles.

These builders are used by the CLI samples and the test suite.  Everything
here is deterministic; randomized constructions take an explicit seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .finalg import FiniteAlgebra, AModule, regular_module
from .lierinehart import (Cochain, FlatConnectionModule, LieRinehartAlgebra,
                          a_linear_cochain_basis, derivations_lr, is_cocycle,
                          lr_differential, trivial_coefficients)
from .ratlin import Mat, kernel, span_basis, unit_vec, zero_vec


def rational_field() -> FiniteAlgebra:
    return FiniteAlgebra(["1"], [[[1]]], [1], name="Q")


def truncated_polynomials(n: int) -> FiniteAlgebra:
    """Q[x]/(x^n) on the basis 1, x, ..., x^(n-1)."""
    mul = [[[1 if k == i + j else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    labels = ["1"] + [f"x^{i}" if i > 1 else "x" for i in range(1, n)]
    return FiniteAlgebra(labels, mul, [1] + [0] * (n - 1), name=f"Q[x]/(x^{n})")


def dual_numbers() -> FiniteAlgebra:
    return truncated_polynomials(2)


def fat_point_plane() -> FiniteAlgebra:
    """Q[x,y]/(x,y)^2 on the basis 1, x, y."""
    z = [0, 0, 0]
    mul = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], z, z],
        [[0, 0, 1], z, z],
    ]
    return FiniteAlgebra(["1", "x", "y"], mul, [1, 0, 0], name="Q[x,y]/(x,y)^2")


def split_quadratic() -> FiniteAlgebra:
    """Q x Q on the idempotent basis."""
    mul = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    return FiniteAlgebra(["e1", "e2"], mul, [1, 1], name="QxQ")


def corpus_algebras() -> dict[str, FiniteAlgebra]:
    return {
        "Q": rational_field(),
        "dual": dual_numbers(),
        "trunc3": truncated_polynomials(3),
        "trunc4": truncated_polynomials(4),
        "fatplane": fat_point_plane(),
        "QxQ": split_quadratic(),
    }


def sub_lr_span(L: LieRinehartAlgebra, generators: list, name: str = "") -> LieRinehartAlgebra:
    """The A-span of the given carrier vectors, as a Lie-Rinehart subalgebra.

    Raises if the span is not closed under the bracket.
    """
    from .ratlin import coords_in_span, vector
    vecs = []
    for g in generators:
        g = vector(g)
        for a in range(L.algebra.dim):
            vecs.append(L.carrier.action[a].apply(g))
    basis = span_basis(vecs)
    m = len(basis)
    bracket, anchor, action_cols = [], [], [[] for _ in range(L.algebra.dim)]
    for u in basis:
        row = []
        for v in basis:
            c = coords_in_span(basis, L.bracket_vec(u, v))
            if c is None:
                raise ValueError("span is not closed under the bracket")
            row.append(c)
        bracket.append(row)
        anchor.append(L.anchor_vec(u))
        for a in range(L.algebra.dim):
            c = coords_in_span(basis, L.carrier.action[a].apply(u))
            assert c is not None
            action_cols[a].append(c)
    action = [Mat.from_columns(cols) if cols else Mat.zero(0, 0) for cols in action_cols]
    carrier = AModule(L.algebra, m, action, name=name or f"sub({L.name})")
    return LieRinehartAlgebra(carrier, bracket, anchor, name=name or f"sub({L.name})")


def free_rank_one_lr(A: FiniteAlgebra, delta: Mat | None = None,
                     name: str = "") -> LieRinehartAlgebra:
    """L = A.e, free of rank one, with anchor alpha(a.e) = a.delta.

    The bracket is forced: [a.e, b.e] = (a delta(b) - b delta(a)).e.
    delta=None gives the abelian rank-one algebroid with zero anchor.
    """
    n = A.dim
    if delta is None:
        delta = Mat.zero(n, n)
    carrier = regular_module(A)
    carrier.name = name or f"A.e({A.name})"
    bracket = []
    for i in range(n):
        row = []
        ei = unit_vec(n, i)
        for j in range(n):
            ej = unit_vec(n, j)
            val = A.multiply_vec(ei, delta.apply(ej))
            val = tuple(a - b for a, b in
                        zip(val, A.multiply_vec(ej, delta.apply(ei))))
            row.append(val)
        bracket.append(row)
    anchor = [A.mult_matrix(unit_vec(n, i)) @ delta for i in range(n)]
    return LieRinehartAlgebra(carrier, bracket, anchor,
                              name=name or f"A.e({A.name})")


def free_abelian_lr(A: FiniteAlgebra, rank: int = 2,
                    name: str = "") -> LieRinehartAlgebra:
    """Free A-module of the given rank with zero bracket and zero anchor."""
    n = A.dim
    m = n * rank
    reg = regular_module(A)
    action = []
    for a in range(n):
        block = reg.action[a]
        rows = []
        for r in range(rank):
            for i in range(n):
                row = [0] * m
                for j in range(n):
                    row[r * n + j] = block.data[i][j]
                rows.append(row)
        action.append(Mat(rows))
    carrier = AModule(A, m, action, name=name or f"A^{rank}({A.name})")
    bracket = [[zero_vec(m) for _ in range(m)] for _ in range(m)]
    anchor = [Mat.zero(n, n) for _ in range(m)]
    return LieRinehartAlgebra(carrier, bracket, anchor,
                              name=name or f"A^{rank}({A.name})")


def corpus_free_lrs() -> dict[str, LieRinehartAlgebra]:
    """Lie-Rinehart algebras with free carrier, keyed by a short tag."""
    out: dict[str, LieRinehartAlgebra] = {}
    for tag, A in corpus_algebras().items():
        out[f"{tag}/abelian"] = free_rank_one_lr(A, name=f"abelian({A.name})")
        out[f"{tag}/free2"] = free_abelian_lr(A, 2, name=f"free2({A.name})")
        der = derivations_lr(A)
        if der.dim:
            # anchor the free generator at the first basis derivation
            out[f"{tag}/rank1"] = free_rank_one_lr(A, der.anchor[0],
                                                   name=f"rank1({A.name})")
    return out


def zero_cocycle(L: LieRinehartAlgebra) -> Cochain:
    return Cochain.zero(L, trivial_coefficients(L), 2)


def h2_representatives(L: LieRinehartAlgebra) -> list[Cochain]:
    """Representative 2-cocycles for a basis of H^2(L, A).

    Z^2 is the kernel of d^2 on the A-multilinear 2-cochains; B^2 is the
    image of d^1 on C^1.  Representatives are canonical (RREF coordinates).
    """
    M = trivial_coefficients(L)
    c2 = a_linear_cochain_basis(L, M, 2)
    if not c2:
        return []
    d2_cols = [lr_differential(c).flatten() for c in c2]
    if len(d2_cols[0]) == 0:
        # fewer than 3 basis directions: C^3 is trivial, all of C^2 is closed
        zcoords = [unit_vec(len(c2), t) for t in range(len(c2))]
    else:
        zcoords = kernel(Mat.from_columns(d2_cols))
    zbasis = [_combine(c2, v) for v in zcoords]
    c1 = a_linear_cochain_basis(L, M, 1)
    bflat = span_basis([lr_differential(p).flatten() for p in c1])
    reps = []
    seen = list(bflat)
    for z in zbasis:
        fl = z.flatten()
        grown = span_basis(seen + [fl])
        if len(grown) > len(span_basis(seen)):
            reps.append(z)
            seen.append(fl)
    for r in reps:
        ok, _ = is_cocycle(r)
        assert ok
    return reps


def _combine(basis: list[Cochain], coords) -> Cochain:
    out = Cochain.zero(basis[0].lr, basis[0].coeffs, basis[0].degree)
    for c, b in zip(coords, basis):
        if c != 0:
            out = out + b.scale(c)
    return out


def random_coboundary(L: LieRinehartAlgebra, rng: random.Random) -> Cochain:
    """d1 of a random A-linear 1-cochain; always a 2-cocycle."""
    M = trivial_coefficients(L)
    c1 = a_linear_cochain_basis(L, M, 1)
    phi = Cochain.zero(L, M, 1)
    for b in c1:
        phi = phi + b.scale(Fraction(rng.randint(-3, 3)))
    return lr_differential(phi)


def corpus_cocycles(L: LieRinehartAlgebra, rng: random.Random | None = None,
                    coboundaries: int = 2) -> list[Cochain]:
    """Zero, discovered nonzero classes, and random coboundaries."""
    rng = rng or random.Random(20240901)
    out = [zero_cocycle(L)]
    out.extend(h2_representatives(L))
    for _ in range(coboundaries):
        out.append(random_coboundary(L, rng))
    return out
