"""Lie-Rinehart algebras, flat coefficient modules and their cochain complex.

Cochains are alternating A-multilinear forms stored by their values on
strictly increasing basis index tuples, which makes equality testing and
golden-file output canonical.  Only degrees p <= 2 (with a differential
into degree 3 for cocycle checking) are provided; nothing downstream
needs more.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from .finalg import (AModule, Derivation, FiniteAlgebra, Report, Violation,
                     check_amodule, compute_derivations, regular_module)
from .ratlin import (Mat, Vec, coords_in_span, is_zero_vec, kernel, solve_affine,
                     unit_vec, vec_add, vec_scale, vec_sub, vector, zero_vec)


class LieRinehartAlgebra:
    """A-module L with a Q-bilinear bracket and anchor into Der(A).

    bracket[i][j] is the coefficient vector of [e_i, e_j]; anchor[i] is the
    derivation matrix of the anchor applied to e_i.
    """

    def __init__(self, carrier: AModule, bracket: Sequence[Sequence], anchor: Sequence[Mat],
                 name: str = "L"):
        self.carrier = carrier
        self.dim = carrier.dim
        self.bracket = tuple(tuple(vector(bracket[i][j]) for j in range(self.dim))
                             for i in range(self.dim))
        self.anchor = list(anchor)
        self.name = name

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.carrier.algebra

    def bracket_vec(self, u: Vec, v: Vec) -> Vec:
        out = zero_vec(self.dim)
        for i, ci in enumerate(u):
            if ci == 0:
                continue
            for j, cj in enumerate(v):
                if cj != 0:
                    out = vec_add(out, vec_scale(ci * cj, self.bracket[i][j]))
        return out

    def anchor_vec(self, u: Vec) -> Mat:
        n = self.algebra.dim
        M = Mat.zero(n, n)
        for i, c in enumerate(u):
            if c != 0:
                M = M + self.anchor[i].scale(c)
        return M

    def __repr__(self) -> str:
        return f"LieRinehartAlgebra({self.name}, dim={self.dim})"


def derivations_lr(A: FiniteAlgebra) -> LieRinehartAlgebra:
    """The tautological Lie-Rinehart algebra Der(A) with identity anchor."""
    ders, module = compute_derivations(A)
    m = len(ders)
    vecs = [d.matrix.vectorize() for d in ders]
    bracket = []
    for i in range(m):
        row = []
        for j in range(m):
            comm = ders[i].matrix.commutator(ders[j].matrix)
            coords = coords_in_span(vecs, comm.vectorize())
            assert coords is not None, "Der(A) not closed under bracket"
            row.append(coords)
        bracket.append(row)
    return LieRinehartAlgebra(module, bracket, [d.matrix for d in ders],
                              name=f"Der({A.name})")


def validate_lr(L: LieRinehartAlgebra) -> Report:
    """All five Lie-Rinehart laws, with witness indices on failure."""
    out: Report = check_amodule(L.carrier)
    A, n, m = L.algebra, L.algebra.dim, L.dim
    for i in range(m):
        if not is_zero_vec(L.bracket[i][i]):
            out.append(Violation("alternating", (i,), L.bracket[i][i]))
        for j in range(i + 1, m):
            if L.bracket[i][j] != vec_scale(-1, L.bracket[j][i]):
                out.append(Violation("antisymmetry", (i, j), L.bracket[i][j], L.bracket[j][i]))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                jac = vec_add(
                    L.bracket_vec(unit_vec(m, i), L.bracket[j][k]),
                    vec_add(L.bracket_vec(unit_vec(m, j), L.bracket_vec(unit_vec(m, k), unit_vec(m, i))),
                            L.bracket_vec(unit_vec(m, k), L.bracket[i][j])))
                if not is_zero_vec(jac):
                    out.append(Violation("jacobi", (i, j, k), jac))
    for i in range(m):
        for j in range(m):
            lhs = L.anchor_vec(L.bracket[i][j])
            rhs = L.anchor[i].commutator(L.anchor[j])
            if lhs != rhs:
                out.append(Violation("anchor-lie-map", (i, j)))
    for a in range(n):
        for i in range(m):
            scaled = L.carrier.action[a].apply(unit_vec(m, i))
            lhs = L.anchor_vec(scaled)
            rhs = A.mult_matrix(unit_vec(n, a)) @ L.anchor[i]
            if lhs != rhs:
                out.append(Violation("anchor-A-linear", (a, i)))
    for i in range(m):
        for a in range(n):
            for j in range(m):
                cv = L.carrier.action[a].apply(unit_vec(m, j))
                lhs = L.bracket_vec(unit_vec(m, i), cv)
                anchored = L.anchor[i].apply(unit_vec(n, a))   # alpha(e_i)(e_a) in A
                rhs = vec_add(L.carrier.action[a].apply(L.bracket[i][j]),
                              L.carrier.action_matrix(anchored).apply(unit_vec(m, j)))
                if lhs != rhs:
                    out.append(Violation("anchor-leibniz", (i, a, j), lhs, rhs))
    return out


@dataclass
class FlatConnectionModule:
    """Coefficient module: an A-module M with a flat L-connection nabla.

    nabla[i] is the Q-linear operator of e_i in L acting on M; values on a
    general u follow by Q-linearity (A-linearity in u is a checkable law,
    not an assumption of the storage).
    """

    lr: LieRinehartAlgebra
    carrier: AModule
    nabla: list[Mat]
    name: str = ""

    def nabla_vec(self, u: Vec) -> Mat:
        M = Mat.zero(self.carrier.dim, self.carrier.dim)
        for i, c in enumerate(u):
            if c != 0:
                M = M + self.nabla[i].scale(c)
        return M


def trivial_coefficients(L: LieRinehartAlgebra) -> FlatConnectionModule:
    """A itself, with nabla(u) acting through the anchor."""
    return FlatConnectionModule(L, regular_module(L.algebra), list(L.anchor),
                                name=f"A over {L.name}")


def validate_flat_connection(M: FlatConnectionModule) -> Report:
    out: Report = check_amodule(M.carrier)
    L = M.lr
    A, n, m = L.algebra, L.algebra.dim, L.dim
    d = M.carrier.dim
    for i in range(m):
        for a in range(n):
            # connection law as operators: nabla(u) A_a = A_a nabla(u) + act(alpha(u)(a))
            lhs = M.nabla[i] @ M.carrier.action[a]
            anchored = L.anchor[i].apply(unit_vec(n, a))
            rhs = M.carrier.action[a] @ M.nabla[i] + M.carrier.action_matrix(anchored)
            if lhs != rhs:
                out.append(Violation("connection-law", (i, a)))
    for a in range(n):
        for i in range(m):
            scaled = L.carrier.action[a].apply(unit_vec(m, i))
            if M.nabla_vec(scaled) != M.carrier.action[a] @ M.nabla[i]:
                out.append(Violation("A-linearity-in-L", (a, i)))
    for i in range(m):
        for j in range(m):
            if M.nabla_vec(L.bracket[i][j]) != M.nabla[i].commutator(M.nabla[j]):
                out.append(Violation("flatness", (i, j)))
    return out


class Cochain:
    """Alternating A-multilinear p-form on L with values in a flat module."""

    def __init__(self, lr: LieRinehartAlgebra, coeffs: FlatConnectionModule, degree: int,
                 values: dict[tuple[int, ...], Vec]):
        if degree < 0 or degree > 3:
            raise ValueError("only degrees 0..3 are supported")
        self.lr = lr
        self.coeffs = coeffs
        self.degree = degree
        d = coeffs.carrier.dim
        self.values = {key: vector(values.get(key, zero_vec(d)))
                       for key in combinations(range(lr.dim), degree)}

    @staticmethod
    def zero(lr: LieRinehartAlgebra, coeffs: FlatConnectionModule, degree: int) -> "Cochain":
        return Cochain(lr, coeffs, degree, {})

    def value(self, indices: tuple[int, ...]) -> Vec:
        """Value on a tuple of basis indices, with the alternating sign."""
        if len(set(indices)) != len(indices):
            return zero_vec(self.coeffs.carrier.dim)
        order = sorted(range(len(indices)), key=lambda t: indices[t])
        sign = _perm_sign(order)
        key = tuple(sorted(indices))
        return vec_scale(sign, self.values[key])

    def evaluate(self, *args: Vec) -> Vec:
        """Multilinear evaluation on arbitrary coefficient vectors."""
        if len(args) != self.degree:
            raise ValueError("wrong number of arguments")
        acc = [zero_vec(self.coeffs.carrier.dim)]
        _accumulate(self, args, 0, Fraction(1), (), acc)
        return acc[0]

    def is_zero(self) -> bool:
        return all(is_zero_vec(v) for v in self.values.values())

    def __add__(self, other: "Cochain") -> "Cochain":
        self._compatible(other)
        return Cochain(self.lr, self.coeffs, self.degree,
                       {k: vec_add(v, other.values[k]) for k, v in self.values.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._compatible(other)
        return Cochain(self.lr, self.coeffs, self.degree,
                       {k: vec_sub(v, other.values[k]) for k, v in self.values.items()})

    def scale(self, c) -> "Cochain":
        return Cochain(self.lr, self.coeffs, self.degree,
                       {k: vec_scale(c, v) for k, v in self.values.items()})

    def flatten(self) -> Vec:
        """All stored values in key order, as one vector."""
        out: list[Fraction] = []
        for key in sorted(self.values):
            out.extend(self.values[key])
        return tuple(out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.values == other.values)

    def _compatible(self, other: "Cochain") -> None:
        if self.lr is not other.lr and self.lr.bracket != other.lr.bracket:
            raise ValueError("cochains on different Lie-Rinehart algebras")
        if self.degree != other.degree:
            raise ValueError("cochains of different degree")
        if self.coeffs.carrier.dim != other.coeffs.carrier.dim:
            raise ValueError("cochains with different coefficients")


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _accumulate(c: Cochain, args: Sequence[Vec], pos: int, coeff: Fraction,
                indices: tuple[int, ...], out_acc: list) -> None:
    if pos == c.degree:
        out_acc[0] = vec_add(out_acc[0], vec_scale(coeff, c.value(indices)))
        return
    for i, x in enumerate(args[pos]):
        if x != 0:
            _accumulate(c, args, pos + 1, coeff * x, indices + (i,), out_acc)


def check_amultilinear(c: Cochain) -> Report:
    """A-multilinearity in every slot (slots beyond the first do not follow
    from the stored antisymmetrized values, so each one is checked)."""
    out: Report = []
    if c.degree == 0:
        return out
    L = c.lr
    n = L.algebra.dim
    for a in range(n):
        act = c.coeffs.carrier.action[a]
        for key in product(range(L.dim), repeat=c.degree):
            bare = [unit_vec(L.dim, r) for r in key]
            rhs = act.apply(c.evaluate(*bare))
            for slot in range(c.degree):
                args = list(bare)
                args[slot] = L.carrier.action[a].apply(unit_vec(L.dim, key[slot]))
                lhs = c.evaluate(*args)
                if lhs != rhs:
                    out.append(Violation("A-multilinearity", (a, slot) + key, lhs, rhs))
    return out


def lr_differential(c: Cochain) -> Cochain:
    """Chevalley-Eilenberg differential twisted by the coefficient connection."""
    L, M = c.lr, c.coeffs
    if c.degree == 0:
        vals = {(i,): M.nabla[i].apply(c.values[()]) for i in range(L.dim)}
        return Cochain(L, M, 1, vals)
    if c.degree == 1:
        vals = {}
        for i, j in combinations(range(L.dim), 2):
            v = vec_sub(M.nabla[i].apply(c.value((j,))), M.nabla[j].apply(c.value((i,))))
            v = vec_sub(v, c.evaluate(L.bracket[i][j]))
            vals[(i, j)] = v
        return Cochain(L, M, 2, vals)
    if c.degree == 2:
        vals = {}
        for i, j, k in combinations(range(L.dim), 3):
            v = M.nabla[i].apply(c.value((j, k)))
            v = vec_sub(v, M.nabla[j].apply(c.value((i, k))))
            v = vec_add(v, M.nabla[k].apply(c.value((i, j))))
            v = vec_sub(v, c.evaluate(L.bracket[i][j], unit_vec(L.dim, k)))
            v = vec_add(v, c.evaluate(L.bracket[i][k], unit_vec(L.dim, j)))
            v = vec_sub(v, c.evaluate(L.bracket[j][k], unit_vec(L.dim, i)))
            vals[(i, j, k)] = v
        return Cochain(L, M, 3, vals)
    raise ValueError("differential is only implemented for degrees 0..2")


def is_cocycle(c: Cochain) -> tuple[bool, Optional[tuple[int, ...]]]:
    d = lr_differential(c)
    for key in sorted(d.values):
        if not is_zero_vec(d.values[key]):
            return False, key
    return True, None


def pullback_cocycle(f: Cochain, L: LieRinehartAlgebra) -> Cochain:
    """Pull a 2-cocycle on Der(A) back along the anchor of L.

    f^alpha(u, v) = f(alpha(u), alpha(v)); alpha(e_i) is re-expressed in the
    coordinates of f's parent (injective anchor required, which holds for
    the tautological Der(A)).
    """
    if f.degree != 2:
        raise ValueError("pullback expects a 2-cochain")
    src = f.lr
    span = [m.vectorize() for m in src.anchor]
    coords = []
    for i in range(L.dim):
        c = coords_in_span(span, L.anchor[i].vectorize())
        if c is None:
            raise ValueError("anchor image does not land in the source of f")
        coords.append(c)
    coeffs = trivial_coefficients(L)
    vals = {}
    for i, j in combinations(range(L.dim), 2):
        vals[(i, j)] = f.evaluate(coords[i], coords[j])
    return Cochain(L, coeffs, 2, vals)


def a_linear_cochain_basis(L: LieRinehartAlgebra, M: FlatConnectionModule,
                           degree: int = 1) -> list[Cochain]:
    """Canonical basis of the space of A-multilinear alternating cochains."""
    keys = list(combinations(range(L.dim), degree))
    d = M.carrier.dim
    width = len(keys) * d

    def unflatten(v: Vec) -> Cochain:
        vals = {key: v[t * d:(t + 1) * d] for t, key in enumerate(keys)}
        return Cochain(L, M, degree, vals)

    rows: list[Vec] = []
    n = L.algebra.dim
    # constraints come from every index tuple (repeats included: scaling one
    # slot of a diagonal tuple relates genuinely stored off-diagonal values)
    for a in range(n):
        for tup in product(range(L.dim), repeat=degree):
            for slot in range(degree):
                rows.extend(_linearity_rows(L, M, keys, a, tup, slot))
    if not rows:
        return [unflatten(unit_vec(width, t)) for t in range(width)]
    return [unflatten(v) for v in kernel(Mat.from_rows(rows))]


def _signed_terms(indices: tuple[int, ...], coeff: Fraction,
                  acc: dict[tuple[int, ...], Fraction]) -> None:
    """Accumulate coeff times the signed stored key of the given tuple."""
    if len(set(indices)) != len(indices):
        return
    order = sorted(range(len(indices)), key=lambda t: indices[t])
    skey = tuple(sorted(indices))
    acc[skey] = acc.get(skey, Fraction(0)) + _perm_sign(order) * coeff


def _linearity_rows(L: LieRinehartAlgebra, M: FlatConnectionModule,
                    keys: list[tuple[int, ...]], a: int, tup: tuple[int, ...],
                    slot: int = 0) -> list[Vec]:
    """Rows expressing c(..., a.e_{tup[slot]}, ...) - a.c(tup) = 0 in flat storage."""
    d = M.carrier.dim
    width = len(keys) * d
    key_index = {k: t for t, k in enumerate(keys)}
    scaled = L.carrier.action[a].apply(unit_vec(L.dim, tup[slot]))
    lhs_terms: dict[tuple[int, ...], Fraction] = {}
    for b, coeff in enumerate(scaled):
        if coeff != 0:
            _signed_terms(tup[:slot] + (b,) + tup[slot + 1:], coeff, lhs_terms)
    rhs_terms: dict[tuple[int, ...], Fraction] = {}
    _signed_terms(tup, Fraction(1), rhs_terms)
    act = M.carrier.action[a]
    rows = []
    for r in range(d):
        row = [Fraction(0)] * width
        for skey, coeff in lhs_terms.items():
            row[key_index[skey] * d + r] += coeff
        for skey, coeff in rhs_terms.items():
            base = key_index[skey] * d
            for cidx in range(d):
                row[base + cidx] -= coeff * act.data[r][cidx]
        rows.append(tuple(row))
    return rows


def coboundary_solve(f: Cochain, g: Cochain) -> Optional[tuple[Cochain, list[Cochain]]]:
    """Find phi in C^1 with d1(phi) = g - f, plus a basis of Z^1.

    Returns None exactly when the classes of f and g differ in H^2.
    """
    f._compatible(g)
    if f.degree != 2:
        raise ValueError("coboundary_solve expects 2-cochains")
    L, M = f.lr, f.coeffs
    c1 = a_linear_cochain_basis(L, M, 1)
    target = (g - f).flatten()
    if not c1:
        if is_zero_vec(target):
            return Cochain.zero(L, M, 1), []
        return None
    cols = [lr_differential(phi).flatten() for phi in c1]
    Mcols = Mat.from_columns(cols)
    solution = solve_affine(Mcols, target)
    if solution is None:
        return None
    x, ker = solution
    particular = Cochain.zero(L, M, 1)
    for coeff, phi in zip(x, c1):
        if coeff != 0:
            particular = particular + phi.scale(coeff)
    z1 = []
    for kv in ker:
        z = Cochain.zero(L, M, 1)
        for coeff, phi in zip(kv, c1):
            if coeff != 0:
                z = z + phi.scale(coeff)
        z1.append(z)
    return particular, z1
