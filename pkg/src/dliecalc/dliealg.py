"""D-Lie algebras: construction, validation, classification, reconstruction.

A D-Lie algebra is a 5-tuple: a P-module carrier with a Q-bilinear Lie
bracket, an anchor to Der(A), a structure map to the universal object
D1(A, f) = A + Der(A), and a central element D satisfying u.c = c.u +
anchor(u)(c) D.  The two constructions provided are D1(A, f) itself and
the twisted abelian extension A.D + L of a Lie-Rinehart algebra L.

Bracket convention: [(a, x), (b, y)] = (x(b) - y(a) + f(x, y), [x, y]) is
used for both constructions; the Jacobi checker is the arbiter and the
test suite exercises the opposite first-component sign as a negative case.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .finalg import (AModule, FiniteAlgebra, Report, Violation, check_pmodule,
                     regular_module)
from .lierinehart import (Cochain, FlatConnectionModule, LieRinehartAlgebra,
                          a_linear_cochain_basis, coboundary_solve, derivations_lr,
                          is_cocycle, lr_differential, pullback_cocycle,
                          trivial_coefficients, validate_flat_connection, validate_lr)
from .ratlin import (Mat, Vec, coords_in_span, is_zero_vec, span_basis, unit_vec,
                     vec_add, vec_concat, vec_scale, vec_sub, vector, zero_vec)


class DLieAlgebra:
    """5-tuple (carrier, alpha, pi, bracket, D) over a fixed algebra A."""

    def __init__(self, carrier: AModule, bracket, anchor_pi: Sequence[Mat],
                 alpha_matrix: Mat, target: Optional["DLieAlgebra"],
                 base_cocycle: Cochain, central_D: Vec, name: str = "",
                 kind: str = "assembled", lr_source: Optional[LieRinehartAlgebra] = None,
                 source_cocycle: Optional[Cochain] = None):
        self.carrier = carrier
        self.dim = carrier.dim
        self.bracket = tuple(tuple(vector(bracket[i][j]) for j in range(self.dim))
                             for i in range(self.dim))
        self.anchor_pi = list(anchor_pi)
        self.alpha_matrix = alpha_matrix
        self._target = target
        self.base_cocycle = base_cocycle
        self.central_D = vector(central_D)
        self.name = name or "Ltilde"
        self.kind = kind
        self.lr_source = lr_source
        self.source_cocycle = source_cocycle

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.carrier.algebra

    @property
    def target(self) -> "DLieAlgebra":
        return self._target if self._target is not None else self

    def bracket_vec(self, u: Vec, v: Vec) -> Vec:
        out = zero_vec(self.dim)
        for i, ci in enumerate(u):
            if ci == 0:
                continue
            for j, cj in enumerate(v):
                if cj != 0:
                    out = vec_add(out, vec_scale(ci * cj, self.bracket[i][j]))
        return out

    def pi_vec(self, u: Vec) -> Mat:
        n = self.algebra.dim
        M = Mat.zero(n, n)
        for i, c in enumerate(u):
            if c != 0:
                M = M + self.anchor_pi[i].scale(c)
        return M

    def __repr__(self) -> str:
        return f"DLieAlgebra({self.name}, dim={self.dim})"


@dataclass
class DLieMap:
    source: DLieAlgebra
    target: DLieAlgebra
    matrix: Mat

    def compose(self, other: "DLieMap") -> "DLieMap":
        """self after other."""
        if other.target is not self.source:
            raise ValueError("maps do not compose")
        return DLieMap(other.source, self.target, self.matrix @ other.matrix)


def zero_der_cocycle(A: FiniteAlgebra) -> Cochain:
    der = derivations_lr(A)
    return Cochain.zero(der, trivial_coefficients(der), 2)


def build_d1(A: FiniteAlgebra, f: Optional[Cochain] = None) -> DLieAlgebra:
    """The universal D-Lie algebra A + Der(A) with bracket twisted by f."""
    if f is None:
        f = zero_der_cocycle(A)
    der = f.lr
    ok, witness = is_cocycle(f)
    if not ok:
        raise ValueError(f"f is not a 2-cocycle (d2 f != 0 at {witness})")
    n, m = A.dim, der.dim
    N = n + m
    zero_nm = Mat.zero(n, m)
    zero_mn = Mat.zero(m, n)
    left, right = [], []
    for c in range(n):
        Mc = A.mult_matrix(unit_vec(n, c))
        Dc = der.carrier.action[c] if m else Mat.zero(0, 0)
        left.append(_block(Mc, zero_nm, zero_mn, Dc))
        # (a, x).c = (ac + x(c), cx)
        Xc = Mat.from_columns([der.anchor[j].apply(unit_vec(n, c)) for j in range(m)]) \
            if m else zero_nm
        right.append(_block(Mc, Xc, zero_mn, Dc))
    carrier = AModule(A, N, left, right, name=f"D1({A.name})")
    bracket = [[zero_vec(N) for _ in range(N)] for _ in range(N)]
    for a in range(n):
        for j in range(m):
            val = der.anchor[j].apply(unit_vec(n, a))
            bracket[a][n + j] = vec_concat(vec_scale(-1, val), zero_vec(m))
            bracket[n + j][a] = vec_concat(val, zero_vec(m))
    for i in range(m):
        for j in range(m):
            fa = f.value((i, j))
            bracket[n + i][n + j] = vec_concat(fa, der.bracket[i][j])
    anchor_pi = [Mat.zero(n, n)] * n + [der.anchor[j] for j in range(m)]
    D = vec_concat(A.unit, zero_vec(m))
    obj = DLieAlgebra(carrier, bracket, anchor_pi, Mat.identity(N), None, f, D,
                      name=f"D1({A.name})", kind="d1")
    return obj


def _block(tl: Mat, tr: Mat, bl: Mat, br: Mat) -> Mat:
    rows = []
    for i in range(tl.rows):
        rows.append(tuple(tl.data[i]) + tuple(tr.data[i]))
    for i in range(bl.rows):
        rows.append(tuple(bl.data[i]) + tuple(br.data[i]))
    return Mat(rows)


def _extension_skeleton(L: LieRinehartAlgebra, g_on_L: Cochain):
    """Carrier, bracket, anchor and D of the twisted extension A.D + L."""
    A = L.algebra
    n, m = A.dim, L.dim
    N = n + m
    zero_nm = Mat.zero(n, m)
    zero_mn = Mat.zero(m, n)
    left, right = [], []
    for c in range(n):
        Mc = A.mult_matrix(unit_vec(n, c))
        Lc = L.carrier.action[c] if m else Mat.zero(0, 0)
        left.append(_block(Mc, zero_nm, zero_mn, Lc))
        Xc = Mat.from_columns([L.anchor[j].apply(unit_vec(n, c)) for j in range(m)]) \
            if m else zero_nm
        right.append(_block(Mc, Xc, zero_mn, Lc))
    carrier = AModule(A, N, left, right)
    bracket = [[zero_vec(N) for _ in range(N)] for _ in range(N)]
    for a in range(n):
        for j in range(m):
            val = L.anchor[j].apply(unit_vec(n, a))
            bracket[a][n + j] = vec_concat(vec_scale(-1, val), zero_vec(m))
            bracket[n + j][a] = vec_concat(val, zero_vec(m))
    for i in range(m):
        for j in range(m):
            bracket[n + i][n + j] = vec_concat(g_on_L.value((i, j)), L.bracket[i][j])
    anchor_pi = [Mat.zero(n, n)] * n + [L.anchor[j] for j in range(m)]
    D = vec_concat(A.unit, zero_vec(m))
    return carrier, bracket, anchor_pi, D


def functor_F(L: LieRinehartAlgebra, f: Optional[Cochain] = None,
              d1: Optional[DLieAlgebra] = None) -> DLieAlgebra:
    """The D-Lie algebra A.z + L with bracket twisted by the pullback of f."""
    A = L.algebra
    if f is None:
        f = zero_der_cocycle(A)
    ok, witness = is_cocycle(f)
    if not ok:
        raise ValueError(f"f is not a 2-cocycle (d2 f != 0 at {witness})")
    if d1 is None:
        d1 = build_d1(A, f)
    fa = pullback_cocycle(f, L)
    carrier, bracket, anchor_pi, D = _extension_skeleton(L, fa)
    carrier.name = f"A.z+{L.name}"
    n, m = A.dim, L.dim
    der = f.lr
    span = [mm.vectorize() for mm in der.anchor]
    alpha_cols = [vec_concat(unit_vec(n, a), zero_vec(der.dim)) for a in range(n)]
    for j in range(m):
        coords = coords_in_span(span, L.anchor[j].vectorize())
        assert coords is not None
        alpha_cols.append(vec_concat(zero_vec(n), coords))
    alpha = Mat.from_columns(alpha_cols)
    return DLieAlgebra(carrier, bracket, anchor_pi, alpha, d1, f, D,
                       name=f"F({L.name})", kind="functor_F", lr_source=L,
                       source_cocycle=fa)


def validate_dlie(T: DLieAlgebra) -> Report:
    """Every axiom of a D-Lie algebra, with witnesses."""
    out: Report = check_pmodule(T.carrier)
    A, n, N = T.algebra, T.algebra.dim, T.dim
    for i in range(N):
        if not is_zero_vec(T.bracket[i][i]):
            out.append(Violation("alternating", (i,), T.bracket[i][i]))
        for j in range(i + 1, N):
            if T.bracket[i][j] != vec_scale(-1, T.bracket[j][i]):
                out.append(Violation("antisymmetry", (i, j)))
    for i in range(N):
        for j in range(N):
            for k in range(N):
                jac = vec_add(T.bracket_vec(unit_vec(N, i), T.bracket[j][k]),
                              vec_add(T.bracket_vec(unit_vec(N, j),
                                                    T.bracket_vec(unit_vec(N, k), unit_vec(N, i))),
                                      T.bracket_vec(unit_vec(N, k), T.bracket[i][j])))
                if not is_zero_vec(jac):
                    out.append(Violation("jacobi", (i, j, k), jac))
    for i in range(N):
        for a in range(n):
            for j in range(N):
                av = T.carrier.action[a].apply(unit_vec(N, j))
                lhs = T.bracket_vec(unit_vec(N, i), av)
                anchored = T.anchor_pi[i].apply(unit_vec(n, a))
                rhs = vec_add(T.carrier.action[a].apply(T.bracket[i][j]),
                              T.carrier.action_matrix(anchored).apply(unit_vec(N, j)))
                if lhs != rhs:
                    out.append(Violation("anchor-law", (i, a, j), lhs, rhs))
    for a in range(n):
        da = T.carrier.d_action_matrix(a)
        for j in range(N):
            lhs = da.apply(unit_vec(N, j))
            anchored = T.anchor_pi[j].apply(unit_vec(n, a))
            rhs = T.carrier.action_matrix(anchored).apply(T.central_D)
            if lhs != rhs:
                out.append(Violation("principal-parts-law", (a, j), lhs, rhs))
    for j in range(N):
        br = T.bracket_vec(T.central_D, unit_vec(N, j))
        if not is_zero_vec(br):
            out.append(Violation("D-central", (j,), br))
    if not T.pi_vec(T.central_D).is_zero():
        out.append(Violation("pi-of-D", ()))
    out += _check_structure_map(T)
    return out


def _check_structure_map(T: DLieAlgebra) -> Report:
    out: Report = []
    tgt = T.target
    al = T.alpha_matrix
    n = T.algebra.dim
    for a in range(n):
        if al @ T.carrier.action[a] != tgt.carrier.action[a] @ al:
            out.append(Violation("alpha-left-linear", (a,)))
        if al @ T.carrier.right_action[a] != tgt.carrier.right_action[a] @ al:
            out.append(Violation("alpha-right-linear", (a,)))
    for i in range(T.dim):
        for j in range(T.dim):
            lhs = al.apply(T.bracket[i][j])
            rhs = tgt.bracket_vec(al.apply(unit_vec(T.dim, i)), al.apply(unit_vec(T.dim, j)))
            if lhs != rhs:
                out.append(Violation("alpha-lie-map", (i, j), lhs, rhs))
    for i in range(T.dim):
        if T.anchor_pi[i] != tgt.pi_vec(al.apply(unit_vec(T.dim, i))):
            out.append(Violation("pi-factors-through-alpha", (i,)))
    if al.apply(T.central_D) != tgt.central_D:
        out.append(Violation("alpha-of-D", (), al.apply(T.central_D), tgt.central_D))
    return out


def validate_dlie_map(m: DLieMap) -> Report:
    """Map axioms: P-linear, Lie map, phi(D) = D', anchors compatible."""
    out: Report = []
    S, T, M = m.source, m.target, m.matrix
    n = S.algebra.dim
    for a in range(n):
        if M @ S.carrier.action[a] != T.carrier.action[a] @ M:
            out.append(Violation("map-left-linear", (a,)))
        if M @ S.carrier.right_action[a] != T.carrier.right_action[a] @ M:
            out.append(Violation("map-right-linear", (a,)))
    for i in range(S.dim):
        for j in range(S.dim):
            lhs = M.apply(S.bracket[i][j])
            rhs = T.bracket_vec(M.apply(unit_vec(S.dim, i)), M.apply(unit_vec(S.dim, j)))
            if lhs != rhs:
                out.append(Violation("map-lie", (i, j), lhs, rhs))
    if M.apply(S.central_D) != T.central_D:
        out.append(Violation("map-of-D", (), M.apply(S.central_D), T.central_D))
    # the definition's composition order is not typable as written; the
    # implementable reading pi'(phi(u)) = pi(u) is checked here
    for i in range(S.dim):
        if T.pi_vec(M.apply(unit_vec(S.dim, i))) != S.anchor_pi[i]:
            out.append(Violation("map-anchor-compat", (i,)))
    return out


@dataclass
class QuotientResult:
    lr: LieRinehartAlgebra
    projection: Mat             # carrier of T -> carrier of lr
    section: Mat                # coordinate section (not A-linear in general)
    j_basis: list[Vec]          # basis e_i.D of the ideal J
    report: Report


def canonical_quotient(T: DLieAlgebra) -> QuotientResult:
    """L = Ltilde / J with J = A.D; verifies J ideal and free of rank 1."""
    from .ratlin import QuotientSpace
    A, n, N = T.algebra, T.algebra.dim, T.dim
    report: Report = []
    j_basis = [T.carrier.action[i].apply(T.central_D) for i in range(n)]
    if len(span_basis(j_basis)) != n:
        raise ValueError("J = A.D is not free of rank one over A")
    for i in range(N):
        for jb in j_basis:
            br = T.bracket_vec(unit_vec(N, i), jb)
            if coords_in_span(j_basis, br) is None:
                report.append(Violation("J-not-ideal", (i,), br))
    quot = QuotientSpace(N, j_basis)
    proj, sec = quot.proj, quot.sec
    q = quot.dim
    action = [proj @ T.carrier.action[a] @ sec for a in range(n)]
    # the right action must descend to the left action on the quotient
    for a in range(n):
        if proj @ T.carrier.right_action[a] @ sec != action[a]:
            report.append(Violation("quotient-right-action", (a,)))
    bracket = [[proj.apply(T.bracket_vec(sec.column(i), sec.column(j))) for j in range(q)]
               for i in range(q)]
    anchor = [T.pi_vec(sec.column(i)) for i in range(q)]
    carrier = AModule(A, q, action, name=f"{T.name}/J")
    lr = LieRinehartAlgebra(carrier, bracket, anchor, name=f"{T.name}/J")
    report += validate_lr(lr)
    return QuotientResult(lr, proj, sec, j_basis, report)


def lr_isomorphism(L1: LieRinehartAlgebra, L2: LieRinehartAlgebra,
                   matrix: Mat) -> Report:
    """Check that the given matrix is a Lie-Rinehart isomorphism."""
    out: Report = []
    from .ratlin import rank
    if matrix.rows != L2.dim or matrix.cols != L1.dim or rank(matrix) != L1.dim \
            or L1.dim != L2.dim:
        out.append(Violation("not-bijective", (matrix.rows, matrix.cols)))
        return out
    n = L1.algebra.dim
    for a in range(n):
        if matrix @ L1.carrier.action[a] != L2.carrier.action[a] @ matrix:
            out.append(Violation("iso-A-linear", (a,)))
    for i in range(L1.dim):
        for j in range(L1.dim):
            lhs = matrix.apply(L1.bracket[i][j])
            rhs = L2.bracket_vec(matrix.apply(unit_vec(L1.dim, i)),
                                 matrix.apply(unit_vec(L1.dim, j)))
            if lhs != rhs:
                out.append(Violation("iso-lie", (i, j), lhs, rhs))
    for i in range(L1.dim):
        if L2.anchor_vec(matrix.apply(unit_vec(L1.dim, i))) != L1.anchor[i]:
            out.append(Violation("iso-anchor", (i,)))
    return out


@dataclass
class MapClassification:
    exists: bool
    phi1: Optional[Cochain] = None
    z1_basis: list[Cochain] = field(default_factory=list)
    forward: Optional[DLieMap] = None
    inverse: Optional[DLieMap] = None


def classify_maps_d1(g: Cochain, f: Cochain) -> MapClassification:
    """Maps D1(A, g) -> D1(A, f): exist iff g = f + d1(phi1) is solvable."""
    solution = coboundary_solve(f, g)
    if solution is None:
        return MapClassification(False)
    phi1, z1 = solution
    A = f.lr.algebra
    S, T = build_d1(A, g), build_d1(A, f)
    n, m = A.dim, f.lr.dim
    fwd = _shifted_map(S, T, phi1, Mat.identity(m))
    inv = _shifted_map(T, S, phi1.scale(-1), Mat.identity(m))
    assert not validate_dlie_map(fwd)
    assert not validate_dlie_map(inv)
    assert inv.compose(fwd).matrix == Mat.identity(S.dim)
    assert fwd.compose(inv).matrix == Mat.identity(S.dim)
    return MapClassification(True, phi1, z1, fwd, inv)


def _shifted_map(S: DLieAlgebra, T: DLieAlgebra, phi1: Cochain, psi2: Mat) -> DLieMap:
    """(a, x) |-> (a + phi1(x), psi2(x)) between two twisted extensions."""
    n = S.algebra.dim
    m = S.dim - n
    m2 = T.dim - n
    cols = [vec_concat(unit_vec(n, a), zero_vec(m2)) for a in range(n)]
    for j in range(m):
        cols.append(vec_concat(phi1.value((j,)), psi2.column(j)))
    return DLieMap(S, T, Mat.from_columns(cols))


@dataclass
class DLieMapDecision:
    exists_restricted: bool
    exists_wide: bool
    alpha1: Optional[Cochain]
    make_map: Optional[Callable[[Mat], DLieMap]]

    @property
    def exists(self) -> bool:
        return self.exists_restricted


def exists_dlie_map(S: DLieAlgebra, T: DLieAlgebra) -> DLieMapDecision:
    """Decide whether a D-Lie map S -> T exists (both built by functor_F).

    The restricted answer tests class equality inside the anchor image
    (candidate 1-cochains of the form phi o alpha); the wide answer allows
    all A-linear 1-cochains on L.  Both are reported.
    """
    if S.kind != "functor_F" or T.kind != "functor_F":
        raise ValueError("exists_dlie_map needs functor_F-built inputs; "
                         "use validate_dlie_map on explicit candidates instead")
    L = S.lr_source
    ga = S.source_cocycle
    fa = pullback_cocycle(T.base_cocycle, L)
    diff = ga - fa
    # restricted: candidates phi o alpha with phi A-linear on Der(A)
    der = T.base_cocycle.lr
    der_c1 = a_linear_cochain_basis(der, trivial_coefficients(der), 1)
    span_der = [m.vectorize() for m in der.anchor]
    pulled: list[Cochain] = []
    triv = trivial_coefficients(L)
    for phi in der_c1:
        vals = {}
        for i in range(L.dim):
            coords = coords_in_span(span_der, L.anchor[i].vectorize())
            assert coords is not None
            vals[(i,)] = phi.evaluate(coords)
        pulled.append(Cochain(L, triv, 1, vals))
    restricted = _solve_in_span(pulled, diff)
    wide_solution = coboundary_solve(fa, ga)
    alpha1 = restricted if restricted is not None else \
        (wide_solution[0] if wide_solution else None)
    make_map = None
    if alpha1 is not None:
        def make_map(psi2: Mat, _alpha1=alpha1) -> DLieMap:
            rep = _check_lr_map(S.lr_source, T.lr_source, psi2)
            if rep:
                raise ValueError("psi2 is not a Lie-Rinehart map: " + rep[0].describe())
            out = _shifted_map(S, T, _alpha1, psi2)
            bad = validate_dlie_map(out)
            if bad:
                raise AssertionError("constructed map failed validation: "
                                     + bad[0].describe())
            return out
    return DLieMapDecision(restricted is not None, wide_solution is not None,
                           alpha1, make_map)


def _solve_in_span(candidates: list[Cochain], diff: Cochain) -> Optional[Cochain]:
    from .ratlin import solve_affine
    target = diff.flatten()
    if not candidates:
        return None if not is_zero_vec(target) else \
            Cochain.zero(diff.lr, diff.coeffs, 1)
    cols = [lr_differential(c).flatten() for c in candidates]
    sol = solve_affine(Mat.from_columns(cols), target)
    if sol is None:
        return None
    out = Cochain.zero(diff.lr, diff.coeffs, 1)
    for coeff, c in zip(sol[0], candidates):
        if coeff != 0:
            out = out + c.scale(coeff)
    return out


def class_equal(f: Cochain, g: Cochain,
                widen: bool = False) -> tuple[bool, Optional[Cochain]]:
    """Decide [f] = [g] for 2-cocycles on the same host.

    The default (restricted) test only allows corrections pulled back
    through the anchor from A-linear 1-cochains on Der(A); widening allows
    every A-linear 1-cochain on the host.
    """
    if widen:
        sol = coboundary_solve(f, g)
        return (sol is not None, sol[0] if sol else None)
    L = f.lr
    der = derivations_lr(L.algebra)
    der_c1 = a_linear_cochain_basis(der, trivial_coefficients(der), 1)
    span_der = [mm.vectorize() for mm in der.anchor]
    triv = trivial_coefficients(L)
    pulled: list[Cochain] = []
    for phi in der_c1:
        vals = {}
        for i in range(L.dim):
            coords = coords_in_span(span_der, L.anchor[i].vectorize())
            assert coords is not None  # anchors are derivations
            vals[(i,)] = phi.evaluate(coords)
        pulled.append(Cochain(L, triv, 1, vals))
    alpha = _solve_in_span(pulled, g - f)
    return (alpha is not None, alpha)


def _check_lr_map(L1: LieRinehartAlgebra, L2: LieRinehartAlgebra, psi: Mat) -> Report:
    out: Report = []
    n = L1.algebra.dim
    for a in range(n):
        if psi @ L1.carrier.action[a] != L2.carrier.action[a] @ psi:
            out.append(Violation("lrmap-A-linear", (a,)))
    for i in range(L1.dim):
        for j in range(L1.dim):
            lhs = psi.apply(L1.bracket[i][j])
            rhs = L2.bracket_vec(psi.apply(unit_vec(L1.dim, i)), psi.apply(unit_vec(L1.dim, j)))
            if lhs != rhs:
                out.append(Violation("lrmap-lie", (i, j), lhs, rhs))
    for i in range(L1.dim):
        if L2.anchor_vec(psi.apply(unit_vec(L1.dim, i))) != L1.anchor[i]:
            out.append(Violation("lrmap-anchor", (i,)))
    return out


@dataclass
class SplittingData:
    nabla: FlatConnectionModule   # flat connection on J, in the A.D coordinates
    psi: Cochain                  # 2-cocycle on L with values in (J, nabla)
    g: Cochain                    # psi read off through J = A.D
    section: Mat


def splitting_data(T: DLieAlgebra, s: Mat,
                   quotient: Optional[QuotientResult] = None) -> SplittingData:
    """Connection, twisting cocycle and A-valued cocycle of a section s."""
    q = quotient if quotient is not None else canonical_quotient(T)
    L = q.lr
    A, n, N = T.algebra, T.algebra.dim, T.dim
    if (q.projection @ s) != Mat.identity(L.dim):
        raise ValueError("s is not a section of the canonical projection")
    for a in range(n):
        if s @ L.carrier.action[a] != T.carrier.action[a] @ s:
            raise ValueError("s is not left A-linear")
    jb = q.j_basis

    def j_coords(w: Vec) -> Vec:
        c = coords_in_span(jb, w)
        if c is None:
            raise AssertionError("value does not lie in J")
        return c

    nabla_ops = []
    for k in range(L.dim):
        cols = [j_coords(T.bracket_vec(s.column(k), jb_i)) for jb_i in jb]
        nabla_ops.append(Mat.from_columns(cols))
    j_module = regular_module(A)
    j_module.name = f"J({T.name})"
    nabla = FlatConnectionModule(L, j_module, nabla_ops, name=f"(J, nabla_s)")
    vals = {}
    from itertools import combinations
    for i, j in combinations(range(L.dim), 2):
        w = vec_sub(T.bracket_vec(s.column(i), s.column(j)),
                    s.apply(L.bracket[i][j]))
        vals[(i, j)] = j_coords(w)
    psi = Cochain(L, nabla, 2, vals)
    g = Cochain(L, trivial_coefficients(L), 2, vals)
    bad = validate_flat_connection(nabla)
    if bad:
        raise AssertionError("nabla_s is not flat: " + bad[0].describe())
    ok, witness = is_cocycle(psi)
    if not ok:
        raise AssertionError(f"psi_s is not a 2-cocycle at {witness}")
    return SplittingData(nabla, psi, g, s)


def free_module_basis(L: LieRinehartAlgebra) -> Optional[list[Vec]]:
    """A designated A-basis of the carrier of L, or None if the greedy
    search cannot exhibit one (the corpus quotients of interest are free)."""
    import random
    A = L.algebra
    n, q = A.dim, L.dim
    if q == 0:
        return []
    if q % n != 0:
        return None
    rng = random.Random(1729)
    candidates = [unit_vec(q, i) for i in range(q)]
    candidates += [vector([rng.randint(-2, 2) for _ in range(q)]) for _ in range(40)]
    gens: list[Vec] = []
    current: list[Vec] = []
    for cand in candidates:
        new = [L.carrier.action[a].apply(cand) for a in range(n)]
        grown = span_basis(current + new)
        if len(grown) == len(current) + n:
            gens.append(cand)
            current = grown
        if len(current) == q:
            return gens
    return None


def a_linear_section(T: DLieAlgebra, q: QuotientResult,
                     free_basis: list[Vec]) -> Mat:
    """Left A-linear section of the canonical projection via a basis lift."""
    A = T.algebra
    L = q.lr
    n = A.dim
    if L.dim == 0:
        return Mat.zero(T.dim, 0)
    lifts = [q.section.apply(m) for m in free_basis]
    # coordinates of each quotient basis vector over the free A-basis
    cols_L = [L.carrier.action[a].apply(m) for m in free_basis for a in range(n)]
    coord_mat = Mat.from_columns(cols_L)
    s_cols = []
    for c in range(L.dim):
        sol = __solve(coord_mat, unit_vec(L.dim, c))
        col = zero_vec(T.dim)
        for t, coeff in enumerate(sol):
            if coeff != 0:
                j, a = divmod(t, n)
                col = vec_add(col, vec_scale(coeff, T.carrier.action[a].apply(lifts[j])))
        s_cols.append(col)
    return Mat.from_columns(s_cols)


def __solve(M: Mat, b: Vec) -> Vec:
    from .ratlin import solve_affine
    sol = solve_affine(M, b)
    if sol is None:
        raise AssertionError("free-basis coordinates do not exist")
    return sol[0]


@dataclass
class Reconstruction:
    g: Cochain                # 2-cocycle on the canonical quotient
    model: DLieAlgebra        # twisted extension A.D + L
    iso: DLieMap              # model -> T
    inverse: DLieMap
    quotient: QuotientResult
    section: Mat


def reconstruct(T: DLieAlgebra) -> Reconstruction:
    """Rebuild T as a twisted extension of its canonical quotient.

    Requires the quotient to be free as an A-module (basis lift section);
    raises ValueError otherwise.
    """
    q = canonical_quotient(T)
    if q.report:
        raise ValueError("canonical quotient is not well-formed: "
                         + q.report[0].describe())
    L = q.lr
    basis = free_module_basis(L)
    if basis is None:
        raise ValueError("canonical quotient is not free as an A-module; "
                         "reconstruction is unsupported")
    s = a_linear_section(T, q, basis)
    data = splitting_data(T, s, q)
    carrier, bracket, anchor_pi, D = _extension_skeleton(L, data.g)
    n = T.algebra.dim
    # iso rho(aD, u) = aD + s(u); J coordinates are exactly the A-coordinates
    rho_cols = [q.j_basis[a] for a in range(n)] + [s.column(c) for c in range(L.dim)]
    rho = Mat.from_columns(rho_cols)
    inv_sol = _invert(rho)
    alpha = T.alpha_matrix @ rho
    model = DLieAlgebra(carrier, bracket, anchor_pi, alpha, T.target, T.base_cocycle,
                        D, name=f"F({L.name})", kind="functor_F", lr_source=L,
                        source_cocycle=data.g)
    iso = DLieMap(model, T, rho)
    inverse = DLieMap(T, model, inv_sol)
    bad = validate_dlie(model)
    if bad:
        raise AssertionError("reconstructed model is not a D-Lie algebra: "
                             + bad[0].describe())
    for m in (iso, inverse):
        badm = validate_dlie_map(m)
        if badm:
            raise AssertionError("reconstruction iso failed validation: "
                                 + badm[0].describe())
    return Reconstruction(data.g, model, iso, inverse, q, s)


def _invert(M: Mat) -> Mat:
    from .ratlin import solve_affine
    cols = []
    for i in range(M.rows):
        sol = solve_affine(M, unit_vec(M.rows, i))
        if sol is None or sol[1]:
            raise ValueError("matrix is not invertible")
        cols.append(sol[0])
    return Mat.from_columns(cols)
