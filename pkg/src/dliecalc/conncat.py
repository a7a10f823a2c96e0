"""Connections on D-Lie algebras and the equivalence with twisted pairs.

Diff1(E) is the space of endomorphisms with [[d, aI], bI] = 0, a P-module
via (a (x) b . d)(e) = a d(be).  A connection is a P-linear map from a
D-Lie algebra into Diff1(E); the pair functors translate between these
and pairs (psi, nabla) on the underlying Lie-Rinehart algebra.  The
endomorphism extension End_A(E) + Ltilde carries the canonical flat
connection and the splitting problem is decided exactly when End_A(E)
is commutative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .dliealg import DLieAlgebra, DLieMap, functor_F, validate_dlie, validate_dlie_map
from .finalg import (AModule, FiniteAlgebra, PrincipalParts, Report, Violation,
                     build_principal_parts, check_pmodule)
from .lierinehart import Cochain, LieRinehartAlgebra, pullback_cocycle
from .ratlin import (Mat, Vec, coords_in_span, in_span, kernel, rank, solve_affine,
                     span_basis, unit_vec, vec_add, vec_concat, vec_scale, vec_sub,
                     vector, zero_vec)


@dataclass
class Diff1Space:
    """First-order differential operators on E as a subspace of End_k(E)."""
    module: AModule
    basis: list[Mat]
    pmodule: AModule          # the same space with its two A-actions

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, op: Mat) -> bool:
        return in_span([b.vectorize() for b in self.basis], op.vectorize())

    def coords(self, op: Mat) -> Optional[Vec]:
        return coords_in_span([b.vectorize() for b in self.basis], op.vectorize())


def compute_diff1(E: AModule) -> Diff1Space:
    """Kernel of the defining constraints [[d, aI], bI] = 0."""
    A, d = E.algebra, E.dim
    n = A.dim
    unit_mats = [Mat.from_vector(unit_vec(d * d, t), d, d) for t in range(d * d)]
    cols: list[Vec] = []
    for um in unit_mats:
        col: Vec = ()
        for a in range(n):
            for b in range(n):
                img = um.commutator(E.action[a]).commutator(E.action[b])
                col = col + img.vectorize()
        cols.append(col)
    basis_vecs = kernel(Mat.from_columns(cols))
    basis = [Mat.from_vector(v, d, d) for v in basis_vecs]
    flat = [b.vectorize() for b in basis]
    left_cols = [[] for _ in range(n)]
    right_cols = [[] for _ in range(n)]
    for op in basis:
        for a in range(n):
            lc = coords_in_span(flat, (E.action[a] @ op).vectorize())
            rc = coords_in_span(flat, (op @ E.action[a]).vectorize())
            assert lc is not None and rc is not None
            left_cols[a].append(lc)
            right_cols[a].append(rc)
    m = len(basis)
    left = [Mat.from_columns(c) if m else Mat.zero(0, 0) for c in left_cols]
    right = [Mat.from_columns(c) if m else Mat.zero(0, 0) for c in right_cols]
    pmod = AModule(E.algebra, m, left, right, name=f"Diff1({E.name})")
    return Diff1Space(E, basis, pmod)


def validate_diff1(D: Diff1Space) -> Report:
    out: Report = check_pmodule(D.pmodule)
    E = D.module
    n = E.algebra.dim
    for t, op in enumerate(D.basis):
        for a in range(n):
            for b in range(n):
                c = op.commutator(E.action[a]).commutator(E.action[b])
                if not c.is_zero():
                    out.append(Violation("diff1-defining", (t, a, b)))
    for i, u in enumerate(D.basis):
        for j, v in enumerate(D.basis):
            if not D.contains(u.commutator(v)):
                out.append(Violation("diff1-commutator-closure", (i, j)))
    return out


@dataclass
class Connection:
    """P-linear map rho from a D-Lie algebra into Diff1(E)."""
    source: DLieAlgebra
    diff1: Diff1Space
    rho: list[Mat]            # one endomorphism of E per source basis vector

    def rho_of(self, u: Vec) -> Mat:
        d = self.diff1.module.dim
        out = Mat.zero(d, d)
        for i, c in enumerate(u):
            if c != 0:
                out = out + self.rho[i].scale(c)
        return out

    def rho_d(self) -> Mat:
        return self.rho_of(self.source.central_D)

    def is_conn_id(self) -> bool:
        return self.rho_d() == Mat.identity(self.diff1.module.dim)


def validate_connection(c: Connection) -> Report:
    out: Report = []
    T, E = c.source, c.diff1.module
    n, N = T.algebra.dim, T.dim
    for j in range(N):
        if not c.diff1.contains(c.rho[j]):
            out.append(Violation("rho-into-diff1", (j,)))
    for a in range(n):
        Aa = E.action[a]
        for j in range(N):
            if c.rho_of(T.carrier.action[a].apply(unit_vec(N, j))) != Aa @ c.rho[j]:
                out.append(Violation("rho-left-linear", (a, j)))
            if c.rho_of(T.carrier.right_action[a].apply(unit_vec(N, j))) != c.rho[j] @ Aa:
                out.append(Violation("rho-right-linear", (a, j)))
    rD = c.rho_d()
    for a in range(n):
        Aa = E.action[a]
        for j in range(N):
            anchored = T.anchor_pi[j].apply(unit_vec(n, a))
            lhs = c.rho[j] @ Aa
            rhs = Aa @ c.rho[j] + E.action_matrix(anchored) @ rD
            if lhs != rhs:
                out.append(Violation("derived-leibniz", (a, j)))
    for a in range(n):
        if rD @ E.action[a] != E.action[a] @ rD:
            out.append(Violation("rho-D-not-A-linear", (a,)))
    return out


def curvature(c: Connection, u: Vec, v: Vec) -> Mat:
    R = c.rho_of(u).commutator(c.rho_of(v)) - c.rho_of(c.source.bracket_vec(u, v))
    assert c.diff1.contains(R)
    return R


def is_flat(c: Connection) -> bool:
    N = c.source.dim
    return all(curvature(c, unit_vec(N, i), unit_vec(N, j)).is_zero()
               for i, j in combinations(range(N), 2))


@dataclass
class LPsiConnection:
    """Pair (psi, nabla) on a Lie-Rinehart algebra acting on E."""
    lr: LieRinehartAlgebra
    module: AModule
    psi: Mat
    nabla: list[Mat]

    def nabla_of(self, x: Vec) -> Mat:
        d = self.module.dim
        out = Mat.zero(d, d)
        for i, c in enumerate(x):
            if c != 0:
                out = out + self.nabla[i].scale(c)
        return out


def validate_lpsi(n: LPsiConnection) -> Report:
    out: Report = []
    L, E = n.lr, n.module
    na = L.algebra.dim
    for a in range(na):
        if n.psi @ E.action[a] != E.action[a] @ n.psi:
            out.append(Violation("psi-not-A-linear", (a,)))
    for a in range(na):
        Aa = E.action[a]
        for j in range(L.dim):
            anchored = L.anchor[j].apply(unit_vec(na, a))
            lhs = n.nabla[j] @ Aa
            rhs = Aa @ n.nabla[j] + E.action_matrix(anchored) @ n.psi
            if lhs != rhs:
                out.append(Violation("lpsi-leibniz", (a, j)))
            if n.nabla_of(L.carrier.action[a].apply(unit_vec(L.dim, j))) != Aa @ n.nabla[j]:
                out.append(Violation("nabla-not-A-linear", (a, j)))
    return out


def c_functor(n: LPsiConnection, f: Optional[Cochain] = None,
              T: Optional[DLieAlgebra] = None,
              diff1: Optional[Diff1Space] = None) -> Connection:
    """rho(az + x) := a.psi + nabla(x) on the twisted extension of (L, f)."""
    if T is None:
        T = functor_F(n.lr, f)
    if diff1 is None:
        diff1 = compute_diff1(n.module)
    A = n.lr.algebra
    rho = [n.module.action[a] @ n.psi for a in range(A.dim)] + list(n.nabla)
    return Connection(T, diff1, rho)


def r_functor(c: Connection) -> LPsiConnection:
    """Inverse of c_functor: psi = rho(D), nabla = rho restricted to L."""
    T = c.source
    if T.kind != "functor_F":
        raise ValueError("r_functor needs a connection on a functor_F-built source")
    n = T.algebra.dim
    return LPsiConnection(T.lr_source, c.diff1.module, c.rho_d(),
                          list(c.rho[n:]))


def curvature_identity_check(n: LPsiConnection, f: Optional[Cochain] = None,
                             T: Optional[DLieAlgebra] = None,
                             diff1: Optional[Diff1Space] = None) -> Report:
    """R_rho(i(x), i(y)) = R_(nabla o i)(x, y) - act(f_alpha(x, y)) . psi
    on every basis pair of L, where i embeds L into the extension.

    Pairs involving the A.z part are excluded: there R_rho(z, i(y)) equals
    [psi, nabla(y)], which has no counterpart on the L side unless psi is
    central (it is for psi = id, where the correction reduces to
    act(f_alpha)).
    """
    out: Report = []
    c = c_functor(n, f, T, diff1)
    T = c.source
    fa = T.source_cocycle
    L = n.lr
    na = L.algebra.dim
    N = T.dim

    def l_part(u: Vec) -> Vec:
        return u[na:]

    for i, j in combinations(range(L.dim), 2):
        u, v = unit_vec(N, na + i), unit_vec(N, na + j)
        lhs = curvature(c, u, v)
        x, y = l_part(u), l_part(v)
        r_nabla = n.nabla_of(x).commutator(n.nabla_of(y)) \
            - n.nabla_of(l_part(T.bracket_vec(u, v)))
        corr = n.module.action_matrix(fa.evaluate(x, y)) @ n.psi
        if lhs != r_nabla - corr:
            out.append(Violation("curvature-identity", (i, j)))
    return out


def end_a_basis(E: AModule) -> list[Mat]:
    """Canonical basis of End_A(E) = commutant of the A-action."""
    d = E.dim
    unit_mats = [Mat.from_vector(unit_vec(d * d, t), d, d) for t in range(d * d)]
    cols: list[Vec] = []
    for um in unit_mats:
        col: Vec = ()
        for a in range(E.algebra.dim):
            col = col + um.commutator(E.action[a]).vectorize()
        cols.append(col)
    return [Mat.from_vector(v, d, d) for v in kernel(Mat.from_columns(cols))]


@dataclass
class EndExtension:
    dlie: DLieAlgebra
    base: DLieAlgebra
    connection: Connection
    end_basis: list[Mat]
    rho_bang: Connection
    p_map: DLieMap


def build_end_extension(T: DLieAlgebra, c: Connection) -> EndExtension:
    """End_A(E) + Ltilde with the curvature-twisted bracket; rho(D) = Id."""
    if c.source is not T:
        raise ValueError("connection is not defined on the given D-Lie algebra")
    bad = validate_connection(c)
    if bad:
        raise ValueError("invalid connection: " + bad[0].describe())
    if not c.is_conn_id():
        raise ValueError("build_end_extension needs rho(D) = identity")
    E = c.diff1.module
    A, n, N = T.algebra, T.algebra.dim, T.dim
    eb = end_a_basis(E)
    m0 = len(eb)
    flat_eb = [b.vectorize() for b in eb]

    def e_coords(op: Mat) -> Vec:
        co = coords_in_span(flat_eb, op.vectorize())
        if co is None:
            raise AssertionError("operator left End_A(E)")
        return co

    left, right = [], []
    for a in range(n):
        Aa = E.action[a]
        lc = [vec_concat(e_coords(Aa @ b), zero_vec(N)) for b in eb]
        rc = [vec_concat(e_coords(b @ Aa), zero_vec(N)) for b in eb]
        for j in range(N):
            lc.append(vec_concat(zero_vec(m0), T.carrier.action[a].apply(unit_vec(N, j))))
            rc.append(vec_concat(zero_vec(m0), T.carrier.right_action[a].apply(unit_vec(N, j))))
        left.append(Mat.from_columns(lc))
        right.append(Mat.from_columns(rc))
    carrier = AModule(A, m0 + N, left, right, name=f"End({T.name})")

    dim = m0 + N

    def embed(op: Mat, u: Vec) -> Vec:
        return vec_concat(e_coords(op), u)

    def pair(z: Vec):
        op = Mat.zero(E.dim, E.dim)
        for k, co in enumerate(z[:m0]):
            if co != 0:
                op = op + eb[k].scale(co)
        return op, z[m0:]

    basis_pairs = [(eb[k], zero_vec(N)) for k in range(m0)] + \
        [(Mat.zero(E.dim, E.dim), unit_vec(N, j)) for j in range(N)]
    bracket = []
    for phi, u in basis_pairs:
        row = []
        for psi, v in basis_pairs:
            op = phi.commutator(psi) + c.rho_of(u).commutator(psi) \
                - c.rho_of(v).commutator(phi) + curvature(c, u, v)
            row.append(embed(op, T.bracket_vec(u, v)))
        bracket.append(row)
    anchor_pi = [Mat.zero(n, n)] * m0 + list(T.anchor_pi)
    D = vec_concat(zero_vec(m0), T.central_D)
    proj = Mat.from_columns([zero_vec(N)] * m0 + [unit_vec(N, j) for j in range(N)])
    alpha = T.alpha_matrix @ proj
    X = DLieAlgebra(carrier, bracket, anchor_pi, alpha, T.target, T.base_cocycle,
                    D, name=f"End({T.name})", kind="end_extension")
    badx = validate_dlie(X)
    if badx:
        raise AssertionError("extension failed validation: " + badx[0].describe())
    p_map = DLieMap(X, T, proj)
    badp = validate_dlie_map(p_map)
    if badp:
        raise AssertionError("projection is not a D-Lie map: " + badp[0].describe())
    rho_bang = Connection(X, c.diff1, [eb[k] for k in range(m0)]
                          + [c.rho[j] for j in range(N)])
    badb = validate_connection(rho_bang)
    if badb:
        raise AssertionError("canonical connection invalid: " + badb[0].describe())
    if not is_flat(rho_bang):
        raise AssertionError("canonical connection is not flat")
    return EndExtension(X, T, c, eb, rho_bang, p_map)


@dataclass
class SplitResult:
    status: str                       # "split", "nosplit" or "undecided"
    correction: Optional[list[Mat]]   # P(e_j) per basis vector of the base
    section: Optional[DLieMap] = None


def split_extension(X: EndExtension) -> SplitResult:
    """Decide splitting when End_A(E) is commutative (linear problem).

    Returns "undecided" otherwise; use verify_splitting for candidates.
    """
    eb = X.end_basis
    if any(not a.commutator(b).is_zero() for a in eb for b in eb):
        return SplitResult("undecided", None)
    P = decide_flat_correction(X.base, X.connection, eb)
    if P is None:
        return SplitResult("nosplit", None)
    section = section_from_correction(X, P)
    return SplitResult("split", P, section)


def decide_flat_correction(T: DLieAlgebra, c: Connection,
                           eb: list[Mat]) -> Optional[list[Mat]]:
    """Solve for P-linear P: T -> span(eb) with P(D) = 0 and R_{rho+P} = 0.

    Exact when the span is commutative (the [P,P] term vanishes); this is
    the linear system behind the splitting decision.
    """
    E = c.diff1.module
    n, N = T.algebra.dim, T.dim
    m0 = len(eb)
    nun = N * m0                      # unknown coords of P(e_j) over eb

    def p_mats(assign: Vec) -> list[Mat]:
        out = []
        for j in range(N):
            op = Mat.zero(E.dim, E.dim)
            for k in range(m0):
                co = assign[j * m0 + k]
                if co != 0:
                    op = op + eb[k].scale(co)
            out.append(op)
        return out

    def constraints(assign: Vec) -> Vec:
        P = p_mats(assign)

        def p_of(u: Vec) -> Mat:
            op = Mat.zero(E.dim, E.dim)
            for j, co in enumerate(u):
                if co != 0:
                    op = op + P[j].scale(co)
            return op

        parts = []
        for a in range(n):
            Aa = E.action[a]
            for j in range(N):
                parts.append((p_of(T.carrier.action[a].apply(unit_vec(N, j)))
                              - Aa @ P[j]).vectorize())
                parts.append((p_of(T.carrier.right_action[a].apply(unit_vec(N, j)))
                              - P[j] @ Aa).vectorize())
        parts.append(p_of(T.central_D).vectorize())
        for i, j in combinations(range(N), 2):
            u, v = unit_vec(N, i), unit_vec(N, j)
            flatness = curvature(c, u, v) + c.rho_of(u).commutator(P[j]) \
                - c.rho_of(v).commutator(P[i]) - p_of(T.bracket_vec(u, v))
            parts.append(flatness.vectorize())
        out: Vec = ()
        for p in parts:
            out = out + tuple(p)
        return out

    base_val = constraints(zero_vec(nun))
    cols = [vec_sub(constraints(unit_vec(nun, t)), base_val) for t in range(nun)]
    sol = solve_affine(Mat.from_columns(cols), vec_scale(-1, vector(base_val)))
    if sol is None:
        return None
    return p_mats(sol[0])


def section_from_correction(X: EndExtension, P: list[Mat]) -> DLieMap:
    """The D-Lie map section u |-> (P(u), u) of p_E; validated."""
    T = X.base
    flat_eb = [b.vectorize() for b in X.end_basis]
    cols = []
    for j in range(T.dim):
        co = coords_in_span(flat_eb, P[j].vectorize())
        if co is None:
            raise ValueError("correction does not land in End_A(E)")
        cols.append(vec_concat(co, unit_vec(T.dim, j)))
    s = DLieMap(T, X.dlie, Mat.from_columns(cols))
    bad = validate_dlie_map(s)
    if bad:
        raise ValueError("candidate correction is not a splitting: "
                         + bad[0].describe())
    return s


def verify_splitting(X: EndExtension, P: list[Mat]) -> Report:
    """Check a candidate correction directly: rho + P is a flat connection
    with unchanged rho(D).  Works without any commutativity assumption."""
    out: Report = []
    T, c = X.base, X.connection
    rho2 = Connection(T, c.diff1, [c.rho[j] + P[j] for j in range(T.dim)])
    out += validate_connection(rho2)
    if rho2.rho_d() != c.rho_d():
        out.append(Violation("splitting-moves-rho-D", ()))
    N = T.dim
    for i, j in combinations(range(N), 2):
        R = curvature(rho2, unit_vec(N, i), unit_vec(N, j))
        if not R.is_zero():
            out.append(Violation("splitting-not-flat", (i, j)))
    return out


@dataclass
class AnnihilatorResult:
    pp: PrincipalParts
    basis: list[Vec]          # basis of I(rho) in P-coordinates
    action_rank: int

    @property
    def dim(self) -> int:
        return len(self.basis)


def annihilator_ideal(c: Connection,
                      pp: Optional[PrincipalParts] = None) -> AnnihilatorResult:
    """I(rho) = {p in P : p . rho = 0}, with ideal and rank certificates."""
    T = c.source
    A = T.algebra
    if pp is None:
        pp = build_principal_parts(A)
    E = c.diff1.module
    n, N, d = A.dim, T.dim, E.dim

    def act(p: Vec, op: Mat) -> Mat:
        # lift p to A (x) A, act by (a (x) b).op = a o op o b, well defined
        # because Diff1(E) is a P-module (I.I acts as zero)
        t = pp.quotient.sec.apply(p)
        out = Mat.zero(d, d)
        for i in range(n):
            for j in range(n):
                co = t[i * n + j]
                if co != 0:
                    out = out + (E.action[i] @ op @ E.action[j]).scale(co)
        return out

    cols = []
    for k in range(pp.dim):
        p = unit_vec(pp.dim, k)
        img: Vec = ()
        for j in range(N):
            img = img + act(p, c.rho[j]).vectorize()
        cols.append(img)
    M = Mat.from_columns(cols)
    basis = kernel(M)
    # ideal certificate: P . I(rho) stays inside I(rho)
    for k in range(pp.dim):
        q = unit_vec(pp.dim, k)
        for b in basis:
            prod = pp.multiply(q, b)
            if not in_span(basis, prod):
                raise AssertionError("annihilator is not an ideal")
    r = rank(M)
    assert len(basis) + r == pp.dim
    return AnnihilatorResult(pp, basis, r)
