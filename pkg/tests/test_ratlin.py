"""Property tests for the exact rational linear algebra kernel."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from dliecalc.ratlin import (Mat, QuotientSpace, coords_in_span, in_span,
                             is_zero_vec, kernel, rank, rref, solve_affine,
                             span_basis, unit_vec, vector, zero_vec)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_dim=5):
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(1, max_dim))
    data = draw(st.lists(st.lists(fractions, min_size=cols, max_size=cols),
                         min_size=rows, max_size=rows))
    return Mat(data, cols=cols)


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_nullity(M):
    assert rank(M) + len(kernel(M)) == M.cols


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rref_idempotent(M):
    R, pivots = rref(M)
    R2, pivots2 = rref(R)
    assert R2 == R and pivots2 == pivots


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_kernel_vectors_annihilate(M):
    for v in kernel(M):
        assert is_zero_vec(M.apply(v))


@given(matrices(), st.data())
@settings(max_examples=80, deadline=None)
def test_solve_affine_exact(M, data):
    b = vector(data.draw(st.lists(fractions, min_size=M.rows, max_size=M.rows)))
    sol = solve_affine(M, b)
    if sol is None:
        # infeasible exactly when b leaves the column span
        assert not in_span(M.transpose().data, b)
    else:
        particular, directions = sol
        assert M.apply(particular) == b
        for d in directions:
            assert is_zero_vec(M.apply(d))


@given(st.lists(st.lists(fractions, min_size=4, max_size=4), max_size=5))
@settings(max_examples=60, deadline=None)
def test_span_coords_round_trip(vecs):
    vecs = [vector(v) for v in vecs]
    basis = span_basis(vecs)
    assert len(basis) == rank(Mat.from_columns(vecs)) if vecs else basis == []
    for v in vecs:
        coords = coords_in_span(basis, v)
        assert coords is not None
        rebuilt = zero_vec(4)
        for c, b in zip(coords, basis):
            rebuilt = tuple(x + c * y for x, y in zip(rebuilt, b))
        assert rebuilt == v


@given(st.lists(st.lists(fractions, min_size=4, max_size=4), max_size=4))
@settings(max_examples=60, deadline=None)
def test_quotient_space_laws(rels):
    rels = [vector(r) for r in rels]
    q = QuotientSpace(4, rels)
    assert q.dim == 4 - rank(Mat.from_rows(rels)) if rels else q.dim == 4
    # the section is a right inverse of the projection
    assert (q.proj @ q.sec) == Mat.identity(q.dim)
    for r in rels:
        assert is_zero_vec(q.proj.apply(r))


def test_zero_row_matrices_keep_their_width():
    M = Mat.zero(0, 3)
    assert M.cols == 3
    assert (M @ Mat.identity(3)).cols == 3
    assert M.transpose().rows == 3
    q = QuotientSpace(2, [unit_vec(2, 0), unit_vec(2, 1)])
    assert q.dim == 0 and q.proj.cols == 2


def test_exactness_no_rounding():
    # a classically ill-conditioned system solved exactly
    n = 6
    H = Mat([[Fraction(1, i + j + 1) for j in range(n)] for i in range(n)])
    b = H.apply(vector([1] * n))
    sol = solve_affine(H, b)
    assert sol is not None and sol[0] == vector([1] * n) and not sol[1]
