"""Exact linear algebra: Smith normal form, ranks, kernels, solving.

Everything here is over Z or Q with no floating point anywhere, so the
checks are equalities, not tolerances.
"""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from ophh.exact import (
    ExactMatrix,
    integer_kernel_basis,
    kernel_basis,
    rank,
    snf,
    solve_in_image,
)


def random_sparse(rng, max_dim=12, lo=-9, hi=9):
    m = rng.randint(1, max_dim)
    n = rng.randint(1, max_dim)
    entries = {}
    # roughly a third of the entries populated
    for r in range(m):
        for c in range(n):
            if rng.random() < 0.34:
                entries[(r, c)] = rng.randint(lo, hi)
    return ExactMatrix(m, n, entries)


def assert_snf_contract(A):
    dec = snf(A)
    U, D, V = dec.U, dec.D, dec.V
    assert U @ A @ V == D
    assert abs(U.det()) == 1
    assert abs(V.det()) == 1
    assert D.is_diagonal()
    facs = dec.invariant_factors()
    assert all(f > 0 for f in facs)
    for a, b in zip(facs, facs[1:]):
        assert b % a == 0
    assert len(facs) == rank(A)


def test_snf_fixed_example():
    A = ExactMatrix.from_rows([[2, 4], [6, 8]])
    dec = snf(A)
    assert dec.invariant_factors() == [2, 4]
    assert dec.D == ExactMatrix.from_rows([[2, 0], [0, 4]])


def test_snf_random_sparse_matrices():
    rng = random.Random(88172)
    for _ in range(20):
        assert_snf_contract(random_sparse(rng))


def test_snf_edge_shapes():
    assert snf(ExactMatrix(3, 4, {})).invariant_factors() == []
    assert_snf_contract(ExactMatrix.from_rows([[5]]))
    assert_snf_contract(ExactMatrix.from_rows([[0, 7, 0]]))
    assert_snf_contract(ExactMatrix.from_cols([[0, 0, -3]]))


small_matrix = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-9, 9), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(small_matrix)
def test_snf_contract_hypothesis(rows):
    assert_snf_contract(ExactMatrix.from_rows(rows))


@settings(max_examples=40, deadline=None)
@given(small_matrix)
def test_kernel_basis_spans_nullspace(rows):
    A = ExactMatrix.from_rows(rows)
    basis = kernel_basis(A)
    assert len(basis) == A.cols - rank(A)
    for v in basis:
        assert all(e == 0 for e in A.matvec(v))


@settings(max_examples=40, deadline=None)
@given(small_matrix)
def test_integer_kernel_is_integral_and_full(rows):
    A = ExactMatrix.from_rows(rows)
    basis = integer_kernel_basis(A)
    assert len(basis) == A.cols - rank(A)
    for v in basis:
        assert all(isinstance(e, int) or Fraction(e).denominator == 1 for e in v)
        assert all(e == 0 for e in A.matvec(v))


def test_solve_in_image_roundtrip():
    rng = random.Random(7)
    for _ in range(25):
        A = random_sparse(rng, max_dim=8)
        x = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(A.cols)]
        b = A.matvec(x)
        sol = solve_in_image(A, b)
        assert sol is not None
        assert A.matvec(sol) == b


def test_solve_in_image_detects_inconsistency():
    A = ExactMatrix.from_rows([[1, 0], [0, 0]])
    assert solve_in_image(A, [0, 1]) is None
    assert solve_in_image(A, [3, 0]) == [3, 0] or A.matvec(solve_in_image(A, [3, 0])) == [3, 0]


def test_rank_matches_transpose():
    rng = random.Random(11)
    for _ in range(10):
        A = random_sparse(rng, max_dim=9)
        assert rank(A) == rank(A.transpose())
