"""Cosimplicial structure and the Hochschild differential.

The coface/codegeneracy maps of a multiplicative operad must satisfy the
cosimplicial identities; the alternating-sum differential then squares to
zero for free.  The normalized complex (intersection of the codegeneracy
kernels) is stable under the differential and computes the same homology.
"""

import pytest

from ophh.hochschild import (
    build_complex,
    codegeneracy,
    coface,
    hochschild_differential,
    is_normalized,
)
from ophh.homology import compute_hh
from ophh.operad import OperadElement


def basis_elements(spec, max_arity):
    for k in range(max_arity + 1):
        for g in spec.generators(k):
            yield OperadElement.basis(k, g.name)


def test_differential_squares_to_zero(assoc8, dual5):
    for spec in (assoc8, dual5):
        for x in basis_elements(spec, spec.arity_cap - 2):
            dd = hochschild_differential(spec, hochschild_differential(spec, x))
            assert dd.is_zero(), f"dd != 0 at {x!r} in {spec.name}"


def test_coface_coface_identities(dual4):
    # d^j d^i = d^i d^{j-1} for i < j
    for x in basis_elements(dual4, 2):
        k = x.arity
        for i in range(0, k + 2):
            for j in range(i + 1, k + 3):
                lhs = coface(dual4, j, coface(dual4, i, x))
                rhs = coface(dual4, i, coface(dual4, j - 1, x))
                assert (lhs - rhs).is_zero(), (x, i, j)


def test_codegeneracy_codegeneracy_identities(dual4):
    # s^j s^i = s^i s^{j+1} for i <= j
    for x in basis_elements(dual4, 4):
        k = x.arity
        for i in range(0, k - 1):
            for j in range(i, k - 1):
                lhs = codegeneracy(dual4, j, codegeneracy(dual4, i, x))
                rhs = codegeneracy(dual4, i, codegeneracy(dual4, j + 1, x))
                assert (lhs - rhs).is_zero(), (x, i, j)


def test_mixed_codegeneracy_coface_identities(dual4):
    for x in basis_elements(dual4, 3):
        k = x.arity
        for j in range(0, k):
            for i in range(0, k + 2):
                got = codegeneracy(dual4, j, coface(dual4, i, x))
                if i < j:
                    ref = coface(dual4, i, codegeneracy(dual4, j - 1, x))
                elif i in (j, j + 1):
                    ref = x
                else:
                    ref = coface(dual4, i - 1, codegeneracy(dual4, j, x))
                assert (got - ref).is_zero(), (x, i, j)


def test_differential_preserves_normalized(dual5):
    for x in basis_elements(dual5, 4):
        if not is_normalized(dual5, x):
            continue
        dx = hochschild_differential(dual5, x)
        if not dx.is_zero():
            assert is_normalized(dual5, dx), f"d of normalized {x!r} not normalized"


def test_complex_matrices_match_elementwise_differential(dual4):
    cx = build_complex(dual4, 4, flavor="full")
    for k in range(0, 3):
        for g in cx.block_gradings(k):
            D = cx.differentials.get((k, g))
            if D is None:
                continue
            dim = cx.block_dim(k, g)
            assert D.cols == dim
            for j in range(dim):
                e = [1 if t == j else 0 for t in range(dim)]
                x = cx.block_coords_to_element(k, g, e)
                dx = hochschild_differential(dual4, x)
                col = D.column(j)
                if dx.is_zero():
                    assert all(c == 0 for c in col)
                else:
                    got = cx.element_block_coords(dx, g)
                    assert got == list(col)


def test_complex_differentials_compose_to_zero(dual5, assoc6):
    for spec, cap in ((dual5, 5), (assoc6, 6)):
        for flavor in ("full", "normalized"):
            cx = build_complex(spec, cap, flavor=flavor)
            for (k, g), D in cx.differentials.items():
                D2 = cx.differentials.get((k + 1, g))
                if D2 is None:
                    continue
                assert (D2 @ D).is_zero(), (spec.name, flavor, k, g)


def test_full_and_normalized_betti_agree(dual5, assoc6):
    for spec, cap in ((dual5, 5), (assoc6, 6)):
        full = compute_hh(spec, cap, flavor="full", ring="Q")
        norm = compute_hh(spec, cap, flavor="normalized", ring="Q")
        degrees = set(full.bidegrees()) | set(norm.bidegrees())
        for (k, g) in degrees:
            assert full.betti(k, g) == norm.betti(k, g), (spec.name, k, g)


def test_bad_coface_index_rejected(dual4):
    x = OperadElement.basis(2, dual4.generators(2)[0].name)
    with pytest.raises(Exception):
        coface(dual4, 5, x)
