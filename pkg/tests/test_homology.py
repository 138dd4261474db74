"""Bigraded homology tables: ranks, torsion, representatives, induced ops.

Over Q the betti number of a block must equal nullity minus incoming
rank; over Z the free rank must match the rational betti number in every
bidegree (universal coefficients, since the chain groups are free).
"""

import random

import pytest

from ophh.exact import ExactMatrix, rank
from ophh.hochschild import hochschild_differential
from ophh.homology import (
    HomologyError,
    class_of,
    compute_hh,
    induced_op,
    verify_bv_on_homology,
)
from ophh.operad import (
    OperadElement,
    OperadSpec,
    TruncationError,
    validate_cyclic,
)


def test_assoc_homology_is_one_class_at_origin(assoc8):
    tab = compute_hh(assoc8, 8, flavor="normalized", ring="Z")
    nonzero = {
        (k, g): (tab.betti(k, g), tab.torsion(k, g))
        for (k, g) in tab.bidegrees()
        if tab.betti(k, g) or tab.torsion(k, g)
    }
    assert nonzero == {(0, 0): (1, ())}


def test_betti_equals_nullity_minus_incoming_rank(dual4):
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    cx = tab.cx
    for (k, g) in tab.bidegrees():
        dim = cx.block_dim(k, g)
        out = cx.differentials.get((k, g))
        inc = cx.differentials.get((k - 1, g))
        nullity = dim - (rank(out) if out is not None else 0)
        b = nullity - (rank(inc) if inc is not None else 0)
        assert tab.betti(k, g) == b, (k, g)


def test_rational_betti_matches_integer_free_rank(dual4, assoc6):
    for spec, cap in ((dual4, 4), (assoc6, 6)):
        tq = compute_hh(spec, cap, flavor="normalized", ring="Q")
        tz = compute_hh(spec, cap, flavor="normalized", ring="Z")
        degrees = set(tq.bidegrees()) | set(tz.bidegrees())
        for (k, g) in degrees:
            assert tq.betti(k, g) == tz.betti(k, g), (spec.name, k, g)


def test_class_of_recovers_representatives(dual4):
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    for (k, g) in tab.bidegrees():
        for i in range(tab.betti(k, g)):
            rep = tab.representative(k, g, i)
            cls = class_of(tab, rep)
            assert cls is not None
            expect = tuple(1 if j == i else 0 for j in range(tab.betti(k, g)))
            assert cls.coordinates == expect


def test_class_is_invariant_under_boundary_perturbation(dual4):
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    cx = tab.cx
    rng = random.Random(23)
    probes = 0
    for (k, g) in tab.bidegrees():
        if k == 0 or not tab.betti(k, g):
            continue
        below = cx.normalized_bases.get((k - 1, g), [])
        if not below:
            continue
        rep = tab.representative(k, g, 0)
        base = class_of(tab, rep)
        for _ in range(4):
            coords = [rng.randint(-2, 2) for _ in below]
            w = cx.block_coords_to_element(k - 1, g, coords)
            moved = rep + hochschild_differential(dual4, w)
            if moved.is_zero():
                continue
            assert class_of(tab, moved) == base
            probes += 1
    assert probes >= 5


def test_class_of_rejects_non_cycles(dual4):
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    # the multiplication generator of the endomorphism operad is not a cycle here
    for k in range(1, 4):
        for gen in dual4.generators(k):
            x = OperadElement.basis(k, gen.name)
            if hochschild_differential(dual4, x).is_zero():
                continue
            with pytest.raises(HomologyError):
                class_of(tab, x)
            return
    pytest.skip("no non-cycle basis element found")


def test_induced_op_refuses_out_of_range(dual4):
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    (k, g) = max(tab.bidegrees(), key=lambda kg: kg[0] if tab.betti(*kg) else -1)
    cls = tab.basis_classes(k, g)[0]
    with pytest.raises(TruncationError):
        induced_op(tab, "bullet", cls, cls)


def test_bv_axioms_hold_on_homology(dual4, assoc6):
    for spec, cap in ((dual4, 4), (assoc6, 6)):
        tab = compute_hh(spec, cap, flavor="normalized", ring="Q")
        rep = verify_bv_on_homology(tab, probes=20, seed=0)
        assert rep.ok, "\n".join(rep.summary_lines())


def test_corrupted_tau_is_detected(dual4):
    # flip one sign in one cyclic-action matrix; validate_cyclic must fail
    taus = {k: dual4.tau_matrix(k) for k in range(5)}
    M = taus[2]
    entries = dict(M.entries)
    key = sorted(entries)[0]
    entries[key] = -entries[key] if entries[key] else 1
    taus[2] = ExactMatrix(M.rows, M.cols, entries)
    from conftest import materialize_table

    materialize_table(dual4)
    bad = OperadSpec(
        "dual-bad-tau",
        {k: list(dual4.generators(k)) for k in range(5)},
        dual4.identity,
        dual4.unit,
        dual4.multiplication,
        4,
        compose_table=dict(dual4._table),
        tau=taus,
        ring=dual4.ring,
    )
    assert not validate_cyclic(bad, max_arity=4).ok
