"""Chain-level BV operations: cup product, bracket, Connes operator.

Degree bookkeeping (with |x| = internal grading minus arity):
  x bullet y   : arity l+m,   internal grading additive, so |x|+|y|
  [x, y]       : arity l+m-1, internal grading additive, so |x|+|y|+1
  B(x)         : arity k-1,   internal grading preserved, so |x|+1
The identity suite re-verifies the product/bracket/operator relations on
random normalized pairs and records which index-bound reading of the
mixed bracket-operator formula closes.
"""

import random

from ophh.bv import (
    bar_circ,
    bracket,
    bullet,
    connes_b,
    connes_b_normalized,
    h_homotopy,
    sample_normalized_pairs,
    verify_identity_suite,
    z_term,
)
from ophh.hochschild import hochschild_differential, is_normalized
from ophh.homology import compute_hh
from ophh.operad import OperadElement


def basis_elements(spec, max_arity, min_arity=0):
    for k in range(min_arity, max_arity + 1):
        for g in spec.generators(k):
            yield OperadElement.basis(k, g.name)


def pairs(spec, max_total, rng, n=40):
    out = []
    for _ in range(n):
        l = rng.randint(0, max_total)
        m = rng.randint(0, max_total - l)
        gl = spec.generators(l)
        gm = spec.generators(m)
        if not gl or not gm:
            continue
        x = OperadElement.basis(l, rng.choice(gl).name)
        y = OperadElement.basis(m, rng.choice(gm).name)
        out.append((x, y))
    return out


def test_bullet_degrees(dual5):
    rng = random.Random(1)
    for x, y in pairs(dual5, 4, rng):
        out = bullet(dual5, x, y)
        assert out.arity == x.arity + y.arity
        if not out.is_zero():
            assert dual5.grading(out) == dual5.grading(x) + dual5.grading(y)


def test_bracket_degrees(dual5):
    rng = random.Random(2)
    for x, y in pairs(dual5, 5, rng):
        if x.arity + y.arity - 1 < 0:
            continue
        out = bracket(dual5, x, y)
        assert out.arity == x.arity + y.arity - 1
        if not out.is_zero():
            assert dual5.grading(out) == dual5.grading(x) + dual5.grading(y)


def test_connes_b_degrees(dual5):
    for x in basis_elements(dual5, 5, min_arity=1):
        out = connes_b(dual5, x)
        assert out.arity == x.arity - 1
        if not out.is_zero():
            assert dual5.grading(out) == dual5.grading(x)


def test_connes_b_squares_to_zero(assoc8, dual5):
    for spec in (assoc8, dual5):
        for x in basis_elements(spec, spec.arity_cap):
            bb = connes_b(spec, connes_b(spec, x)) if x.arity >= 2 else OperadElement.zero(0)
            assert bb.is_zero(), f"BB != 0 at {x!r}"


def test_connes_b_anticommutes_with_differential(assoc8, dual5):
    for spec in (assoc8, dual5):
        for x in basis_elements(spec, spec.arity_cap - 1):
            lhs = connes_b(spec, hochschild_differential(spec, x))
            rhs = hochschild_differential(spec, connes_b(spec, x))
            if lhs.is_zero() or rhs.is_zero():
                assert lhs.is_zero() and rhs.is_zero(), f"B d != -d B at {x!r}"
            else:
                assert (lhs + rhs).is_zero(), f"B d != -d B at {x!r}"


def test_bracket_antisymmetry_on_homogeneous(dual4):
    # [x, y] = -(-1)^{(|x|+1)(|y|+1)} [y, x]
    rng = random.Random(3)
    for x, y in pairs(dual4, 4, rng):
        if x.arity + y.arity - 1 < 0 or x.arity + y.arity - 1 > 4:
            continue
        dx = dual4.grading(x) - x.arity
        dy = dual4.grading(y) - y.arity
        sign = -((-1) ** ((dx + 1) * (dy + 1)))
        lhs = bracket(dual4, x, y)
        rhs = bracket(dual4, y, x).scale(sign)
        assert (lhs - rhs).is_zero(), (x, y)


def test_normalized_operator_preserves_normalization(dual5):
    for x in basis_elements(dual5, 5, min_arity=1):
        if not is_normalized(dual5, x):
            continue
        out = connes_b_normalized(dual5, x)
        if not out.is_zero():
            assert is_normalized(dual5, out), f"B_norm of {x!r} not normalized"


def test_homotopy_terms_stay_normalized(dual5):
    bases = {}
    for x, y in sample_normalized_pairs(dual5, 5, samples=30, seed=17, normalized_bases=bases):
        for out in (z_term(dual5, x, y), h_homotopy(dual5, x, y)):
            if not out.is_zero():
                assert is_normalized(dual5, out)


def test_bar_circ_matches_bracket_assembly(dual4):
    rng = random.Random(4)
    for x, y in pairs(dual4, 4, rng):
        if x.arity + y.arity - 1 < 0 or x.arity + y.arity - 1 > 4 or x.arity == 0 == y.arity:
            continue
        dx = dual4.grading(x) - x.arity
        dy = dual4.grading(y) - y.arity
        expected = bar_circ(dual4, x, y) - bar_circ(dual4, y, x).scale(
            (-1) ** ((dx + 1) * (dy + 1))
        )
        assert (bracket(dual4, x, y) - expected).is_zero()


def test_identity_suite_passes_on_builtins(dual4, assoc6):
    for spec, cap in ((dual4, 4), (assoc6, 6)):
        rep = verify_identity_suite(spec, cap, samples=60, seed=11)
        assert rep.ok, "\n".join(rep.summary_lines())
        assert len(rep.checks) >= 10
        assert "formula2_b_term_reading" in rep.notes


def test_identity_suite_reports_formula2_reading(dual4):
    rep = verify_identity_suite(dual4, 4, samples=40, seed=0)
    assert rep.notes["formula2_b_term_reading"] == "B_l(x): index bound = arity of x"


def test_induced_operations_on_homology_are_compatible(dual4):
    # B induced on homology squares to zero where both sides are tabulated
    tab = compute_hh(dual4, 4, flavor="normalized", ring="Q")
    for (k, g) in tab.bidegrees():
        for cls in tab.basis_classes(k, g):
            if k < 2:
                continue
            x = tab.class_element(cls)
            bb = connes_b(dual4, connes_b(dual4, x))
            assert bb.is_zero()
