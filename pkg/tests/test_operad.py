"""Operad core: axiom validators, bilinearity, grading, cyclic group law.

The fault-injection tests rebuild a spec around a mutated composition
table and require the validators to notice; a validator that stays green
on a corrupted table would be worthless.
"""

import random

import pytest

from conftest import materialize_table
from ophh.defs import builtin_assoc, builtin_spec
from ophh.operad import (
    OperadElement,
    OperadSpec,
    TruncationError,
    validate_cyclic,
    validate_operad,
)


def random_element(spec, k, rng):
    gens = spec.generators(k)
    el = OperadElement.zero(k)
    for g in gens:
        c = rng.randint(-3, 3)
        if c:
            el = el + OperadElement.basis(k, g.name).scale(c)
    return el


def mutated_copy(spec, rng, max_arity=4):
    """Copy of the spec with exactly one sign flipped in one table entry."""
    materialize_table(spec)
    keys = [
        key
        for key, el in spec._table.items()
        if el.terms and key[0] <= max_arity and key[3] <= max_arity
        and key[0] + key[3] - 1 <= max_arity
    ]
    key = rng.choice(keys)
    el = spec._table[key]
    name = rng.choice(sorted(el.terms))
    terms = dict(el.terms)
    terms[name] = -terms[name]
    table = dict(spec._table)
    table[key] = OperadElement(el.arity, terms)
    return OperadSpec(
        spec.name + "-mutated",
        {k: list(spec.generators(k)) for k in range(spec.arity_cap + 1)},
        spec.identity,
        spec.unit,
        spec.multiplication,
        spec.arity_cap,
        compose_table=table,
        tau=dict(spec._tau) if spec._tau else None,
        ring=spec.ring,
    )


def test_validators_pass_on_builtins(assoc8, dual5, ground4):
    for spec in (assoc8, dual5, ground4):
        assert validate_operad(spec).ok, validate_operad(spec).summary_lines()
        assert validate_cyclic(spec).ok, validate_cyclic(spec).summary_lines()


def test_compose_is_bilinear(dual4):
    rng = random.Random(5)
    for _ in range(30):
        k = rng.randint(1, 3)
        m = rng.randint(0, 4 - k + 1)
        if k + m - 1 > 4 or k + m - 1 < 0:
            continue
        i = rng.randint(1, k)
        x1 = random_element(dual4, k, rng)
        x2 = random_element(dual4, k, rng)
        y1 = random_element(dual4, m, rng)
        y2 = random_element(dual4, m, rng)
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        lhs = dual4.compose(x1.scale(a) + x2.scale(b), i, y1)
        rhs = dual4.compose(x1, i, y1).scale(a) + dual4.compose(x2, i, y1).scale(b)
        assert (lhs - rhs).is_zero()
        lhs = dual4.compose(x1, i, y1.scale(a) + y2.scale(b))
        rhs = dual4.compose(x1, i, y1).scale(a) + dual4.compose(x1, i, y2).scale(b)
        assert (lhs - rhs).is_zero()


def test_compose_preserves_internal_grading(dual4):
    for k in range(1, 4):
        for g in dual4.generators(k):
            for m in range(0, 4 - k + 2):
                if k + m - 1 > 4:
                    continue
                for h in dual4.generators(m):
                    out = dual4.table_entry(g, 1, h)
                    if out.is_zero():
                        continue
                    assert dual4.grading(out) == g.grading + h.grading


def test_tau_group_law(dual5):
    rng = random.Random(9)
    for k in range(1, 5):
        x = random_element(dual5, k, rng)
        for p in range(-2, 4):
            for q in range(-2, 4):
                lhs = dual5.tau_pow(dual5.tau_pow(x, p), q)
                rhs = dual5.tau_pow(x, p + q)
                assert (lhs - rhs).is_zero()
        # order k+1
        assert (dual5.tau_pow(x, k + 1) - x).is_zero()


def test_compose_beyond_cap_raises(assoc6):
    x = OperadElement.basis(6, "a6")
    with pytest.raises(TruncationError):
        assoc6.compose(x, 1, OperadElement.basis(2, "a2"))


def test_unknown_builtin_raises():
    with pytest.raises(KeyError):
        builtin_spec("no-such-operad", 3)


def test_single_sign_fault_is_detected(assoc6, dual4):
    rng = random.Random(314)
    for trial in range(12):
        base = assoc6 if trial % 2 == 0 else dual4
        bad = mutated_copy(base, rng)
        ra = validate_operad(bad, max_arity=4)
        rc = validate_cyclic(bad, max_arity=4)
        assert not (ra.ok and rc.ok), f"fault not detected on {bad.name}, trial {trial}"


def test_fault_report_carries_witness(dual4):
    rng = random.Random(2)
    bad = mutated_copy(dual4, rng)
    rep = validate_operad(bad, max_arity=4)
    rep.merge(validate_cyclic(bad, max_arity=4))
    fails = rep.failures()
    assert fails and any(c.witness for c in fails)


def test_identity_and_unit_composition(assoc6):
    for k in range(0, 6):
        for g in assoc6.generators(k):
            x = OperadElement.basis(k, g.name)
            for i in range(1, k + 1):
                assert (assoc6.compose(x, i, assoc6.identity) - x).is_zero()
            one = assoc6.compose(assoc6.identity, 1, x)
            assert (one - x).is_zero()


def test_assoc_has_one_generator_per_arity():
    spec = builtin_assoc(5)
    for k in range(6):
        gens = spec.generators(k)
        assert len(gens) == 1 and gens[0].grading == 0
