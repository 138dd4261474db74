"""Shared fixtures: the built-in operads at the caps the tests need.

Building a table-backed operad is cheap but not free, so the specs are
session-scoped; tests must not mutate them (fault-injection tests build
their own copies).
"""

import pytest

from ophh.defs import (
    builtin_assoc,
    builtin_frobenius_end,
    frobenius_dual_numbers,
    frobenius_ground,
)


@pytest.fixture(scope="session")
def assoc8():
    return builtin_assoc(8)


@pytest.fixture(scope="session")
def assoc6():
    return builtin_assoc(6)


@pytest.fixture(scope="session")
def dual5():
    return builtin_frobenius_end(frobenius_dual_numbers(), 5)


@pytest.fixture(scope="session")
def dual4():
    return builtin_frobenius_end(frobenius_dual_numbers(), 4)


@pytest.fixture(scope="session")
def ground4():
    return builtin_frobenius_end(frobenius_ground(), 4)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the one-line-per-criterion acceptance results after the run."""
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)


def materialize_table(spec):
    """Force every in-cap composition into the spec's table cache."""
    for k in range(spec.arity_cap + 1):
        for g in spec.generators(k):
            for i in range(1, k + 1):
                for m in range(spec.arity_cap - k + 2):
                    if 0 <= k + m - 1 <= spec.arity_cap:
                        for h in spec.generators(m):
                            spec.table_entry(g, i, h)
