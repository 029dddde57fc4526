from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubamc import fixtures
from ubamc.errors import ContractionError, SingularSystemError, SizeAbort
from ubamc.finite import lemma1_system
from ubamc.linsolve import (LinearSystem, check_contraction, record_solves, residual,
                            solve_unique)
from ubamc.product import SubsetChain
from ubamc.linsolve import reachability_probabilities

F = Fraction


def one(c, d):
    return LinearSystem.from_dense(["x"], [[c]], [d])


def test_scalar_closed_forms():
    assert solve_unique(one(F(1, 2), F(1, 2))) == [1]
    assert solve_unique(one(F(1, 2), F(1, 4))) == [F(1, 2)]


def test_second_letter_system():
    pg, system = lemma1_system(fixtures.fair_coin(), fixtures.second_letter_a())
    x = dict(zip(system.index, solve_unique(system)))
    assert x[("s0", "p0")] == F(1, 2)


def test_contraction_failure_names_the_vertex():
    # x1 only feeds itself and never reaches positive d
    system = LinearSystem.from_dense(["x0", "x1"], [[0, F(1, 2)], [0, 1]], [F(1, 2), 0])
    with pytest.raises(ContractionError) as info:
        check_contraction(system)
    assert info.value.vertex == "x1"
    with pytest.raises(ContractionError):
        solve_unique(system)


def test_singular_system_is_reported():
    # structurally contracting but (I - C) singular: row sums above one
    system = LinearSystem.from_dense(["x0", "x1"], [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]],
                                     [F(1, 2), F(1, 2)])
    check_contraction(system)
    with pytest.raises(SingularSystemError, match="uniqueness precondition violated"):
        solve_unique(system)


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        one(F(-1, 2), F(1, 2))


def test_size_abort():
    n = 2001
    system = LinearSystem(tuple(range(n)), tuple({} for _ in range(n)), (F(1),) * n)
    with pytest.raises(SizeAbort):
        solve_unique(system)


def test_record_solves():
    with record_solves() as log:
        solve_unique(one(F(1, 3), F(1, 3)))
    assert len(log) == 1 and log[0][1] == [F(1, 2)]


@st.composite
def substochastic_systems(draw):
    n = draw(st.integers(1, 6))
    C, d = [], []
    for _ in range(n):
        # weights: n columns of C, one for d (shifted to be positive), one lost to nowhere
        w = draw(st.lists(st.integers(0, 4), min_size=n + 2, max_size=n + 2))
        w[n] += 1
        total = sum(w)
        C.append({j: F(w[j], total) for j in range(n) if w[j]})
        d.append(F(w[n], total))
    return LinearSystem(tuple(range(n)), tuple(C), tuple(d))


def _matvec(C, x):
    return [sum((v * x[j] for j, v in row.items()), F(0)) for row in C]


@settings(max_examples=60, deadline=None)
@given(substochastic_systems())
def test_solution_has_zero_residual_and_C_contracts(system):
    x = solve_unique(system, check_range=False)
    assert not any(residual(system, x))
    if len(system) <= 12:
        v = [F(1)] * len(system)
        for _ in range(64):
            v = _matvec(system.C, v)
        assert all(e < 1 for e in v)


def test_reachability_trivial_cases():
    unreachable = SubsetChain(((0, 0), (1, 1)), (((0, F(1)),), ((1, F(1)),)), frozenset({1}))
    assert reachability_probabilities(unreachable) == [0, 1]
    sure = SubsetChain(((0, 0), (1, 1)), (((1, F(1)),), ((1, F(1)),)), frozenset({1}))
    assert reachability_probabilities(sure) == [1, 1]
