from fractions import Fraction

import pytest

from ubamc import fixtures
from ubamc.errors import AlphabetMismatch, SizeAbort
from ubamc.model import MarkovChain
from ubamc.product import (ACCEPTING, DEAD, UNKNOWN, add_virtual_initial, align,
                           build_product, build_subset_chain)


def test_virtual_initial_state():
    m = add_virtual_initial(fixtures.biased_coin())
    assert m.states[0] == "s0"
    assert m.successors("s0") == (("a", Fraction(2, 3)), ("b", Fraction(1, 3)))
    assert m.init == {"s0": 1}


def test_virtual_initial_name_is_fresh():
    m = MarkovChain(("s0",), {("s0", "s0"): 1}, {"s0": 1})
    assert add_virtual_initial(m).states[0] == "s0'"


def test_align_identity_and_mismatch():
    aut = fixtures.second_letter_a()
    assert align(fixtures.fair_coin(), aut) is aut
    m = MarkovChain(("a", "z"), {("a", "a"): 1, ("z", "z"): 1}, {"a": 1})
    with pytest.raises(AlphabetMismatch):
        align(m, aut)


def test_product_classification_second_letter():
    pg = build_product(fixtures.fair_coin(), fixtures.second_letter_a())
    assert pg.roots == (("s0", "p0"),)
    assert pg.tag(("s0", "p0")) == UNKNOWN
    assert pg.tag(("a", "p1")) == UNKNOWN  # p1 --a--> p2
    assert pg.tag(("b", "p2")) == ACCEPTING
    assert pg.tag(("a", "p2")) == ACCEPTING
    assert len(pg.vertices) == 1 + 2 * 3
    assert {w for w, _ in pg.successors(("s0", "p0"))} == {("a", "p1"), ("b", "p1")}


def test_dead_vertices():
    pg = build_product(fixtures.fair_coin(), fixtures.no_accepting())
    assert all(pg.tag(v) == DEAD for v in pg.vertices)


def test_partition_is_exhaustive_and_disjoint():
    pg = build_product(fixtures.fair_coin(), fixtures.kth_from_end(3))
    parts = (pg.accepting, pg.dead, pg.unknown)
    assert sum(map(len, parts)) == len(pg.vertices)
    assert set().union(*parts) == set(pg.vertices)


def test_dot_dump_mentions_every_vertex():
    pg = build_product(fixtures.fair_coin(), fixtures.second_letter_a())
    dot = pg.to_dot()
    assert dot.startswith("digraph product {")
    assert dot.count("shape=") == len(pg.vertices)


def test_subset_chain_rows_are_stochastic():
    chain, aut = fixtures.fair_coin(), fixtures.kth_from_end(3)
    sc = build_subset_chain(chain, aut)
    assert sc.states[0] == ("s0", frozenset({"q0"}))
    for row in sc.trans:
        assert sum(p for _, p in row) == 1
    # q_i is in the subset iff the i-th letter back was a, which also fixes the
    # chain state; short prefixes coincide with b-padded ones
    assert len(sc) == 1 + 2**3


def test_subset_chain_size_abort():
    with pytest.raises(SizeAbort):
        build_subset_chain(fixtures.fair_coin(), fixtures.kth_from_end(8), limit=100)
