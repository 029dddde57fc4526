import json
from fractions import Fraction

import pytest

from ubamc import fixtures
from ubamc.errors import AmbiguousAutomaton, PreconditionError
from ubamc.model import BUCHI, Automaton, MarkovChain
from ubamc.omega import (CLI_MARKER, LEMMA1, SOUNDNESS_FLAG, SUBSET, SUBSET_FALLBACK,
                         prob_uba_recurrent, recurrent_pairs)
from ubamc.oracles import prob_dba

F = Fraction


def test_gfa_recurrence_table():
    table = recurrent_pairs(fixtures.fair_coin(), fixtures.gfa())
    rows = {(r.s, r.q): r for r in table.rows}
    assert set(rows) == {("a", "d1"), ("b", "d1")}
    assert rows[("a", "d1")].prob_H == 1 and rows[("a", "d1")].recurrent
    assert rows[("b", "d1")].prob_H == 0 and not rows[("b", "d1")].recurrent
    assert table.recurrent_set == (("a", "d1"),)


def test_gfa_value_and_union_methods_agree():
    v = prob_uba_recurrent(fixtures.fair_coin(), fixtures.gfa())
    assert v.value == 1 and v.union_method == SUBSET
    w = prob_uba_recurrent(fixtures.fair_coin(), fixtures.gfa(), union_method=LEMMA1)
    assert w.value == 1 and w.union_method == LEMMA1


def test_predict_next_letter_has_no_recurrent_pair():
    table = recurrent_pairs(fixtures.fair_coin(), fixtures.predict_next_letter())
    assert len(table.rows) == 4
    assert all(r.prob_H == F(1, 2) for r in table.rows)
    assert table.recurrent_set == ()
    v = prob_uba_recurrent(fixtures.fair_coin(), fixtures.predict_next_letter())
    assert v.value == 0
    # ... while the automaton is universal, so the true probability is 1
    assert prob_dba(fixtures.fair_coin(), fixtures.universal_dba()) == 1


def test_empty_accepting_set():
    aut = fixtures.no_accepting(BUCHI)
    assert recurrent_pairs(fixtures.fair_coin(), aut).rows == ()
    assert prob_uba_recurrent(fixtures.fair_coin(), aut).value == 0


def test_always_a_is_handled_exactly():
    v = prob_uba_recurrent(fixtures.biased_coin(), fixtures.always_a())
    assert v.value == 0 == prob_dba(fixtures.biased_coin(), fixtures.always_a())


def test_recurrence_on_a_labelled_chain():
    # m0 and m1 both read a; trajectory alternates, so a is read forever
    m = MarkovChain(("m0", "m1"), {("m0", "m1"): 1, ("m1", "m0"): 1}, {"m0": 1},
                    {"m0": "a", "m1": "a"})
    v = prob_uba_recurrent(m, fixtures.gfa())
    assert v.value == 1
    assert set(v.recurrence.recurrent_set) == {("m0", "d1"), ("m1", "d1")}


def test_refuses_ambiguous_and_finite_input():
    amb = Automaton(("a", "b"), ("p", "q"), {"p"},
                    {("p", "a", "p"), ("p", "a", "q"), ("q", "a", "q"), ("p", "b", "p"),
                     ("q", "b", "q")}, {"p", "q"}, BUCHI)
    with pytest.raises(AmbiguousAutomaton):
        prob_uba_recurrent(fixtures.fair_coin(), amb)
    with pytest.raises(PreconditionError):
        recurrent_pairs(fixtures.fair_coin(), fixtures.second_letter_a())
    with pytest.raises(ValueError):
        prob_uba_recurrent(fixtures.fair_coin(), fixtures.gfa(), union_method="magic")


def test_rows_record_the_method_used():
    table = recurrent_pairs(fixtures.fair_coin(), fixtures.gfa())
    methods = {(r.s, r.q): r.method_used for r in table.rows}
    # H(a, d1) lets a run finish on "a" and another on "aa" along the same trajectory
    assert methods[("a", "d1")] == SUBSET_FALLBACK
    assert methods[("b", "d1")] == LEMMA1


def test_every_serialized_verdict_carries_the_flag():
    v = prob_uba_recurrent(fixtures.fair_coin(), fixtures.gfa())
    assert v.soundness_flag == SOUNDNESS_FLAG
    text = json.dumps(v.to_dict(), ensure_ascii=False)
    assert SOUNDNESS_FLAG in text
    assert CLI_MARKER not in text


def test_render_is_aligned():
    text = recurrent_pairs(fixtures.fair_coin(), fixtures.gfa()).render()
    lines = text.splitlines()
    assert lines[0].split()[:3] == ["s", "q", "prob_H"]
    assert lines[1].index("d1") == lines[2].index("d1")
