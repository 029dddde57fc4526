"""Small named chains and automata used throughout the tests and examples."""

from fractions import Fraction

from .automata import guess_next_letter_uba
from .model import BUCHI, FINITE, Automaton, MarkovChain


def iid_chain(probs) -> MarkovChain:
    """Chain whose every step (and start) draws letter ``x`` with ``probs[x]``."""
    states = tuple(probs)
    trans = {(s, t): Fraction(probs[t]) for s in states for t in states}
    return MarkovChain(states, trans, {t: Fraction(probs[t]) for t in states})


def fair_coin() -> MarkovChain:
    return iid_chain({"a": Fraction(1, 2), "b": Fraction(1, 2)})


def biased_coin() -> MarkovChain:
    return iid_chain({"a": Fraction(2, 3), "b": Fraction(1, 3)})


def uniform_chain(letters) -> MarkovChain:
    return iid_chain({x: Fraction(1, len(letters)) for x in letters})


def first_letter_a() -> Automaton:
    return Automaton(("a", "b"), ("p0", "p1"), {"p0"}, {("p0", "a", "p1")}, {"p1"}, FINITE)


def second_letter_a() -> Automaton:
    trans = {("p0", "a", "p1"), ("p0", "b", "p1"), ("p1", "a", "p2")}
    return Automaton(("a", "b"), ("p0", "p1", "p2"), {"p0"}, trans, {"p2"}, FINITE)


def no_accepting(mode=FINITE) -> Automaton:
    trans = {("p0", x, "p0") for x in "ab"}
    return Automaton(("a", "b"), ("p0",), {"p0"}, trans, frozenset(), mode)


def ambiguous_nfa() -> Automaton:
    """The word ``a`` has two accepting runs, ``q q`` and ``q r``."""
    return Automaton(("a",), ("q", "r"), {"q"}, {("q", "a", "q"), ("q", "a", "r")},
                     {"q", "r"}, FINITE)


def gfa() -> Automaton:
    """Deterministic Büchi automaton for "infinitely many a"."""
    trans = {("d0", "a", "d1"), ("d0", "b", "d0"), ("d1", "a", "d1"), ("d1", "b", "d0")}
    return Automaton(("a", "b"), ("d0", "d1"), {"d0"}, trans, {"d1"}, BUCHI)


def always_a() -> Automaton:
    trans = {("s", "a", "s"), ("s", "b", "sink"), ("sink", "a", "sink"), ("sink", "b", "sink")}
    return Automaton(("a", "b"), ("s", "sink"), {"s"}, trans, {"s"}, BUCHI)


def universal_dba(letters=("a", "b")) -> Automaton:
    return Automaton(tuple(letters), ("q",), {"q"}, {("q", x, "q") for x in letters},
                     {"q"}, BUCHI)


def predict_next_letter() -> Automaton:
    """Universal, unambiguous, nondeterministic: state ``q_x`` reads only ``x``.

    Every infinite word has exactly one run, yet against the fair coin no pair
    ``(s, q)`` is recurrent.
    """
    return guess_next_letter_uba(universal_dba())


def kth_from_end(k: int) -> Automaton:
    """NFA for "the k-th letter from the end is a" over {a, b}; q0 guesses the position."""
    states = tuple(f"q{i}" for i in range(k + 1))
    trans = {("q0", "a", "q0"), ("q0", "b", "q0"), ("q0", "a", "q1")}
    trans |= {(f"q{i}", x, f"q{i + 1}") for i in range(1, k) for x in "ab"}
    return Automaton(("a", "b"), states, {"q0"}, trans, {f"q{k}"}, FINITE)


def end_marked_kth_from_end(k: int) -> Automaton:
    """Over {a, b, c}: the k-th letter before the first c is a.

    The waiting state has no c-move, so every run dies at the first c and at
    most one run ever accepts; against the uniform chain the probability is
    ``(1/2) (2/3)^k``.
    """
    states = ("w",) + tuple(f"r{i}" for i in range(1, k + 1)) + ("f",)
    trans = {("w", "a", "w"), ("w", "b", "w"), ("w", "a", "r1")}
    trans |= {(f"r{i}", x, f"r{i + 1}") for i in range(1, k) for x in "ab"}
    trans.add((f"r{k}", "c", "f"))
    return Automaton(("a", "b", "c"), states, {"w"}, trans, {"f"}, FINITE)


def prefix_overlap_nfa() -> Automaton:
    """Unambiguous, yet accepts both ``a`` and ``ab`` through different runs."""
    trans = {("q", "a", "f"), ("q", "a", "r"), ("r", "b", "g")}
    return Automaton(("a", "b"), ("q", "f", "r", "g"), {"q"}, trans, {"f", "g"}, FINITE)
