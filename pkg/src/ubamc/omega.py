"""Recurrent-pair procedure for unambiguous Büchi automata.

The procedure classifies each ``(s, q)`` in ``S x F`` as recurrent when the
chain, started from ``P(s, .)``, returns the automaton from ``q`` to ``q``
(ending on ``s``) with probability one, then reports the probability of ever
reaching a recurrent pair from the initial states.

This procedure is NOT sound: there are chains and automata with positive
acceptance probability whose product has no recurrent pair at all, so the
value returned here can underestimate the truth (see
``fixtures.predict_next_letter``).  Every result carries :data:`SOUNDNESS_FLAG`.
"""

from dataclasses import dataclass
from fractions import Fraction

from .automata import build_H_nfa, build_union_G_nfa, check_unambiguous
from .errors import AmbiguousAutomaton, InvariantError, PreconditionError
from .finite import check_prefix_unambiguous, lemma1_value, prob_nfa_subset_oracle
from .linsolve import reachability_probabilities
from .model import BUCHI, Automaton, MarkovChain
from .product import DEFAULT_SUBSET_LIMIT, align, build_subset_chain

SOUNDNESS_FLAG = "WITHDRAWN — see erratum"
CLI_MARKER = "WITHDRAWN-THEOREM-1"

LEMMA1 = "lemma1"
SUBSET = "subset"
SUBSET_FALLBACK = "subset_fallback"


@dataclass(frozen=True)
class RecurrenceRow:
    s: str
    q: str
    prob_H: Fraction
    recurrent: bool
    h_unambiguous: bool
    h_prefix_unambiguous: bool
    method_used: str

    def to_dict(self):
        return {"s": self.s, "q": self.q,
                "prob_H": {"num": self.prob_H.numerator, "den": self.prob_H.denominator},
                "recurrent": self.recurrent, "h_unambiguous": self.h_unambiguous,
                "h_prefix_unambiguous": self.h_prefix_unambiguous,
                "method_used": self.method_used}


@dataclass(frozen=True)
class RecurrenceTable:
    rows: tuple

    @property
    def recurrent_set(self) -> tuple:
        return tuple((r.s, r.q) for r in self.rows if r.recurrent)

    def to_list(self):
        return [r.to_dict() for r in self.rows]

    def render(self) -> str:
        head = ("s", "q", "prob_H", "recurrent", "h_unambiguous", "h_prefix_unamb", "method")
        body = [(r.s, r.q, str(r.prob_H), "yes" if r.recurrent else "no",
                 "yes" if r.h_unambiguous else "no",
                 "yes" if r.h_prefix_unambiguous else "no", r.method_used) for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        lines = ["  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip()
                 for line in [head] + body]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class UbaVerdict:
    value: Fraction
    recurrence: RecurrenceTable
    union_method: str
    soundness_flag: str = SOUNDNESS_FLAG

    def to_dict(self):
        return {"value": {"num": self.value.numerator, "den": self.value.denominator},
                "union_method": self.union_method,
                "recurrence": self.recurrence.to_list(),
                "soundness_flag": self.soundness_flag}


def _prepare(chain, aut):
    if aut.mode != BUCHI:
        raise PreconditionError(f"expected a Büchi automaton, got mode {aut.mode}")
    a = align(chain, aut)
    verdict = check_unambiguous(a)
    if not verdict.unambiguous:
        raise AmbiguousAutomaton(
            "Büchi automaton is ambiguous, e.g. on the lasso "
            f"{' '.join(verdict.witness.u)} ({' '.join(verdict.witness.v)})^w",
            witness=verdict.witness)
    return chain.unlabelled(), a


def _finite_probability(chain, nfa, limit):
    """Prefix-acceptance probability; the linear system when valid, else the subset chain.

    Returns ``(value, unambiguous, prefix_unambiguous, method)``.
    """
    unamb = check_unambiguous(nfa).unambiguous
    prefix_ok = unamb and check_prefix_unambiguous(chain, nfa).unambiguous
    oracle = prob_nfa_subset_oracle(chain, nfa, limit=limit)
    if not prefix_ok:
        return oracle, unamb, prefix_ok, SUBSET_FALLBACK
    value = lemma1_value(chain, nfa)
    if value != oracle:
        raise InvariantError(f"linear system gave {value}, subset chain {oracle}")
    return value, unamb, prefix_ok, LEMMA1


def recurrent_pairs(chain: MarkovChain, aut: Automaton,
                    limit: int = DEFAULT_SUBSET_LIMIT) -> RecurrenceTable:
    """Probability of each return language ``H(s, q)`` from ``P(s, .)``, and recurrence."""
    chain, a = _prepare(chain, aut)
    return _recurrence(chain, a, limit)


def _recurrence(chain, a, limit):
    rows = []
    for s in chain.states:
        start = chain.with_init(dict(chain.successors(s)))
        for q in a.accepting_states:
            h = build_H_nfa(a, s, q)
            p, unamb, prefix_ok, method = _finite_probability(start, h, limit)
            rows.append(RecurrenceRow(s, q, p, p == 1, unamb, prefix_ok, method))
    return RecurrenceTable(tuple(rows))


def prob_uba_recurrent(chain: MarkovChain, aut: Automaton, union_method: str = SUBSET,
                       limit: int = DEFAULT_SUBSET_LIMIT) -> UbaVerdict:
    """Probability of reaching a recurrent pair.  Unsound; see the module docstring."""
    if union_method not in (SUBSET, LEMMA1):
        raise ValueError(f"unknown union method {union_method!r}")
    chain, a = _prepare(chain, aut)
    table = _recurrence(chain, a, limit)
    rec = set(table.recurrent_set)
    sc = build_subset_chain(chain, a, lambda s, U: any((s, q) in rec for q in U), limit=limit)
    value = reachability_probabilities(sc)[0]
    used = SUBSET
    if union_method == LEMMA1:
        g = build_union_G_nfa(a, sorted(rec, key=lambda sq: (chain.index[sq[0]], a.index[sq[1]])))
        if check_unambiguous(g).unambiguous and check_prefix_unambiguous(chain, g).unambiguous:
            alt = lemma1_value(chain, g)
            if alt != value:
                raise InvariantError(f"union via linear system {alt} != subset chain {value}")
            used = LEMMA1
    return UbaVerdict(value, table, used)
