"""Probability that a trajectory has a prefix accepted by an NFA.

:func:`prob_nfa` solves the linear system over the product graph; it is exact
and polynomial but only valid when no trajectory carries two distinct runs
that each reach an accepting state (checked, never assumed).
:func:`prob_nfa_subset_oracle` determinises along the trajectory instead and
works for any NFA.  :func:`simulate_prefix_acceptance` is a seeded Monte Carlo
cross-check.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .automata import AmbiguityVerdict, check_unambiguous, trim
from .errors import AmbiguousAutomaton, PreconditionError, PrefixAmbiguity
from .graphs import backward_closure, path_to, reachable
from .linsolve import LinearSystem, reachability_probabilities, solve_unique
from .model import FINITE, Automaton, MarkovChain
from .product import DEFAULT_SUBSET_LIMIT, align, build_product, build_subset_chain
from .rng import SplitMix64, derive_seeds, thresholds

MAX_WALK_STEPS = 10**6
_DONE = object()


def _require_finite(aut):
    if aut.mode != FINITE:
        raise PreconditionError(f"expected a finite-word automaton, got mode {aut.mode}")


def lemma1_system(chain: MarkovChain, aut: Automaton):
    """Product graph and the system ``x = C x + d`` over its unknown vertices.

    Only unknowns reachable from the roots through unknowns take part: the
    others cannot influence the answer, and the prefix-unambiguity check says
    nothing about them.
    """
    pg = build_product(chain, aut)
    live = reachable([r for r in pg.roots if r in pg.unknown],
                     lambda v: ((None, w) for w, _ in pg.edges[v] if w in pg.unknown))
    unknown = [v for v in pg.vertices if v in live]
    pos = {v: i for i, v in enumerate(unknown)}
    F = aut.accepting
    C, d = [], []
    for v in unknown:
        s, q = v
        row = chain.init.items() if s == pg.s0 else chain.successors(s)
        d.append(sum((p for t, p in row if F.intersection(aut.successors(q, t))), Fraction(0)))
        C.append({pos[w]: p for w, p in pg.edges[v] if w in pos})
    return pg, LinearSystem(tuple(unknown), tuple(C), tuple(d))


def check_prefix_unambiguous(chain: MarkovChain, aut: Automaton) -> AmbiguityVerdict:
    """Decide whether some positive-probability prefix has two runs that each hit F.

    Runs are cut at their first accepting state.  The witness is the shortest
    trajectory prefix (a word over the chain's states) along which two
    distinct cut runs both finish.
    """
    F = aut.accepting

    def step(x, t):
        if x is _DONE or x in F:
            return (_DONE,)
        return aut.successors(x, t)

    def finished(x):
        return x is _DONE or x in F

    s0 = object()

    def succ(v):
        s, x, y, seen = v
        row = chain.init.items() if s is s0 else chain.successors(s)
        for t, _ in row:
            for x2 in step(x, t):
                for y2 in step(y, t):
                    yield t, (t, x2, y2, seen or x2 != y2)

    roots = [(s0, p, q, p != q) for p in aut.initial_states for q in aut.initial_states]
    parent = reachable(roots, succ)
    for v in parent:
        _, x, y, seen = v
        if seen and finished(x) and finished(y):
            return AmbiguityVerdict(False, tuple(path_to(parent, v)))
    return AmbiguityVerdict(True)


def lemma1_applicable(chain: MarkovChain, aut: Automaton):
    """``(ok, reason, witness)`` for an aligned finite automaton."""
    verdict = check_unambiguous(aut)
    if not verdict.unambiguous:
        return False, "ambiguous", verdict.witness
    verdict = check_prefix_unambiguous(chain, aut)
    if not verdict.unambiguous:
        return False, "prefix-ambiguous", verdict.witness
    return True, None, None


def lemma1_value(chain: MarkovChain, aut: Automaton, check_range=True) -> Fraction:
    """Sum over initial states of the linear-system solution, with no applicability checks."""
    if aut.initial & aut.accepting:
        return Fraction(1)
    pg, system = lemma1_system(chain, aut)
    x = solve_unique(system, check_range=check_range) if len(system) else []
    value = dict(zip(system.index, x))
    return sum((value.get(r, Fraction(0)) for r in pg.roots), Fraction(0))


def prob_nfa(chain: MarkovChain, aut: Automaton) -> Fraction:
    """Exact probability that some prefix of a trajectory is accepted by ``aut``.

    Refuses (raises :class:`AmbiguousAutomaton` or :class:`PrefixAmbiguity`)
    rather than answer when the linear system would count a trajectory twice.
    Once both checks pass, at most one cut run per trajectory reaches F, so
    the expected number of live runs decays and ``I - C`` is invertible.
    """
    _require_finite(aut)
    a = align(chain, aut)
    verdict = check_unambiguous(a)
    if not verdict.unambiguous:
        raise AmbiguousAutomaton(
            f"automaton is ambiguous, e.g. on {' '.join(verdict.witness) or '(empty word)'}",
            witness=verdict.witness)
    if a.initial & a.accepting:
        return Fraction(1)
    verdict = check_prefix_unambiguous(chain, a)
    if not verdict.unambiguous:
        raise PrefixAmbiguity(
            "two runs reach an accepting state along the trajectory prefix "
            f"{' '.join(verdict.witness) or '(empty)'}; the linear system would overcount",
            witness=verdict.witness)
    value = lemma1_value(chain, a)
    if not 0 <= value <= 1:
        raise AssertionError(value)
    return value


def prob_nfa_subset_oracle(chain: MarkovChain, aut: Automaton,
                           limit: int = DEFAULT_SUBSET_LIMIT) -> Fraction:
    """Same quantity via the determinised trajectory chain; valid for any NFA."""
    _require_finite(aut)
    a = align(chain, aut)
    F = a.accepting
    sc = build_subset_chain(chain, a, lambda s, U: bool(U & F), limit=limit)
    return reachability_probabilities(sc)[0]


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    half_width_3sigma: float
    samples: int
    accepted: int
    rejected: int
    capped: int


def mc_summary(hits: int, n: int):
    p = hits / n if n else 0.0
    return p, (3 * math.sqrt(p * (1 - p) / n) if n else 0.0)


def simulate_prefix_acceptance(chain: MarkovChain, aut: Automaton, samples: int, seed: int,
                               max_steps: int = MAX_WALK_STEPS) -> MonteCarloResult:
    """Walk the chain tracking the subset of automaton states until accept or dead."""
    _require_finite(aut)
    a = trim(align(chain, aut))
    F = a.accepting
    sc = build_subset_chain(chain, a, lambda s, U: bool(U & F))
    pred = [[] for _ in sc.trans]
    for i, row in enumerate(sc.trans):
        for j, _ in row:
            pred[j].append(i)
    alive = backward_closure(sc.target, pred.__getitem__)
    cuts = [thresholds(p for _, p in row) for row in sc.trans]
    accepted = rejected = capped = 0
    for s in derive_seeds(seed, samples):
        g = SplitMix64(s)
        i = 0
        for _ in range(max_steps):
            if i in sc.target:
                accepted += 1
                break
            if i not in alive:
                rejected += 1
                break
            i = sc.trans[i][g.pick(cuts[i])][0]
        else:
            capped += 1
    est, hw = mc_summary(accepted, samples)
    return MonteCarloResult(est, hw, samples, accepted, rejected, capped)
