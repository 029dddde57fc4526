"""Brute-force reference implementations and small random generators for tests.

Nothing here shares code with the package's decision procedures: run counting
enumerates words and runs explicitly, and lasso ambiguity is decided by
looking for the first branching point of two accepting runs.
"""

from fractions import Fraction
from itertools import product

from ubamc.automata import Lasso
from ubamc.model import BUCHI, FINITE, Automaton, MarkovChain
from ubamc.rng import SplitMix64


def words(alphabet, max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        yield from product(alphabet, repeat=n)


def count_accepting_runs(aut, word):
    """Number of accepting runs on a finite word, by dynamic programming over positions."""
    counts = {q: 1 for q in aut.initial}
    for a in word:
        nxt = {}
        for q, c in counts.items():
            for q2 in aut.successors(q, a):
                nxt[q2] = nxt.get(q2, 0) + c
        counts = nxt
    return sum(c for q, c in counts.items() if q in aut.accepting)


def brute_finite_ambiguous(aut, max_len=6):
    return any(count_accepting_runs(aut, w) > 1 for w in words(aut.alphabet, max_len))


def lassos(alphabet, max_u=3, max_v=3):
    for u in words(alphabet, max_u):
        for v in words(alphabet, max_v, min_len=1):
            yield Lasso.of(u, v)


def _good_configs(aut, lasso):
    """Configurations ``(q, i)`` from which an accepting run on the lasso suffix exists."""
    n, m = len(lasso.u), len(lasso.u) + len(lasso.v)
    configs = [(q, i) for q in aut.states for i in range(m)]

    def succ(c):
        q, i = c
        j = i + 1 if i + 1 < m else n
        return [(q2, j) for q2 in aut.successors(q, lasso.letter(i))]

    # c is good iff it reaches an accepting configuration that lies on a cycle;
    # computed by plain fixpoints on reachability, no SCC algorithm
    reach = {c: set(succ(c)) for c in configs}
    changed = True
    while changed:
        changed = False
        for c in configs:
            new = set().union(reach[c], *(reach[d] for d in reach[c]))
            if new != reach[c]:
                reach[c], changed = new, True
    recurrent = {c for c in configs if c[0] in aut.accepting and c in reach[c]}
    good = {c for c in configs if c in recurrent or reach[c] & recurrent}
    return good, succ


def brute_lasso_run_branching(aut, lasso):
    """Whether two distinct accepting runs exist on the lasso."""
    good, succ = _good_configs(aut, lasso)
    starts = [(q, 0) for q in aut.initial if (q, 0) in good]
    if len(starts) > 1:
        return True
    seen, stack = set(starts), list(starts)
    while stack:
        c = stack.pop()
        nxt = [d for d in set(succ(c)) if d in good]
        if len(nxt) > 1:
            return True
        for d in nxt:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    return False


def brute_lasso_accepted(aut, lasso):
    good, _ = _good_configs(aut, lasso)
    return any((q, 0) in good for q in aut.initial)


def brute_buchi_ambiguous(aut, max_u=3, max_v=3):
    return any(brute_lasso_run_branching(aut, l) for l in lassos(aut.alphabet, max_u, max_v))


def random_automaton(seed, mode=FINITE, max_states=3, letters=("a", "b")):
    g = SplitMix64(seed)
    n = g.between(1, max_states)
    states = tuple(f"q{i}" for i in range(n))
    edge = Fraction(g.between(1, 3), 4)
    trans = {(p, a, q) for p in states for a in letters for q in states if g.chance(edge)}
    initial = {q for q in states if g.chance(Fraction(1, 3))} or {states[0]}
    accepting = {q for q in states if g.chance(Fraction(1, 2))}
    return Automaton(letters, states, initial, trans, accepting, mode)


def random_chain(seed, states=("a", "b"), den=6):
    """Chain over ``states`` with random rows of denominator ``den`` (states are letters)."""
    g = SplitMix64(seed)

    def row():
        w = [0] * len(states)
        for _ in range(den):
            w[g.below(len(states))] += 1
        return {t: Fraction(x, den) for t, x in zip(states, w)}

    trans = {(s, t): p for s in states for t, p in row().items()}
    return MarkovChain(tuple(states), trans, row())


def prefix_probability_by_enumeration(chain, aut, depth):
    """Lower bound on Pr(some prefix accepted): mass of paths of length <= depth that accept.

    Returns ``(accepted_mass, undecided_mass)``; the true value lies in
    ``[accepted, accepted + undecided]``.
    """
    accepted = Fraction(0)
    frontier = [((), Fraction(1), frozenset(aut.initial))]
    if aut.initial & aut.accepting:
        return Fraction(1), Fraction(0)
    for _ in range(depth):
        nxt = []
        for path, p, U in frontier:
            row = chain.init.items() if not path else chain.successors(path[-1])
            for t, pt in row:
                V = frozenset(q2 for q in U for q2 in aut.successors(q, t))
                if V & aut.accepting:
                    accepted += p * pt
                elif V:
                    nxt.append((path + (t,), p * pt, V))
        frontier = nxt
    return accepted, sum((p for _, p, _ in frontier), Fraction(0))


def random_dba(seed, max_states=3, letters=("a", "b")):
    g = SplitMix64(seed)
    states = tuple(f"d{i}" for i in range(g.between(1, max_states)))
    trans = {(p, a, g.choice(states)) for p in states for a in letters
             if g.chance(Fraction(3, 4))}
    accepting = {q for q in states if g.chance(Fraction(1, 2))}
    return Automaton(letters, states, {states[0]}, trans, accepting, BUCHI)
