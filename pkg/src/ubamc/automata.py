"""Structural algorithms on automata.

Ambiguity and separateness are decided on the self-product ``A x A``; the
Büchi variants look for a nontrivial SCC of the product that contains an
accepting state in each coordinate.  Ultimately periodic words are handled
through :class:`Lasso` and the finite graph of ``(state, position)``
configurations.
"""

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import PreconditionError, UnknownSymbolError
from .graphs import (backward_closure, bfs_path, cycle_through, is_nontrivial,
                     path_to, reachable, tarjan_scc)
from .model import BUCHI, FINITE, Automaton, fresh_name


class Lasso(NamedTuple):
    """The ultimately periodic word ``u v v v ...``."""

    u: tuple
    v: tuple

    @classmethod
    def of(cls, u, v):
        u, v = tuple(u), tuple(v)
        if not v:
            raise ValueError("lasso cycle must be nonempty")
        return cls(u, v)

    def letter(self, i):
        n = len(self.u)
        return self.u[i] if i < n else self.v[(i - n) % len(self.v)]

    def prefix(self, n):
        return tuple(self.letter(i) for i in range(n))


@dataclass(frozen=True)
class AmbiguityVerdict:
    unambiguous: bool
    witness: object = None  # tuple word (finite) or Lasso (buchi)


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    pair: Optional[tuple] = None
    witness: object = None


class Decomposition(NamedTuple):
    """``u v^w = x y y y ...`` with ``x`` in G(s,q) and ``y`` in H(s,q)."""

    letter: str
    state: str
    x: tuple
    y: tuple


def _require_mode(aut, mode, op):
    if aut.mode != mode:
        raise PreconditionError(f"{op} expects a {mode} automaton, got {aut.mode}")


# --------------------------------------------------------------------------- #
# renaming, trimming, completion


def existential_rename(aut: Automaton, lam, states) -> Automaton:
    """Re-letter ``aut`` over ``states``: ``p --s--> q`` iff ``p --lam(s)--> q``."""
    states = tuple(states)
    for s in states:
        if s not in lam:
            raise PreconditionError(f"labelling undefined on {s!r}")
        if lam[s] not in aut.letter_index:
            raise PreconditionError(f"label {lam[s]!r} of {s!r} is not a letter of the automaton")
    by_letter = {}
    for p, a, q in aut.trans:
        by_letter.setdefault(a, []).append((p, q))
    trans = {(p, s, q) for s in states for p, q in by_letter.get(lam[s], ())}
    return aut.replace(alphabet=states, trans=frozenset(trans))


def _restrict(aut, keep):
    keep = set(keep)
    return aut.replace(
        states=tuple(q for q in aut.states if q in keep),
        initial=aut.initial & keep,
        accepting=aut.accepting & keep,
        trans=frozenset(t for t in aut.trans if t[0] in keep and t[2] in keep))


def _forward(aut):
    return lambda q: aut.outgoing(q)


def _state_succ(aut):
    return lambda q: (q2 for _, q2 in aut.outgoing(q))


def _predecessors(aut):
    pred = {q: set() for q in aut.states}
    for p, _, q in aut.trans:
        pred[q].add(p)
    return lambda q: pred[q]


def trim(aut: Automaton) -> Automaton:
    """Keep states reachable from the initial set that can still lead to acceptance.

    For Büchi automata "lead to acceptance" means reaching a cycle through an
    accepting state.
    """
    reach = set(reachable(aut.initial_states, _forward(aut)))
    if aut.mode == FINITE:
        co = backward_closure(aut.accepting & reach, _predecessors(aut))
    else:
        succ = _state_succ(aut)
        inside = lambda q: (q2 for q2 in succ(q) if q2 in reach)
        good = set()
        for comp in tarjan_scc(aut.ordered(reach), inside):
            if is_nontrivial(comp, inside) and any(q in aut.accepting for q in comp):
                good.update(comp)
        co = backward_closure(good, _predecessors(aut))
    return _restrict(aut, reach & co)


def complete(aut: Automaton) -> Automaton:
    """Add a rejecting sink so every (state, letter) has a successor."""
    if aut.is_complete():
        return aut
    sink = fresh_name("sink", set(aut.states))
    trans = set(aut.trans)
    for q in aut.states:
        for a in aut.alphabet:
            if not aut.successors(q, a):
                trans.add((q, a, sink))
    trans.update((sink, a, sink) for a in aut.alphabet)
    initial = aut.initial or {sink}
    return aut.replace(states=aut.states + (sink,), trans=frozenset(trans),
                       initial=frozenset(initial))


# --------------------------------------------------------------------------- #
# self products


def _pair_succ(aut):
    def succ(pq):
        p, q = pq
        for a in aut.alphabet:
            for p2 in aut.successors(p, a):
                for q2 in aut.successors(q, a):
                    yield a, (p2, q2)
    return succ


def _flagged_succ(aut):
    """Pair product with a bit recording whether the two runs have differed."""
    pair = _pair_succ(aut)

    def succ(v):
        p, q, seen = v
        for a, (p2, q2) in pair((p, q)):
            yield a, (p2, q2, seen or p2 != q2)
    return succ


def _accepting_scc(vertices, succ, first_ok, second_ok):
    """First nontrivial SCC with a vertex satisfying each predicate, as (scc, v1, v2)."""
    plain = lambda v: (w for _, w in succ(v))
    inside = set(vertices)
    sub = lambda v: (w for w in plain(v) if w in inside)
    for comp in reversed(tarjan_scc(vertices, sub)):
        if not is_nontrivial(comp, sub):
            continue
        v1 = next((v for v in comp if first_ok(v)), None)
        v2 = next((v for v in comp if second_ok(v)), None)
        if v1 is not None and v2 is not None:
            return set(comp), v1, v2
    return None


def _scc_lasso(parent, succ, comp, v1, v2):
    u = path_to(parent, v1)
    v = bfs_path(v1, v2, succ, comp) + bfs_path(v2, v1, succ, comp)
    if not v:
        v = cycle_through(v1, succ, comp)
    return Lasso.of(u, v)


def check_unambiguous(aut: Automaton) -> AmbiguityVerdict:
    """Decide whether every word has at most one accepting run.

    The witness is a shortest ambiguous word (finite mode) or a lasso on which
    two distinct accepting runs exist (Büchi mode).
    """
    a = trim(aut)
    succ = _flagged_succ(a)
    roots = [(p, q, p != q) for p in a.initial_states for q in a.initial_states]
    parent = reachable(roots, succ)
    F = a.accepting
    if a.mode == FINITE:
        for v in parent:  # BFS order, so the first hit is a shortest witness
            p, q, seen = v
            if seen and p in F and q in F:
                return AmbiguityVerdict(False, tuple(path_to(parent, v)))
        return AmbiguityVerdict(True)
    flagged = [v for v in parent if v[2]]
    found = _accepting_scc(flagged, succ, lambda v: v[0] in F, lambda v: v[1] in F)
    if found is None:
        return AmbiguityVerdict(True)
    comp, v1, v2 = found
    return AmbiguityVerdict(False, _scc_lasso(parent, succ, comp, v1, v2))


def check_separated(aut: Automaton) -> SeparationVerdict:
    """Decide whether no word is accepted from two distinct states."""
    succ = _pair_succ(aut)
    F = aut.accepting
    for i, p in enumerate(aut.states):
        for q in aut.states[i + 1:]:
            parent = reachable([(p, q)], succ)
            if aut.mode == FINITE:
                for v in parent:
                    if v[0] in F and v[1] in F:
                        return SeparationVerdict(False, (p, q), tuple(path_to(parent, v)))
                continue
            found = _accepting_scc(list(parent), succ, lambda v: v[0] in F, lambda v: v[1] in F)
            if found is not None:
                comp, v1, v2 = found
                return SeparationVerdict(False, (p, q), _scc_lasso(parent, succ, comp, v1, v2))
    return SeparationVerdict(True)


# --------------------------------------------------------------------------- #
# determinisation


def subset_name(aut, subset) -> str:
    return "{" + ",".join(aut.ordered(subset)) + "}"


def subset_determinize(aut: Automaton) -> Automaton:
    """Classical subset construction over the reachable nonempty subsets."""
    _require_mode(aut, FINITE, "subset_determinize")
    start = frozenset(aut.initial)
    if not start:
        return Automaton(aut.alphabet, (), frozenset(), frozenset(), frozenset(), FINITE)
    order = [start]
    seen = {start}
    trans = []
    queue = deque([start])
    while queue:
        U = queue.popleft()
        for a in aut.alphabet:
            V = frozenset(q2 for q in U for q2 in aut.successors(q, a))
            if not V:
                continue
            trans.append((U, a, V))
            if V not in seen:
                seen.add(V)
                order.append(V)
                queue.append(V)
    name = {U: subset_name(aut, U) for U in order}
    return Automaton(
        aut.alphabet, tuple(name[U] for U in order), frozenset([name[start]]),
        frozenset((name[U], a, name[V]) for U, a, V in trans),
        frozenset(name[U] for U in order if U & aut.accepting), FINITE)


def accepts_word(aut: Automaton, word) -> bool:
    """Finite-word acceptance (the empty word included)."""
    current = set(aut.initial)
    for a in word:
        current = {q2 for q in current for q2 in aut.successors(q, a)}
    return bool(current & aut.accepting)


# --------------------------------------------------------------------------- #
# lassos


def _check_lasso(aut, lasso):
    for a in lasso.u + lasso.v:
        if a not in aut.letter_index:
            raise UnknownSymbolError(f"letter {a!r} not in the alphabet")


def _config_graph(aut, lasso):
    n, m = len(lasso.u), len(lasso.u) + len(lasso.v)

    def succ(c):
        q, i = c
        a = lasso.letter(i)
        j = i + 1 if i + 1 < m else n
        for q2 in aut.successors(q, a):
            yield a, (q2, j)
    roots = [(q, 0) for q in aut.initial_states]
    return roots, succ


def _accepting_configs(aut, lasso):
    """BFS tree of configurations plus the nontrivial SCCs holding an accepting one."""
    roots, succ = _config_graph(aut, lasso)
    parent = reachable(roots, succ)
    plain = lambda c: (w for _, w in succ(c))
    hits = []
    for comp in tarjan_scc(list(parent), plain):
        if is_nontrivial(comp, plain) and any(q in aut.accepting for q, _ in comp):
            hits.append(set(comp))
    return parent, succ, hits


def lasso_membership(aut: Automaton, lasso: Lasso) -> bool:
    """Whether ``u v^w`` has an accepting Büchi run."""
    _require_mode(aut, BUCHI, "lasso_membership")
    _check_lasso(aut, lasso)
    return bool(_accepting_configs(aut, lasso)[2])


def decompose_accepting_lasso(aut: Automaton, lasso: Lasso) -> Optional[Decomposition]:
    """Split an accepted lasso as ``x y y ...`` through a recurring accepting configuration.

    Returns None when the lasso is rejected.
    """
    _require_mode(aut, BUCHI, "decompose_accepting_lasso")
    _check_lasso(aut, lasso)
    parent, succ, hits = _accepting_configs(aut, lasso)
    if not hits:
        return None
    inside = set().union(*hits)
    c = next(c for c in parent if c in inside and c[0] in aut.accepting)
    comp = next(h for h in hits if c in h)
    x = tuple(path_to(parent, c))
    y = tuple(cycle_through(c, succ, comp))
    if len(x) <= len(lasso.u):
        # make sure x ends inside the periodic part, on the same letter as y
        x = x + y
    return Decomposition(x[-1], c[0], x, y)


# --------------------------------------------------------------------------- #
# the G / H constructions


def build_H_nfa(aut: Automaton, s, q) -> Automaton:
    """NFA for the nonempty words leading ``q`` back to ``q`` whose last letter is ``s``."""
    if q not in aut.index:
        raise UnknownSymbolError(f"unknown state {q!r}")
    if s not in aut.letter_index:
        raise UnknownSymbolError(f"unknown letter {s!r}")
    q_acc = fresh_name("q_acc", set(aut.states))
    extra = {(p, s, q_acc) for p, a, t in aut.trans if a == s and t == q}
    return Automaton(aut.alphabet, aut.states + (q_acc,), frozenset([q]),
                     aut.trans | extra, frozenset([q_acc]), FINITE)


def _pair_names(pairs):
    names = {pq: f"{pq[0]}.{pq[1]}" for pq in pairs}
    if len(set(names.values())) != len(names):
        names = {pq: f"v{i}" for i, pq in enumerate(pairs)}
    return names


def build_union_G_nfa(aut: Automaton, targets) -> Automaton:
    """NFA tracking (state, last letter) that accepts on any ``(letter, state)`` in ``targets``."""
    bottom = fresh_name("^", set(aut.alphabet))
    tags = (bottom,) + aut.alphabet
    pairs = [(p, t) for p in aut.states for t in tags]
    names = _pair_names(pairs)
    trans = {(names[(p, t)], a, names[(p2, a)])
             for p in aut.states for t in tags for a, p2 in aut.outgoing(p)}
    accepting = set()
    for s, q in targets:
        if q not in aut.index:
            raise UnknownSymbolError(f"unknown state {q!r}")
        if s not in aut.letter_index:
            raise UnknownSymbolError(f"unknown letter {s!r}")
        accepting.add(names[(q, s)])
    return Automaton(aut.alphabet, tuple(names[pt] for pt in pairs),
                     frozenset(names[(p, bottom)] for p in aut.initial),
                     frozenset(trans), frozenset(accepting), FINITE)


def build_G_nfa(aut: Automaton, s, q) -> Automaton:
    """NFA for the words ending in ``s`` that lead some initial state to ``q``."""
    return build_union_G_nfa(aut, [(s, q)])


def guess_next_letter_uba(det: Automaton) -> Automaton:
    """Unambiguous nondeterministic Büchi automaton with the language of ``det``.

    State ``(p, x)`` means ``det`` is in ``p`` and the next letter will be ``x``;
    only ``x`` can be read there, and the following letter is guessed freely.
    """
    if not det.is_deterministic():
        raise PreconditionError("guess_next_letter_uba needs a deterministic automaton")
    d = complete(det)
    sigma = d.alphabet
    pairs = [(p, x) for p in d.states for x in sigma]
    names = {pq: f"{pq[0]}_{pq[1]}" for pq in pairs}
    if len(set(names.values())) != len(names):
        names = {pq: f"g{i}" for i, pq in enumerate(pairs)}
    trans = set()
    for p, x in pairs:
        (p2,) = d.successors(p, x)
        trans.update((names[(p, x)], x, names[(p2, y)]) for y in sigma)
    return Automaton(sigma, tuple(names[pq] for pq in pairs),
                     frozenset(names[(p, x)] for p in d.initial for x in sigma),
                     frozenset(trans),
                     frozenset(names[(p, x)] for p in d.accepting for x in sigma), BUCHI)
