"""Products of a Markov chain with an automaton.

:func:`build_product` is the graph over ``S x Q`` whose edges need a positive
chain step and an automaton move on the new chain state.  The chain gets a
virtual initial state ``s0`` with ``P(s0, s) = pi(s)``; its product row holds
only ``(s0, q)`` for initial ``q``.

:func:`build_subset_chain` determinises the automaton along the trajectory and
yields an ordinary finite Markov chain over ``(s, U)`` pairs.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .automata import existential_rename
from .errors import AlphabetMismatch, SizeAbort
from .graphs import backward_closure
from .model import Automaton, MarkovChain, delta_hat, fresh_name

ACCEPTING = "accepting"
DEAD = "dead"
UNKNOWN = "unknown"

DEFAULT_SUBSET_LIMIT = 200_000


def align(chain: MarkovChain, aut: Automaton) -> Automaton:
    """Re-letter ``aut`` over the chain's states.

    Uses the chain's labelling when present, else the identity (which needs
    every chain state to be a letter of ``aut``).
    """
    if chain.labels is not None:
        return existential_rename(aut, chain.labels, chain.states)
    missing = [s for s in chain.states if s not in aut.letter_index]
    if missing:
        raise AlphabetMismatch(
            f"chain states {missing} are not letters of the automaton and no labelling is given")
    if aut.alphabet == chain.states:
        return aut
    return existential_rename(aut, {s: s for s in chain.states}, chain.states)


def _require_aligned(chain, aut):
    if tuple(aut.alphabet) != tuple(chain.states):
        raise AlphabetMismatch("automaton alphabet must equal the chain's state set "
                               "(apply existential_rename / align first)")


def virtual_initial_name(chain: MarkovChain) -> str:
    return fresh_name("s0", set(chain.states))


def add_virtual_initial(chain: MarkovChain) -> MarkovChain:
    """Prepend a fresh state ``s0`` with ``P(s0, s) = pi(s)`` and ``pi'(s0) = 1``."""
    s0 = virtual_initial_name(chain)
    trans = {(s0, s): p for s, p in chain.init.items()}
    trans.update(chain.trans)
    labels = None
    if chain.labels is not None:
        # s0 has no incoming edges, so its letter is never read
        labels = {s0: next(iter(chain.labels.values()), s0), **chain.labels}
    return MarkovChain((s0,) + chain.states, trans, {s0: Fraction(1)}, labels)


@dataclass(frozen=True)
class ProductGraph:
    chain: MarkovChain
    aut: Automaton
    s0: str
    vertices: tuple
    edges: dict  # vertex -> ((vertex', P(s, s')), ...)
    roots: tuple
    accepting: frozenset
    dead: frozenset
    unknown: frozenset

    def tag(self, v) -> str:
        if v in self.accepting:
            return ACCEPTING
        return DEAD if v in self.dead else UNKNOWN

    def successors(self, v):
        return self.edges[v]

    def to_dot(self) -> str:
        ident = {v: f"n{i}" for i, v in enumerate(self.vertices)}
        shape = {ACCEPTING: "doublecircle", DEAD: "box", UNKNOWN: "circle"}
        out = ["digraph product {"]
        for v in self.vertices:
            out.append(f'  {ident[v]} [label="({v[0]},{v[1]})" shape={shape[self.tag(v)]}];')
        for v in self.vertices:
            for w, p in self.edges[v]:
                out.append(f'  {ident[v]} -> {ident[w]} [label="{p}"];')
        out.append("}")
        return "\n".join(out) + "\n"


def classify_vertices(vertices, edges, aut: Automaton):
    """Partition into (accepting, dead, unknown) by backward reachability from F."""
    acc = frozenset(v for v in vertices if v[1] in aut.accepting)
    pred = {v: [] for v in vertices}
    for v in vertices:
        for w, _ in edges[v]:
            pred[w].append(v)
    alive = backward_closure(acc, pred.__getitem__)
    dead = frozenset(v for v in vertices if v not in alive)
    unknown = frozenset(v for v in vertices if v in alive and v not in acc)
    return acc, dead, unknown


def build_product(chain: MarkovChain, aut: Automaton) -> ProductGraph:
    _require_aligned(chain, aut)
    s0 = virtual_initial_name(chain)
    roots = tuple((s0, q) for q in aut.initial_states)
    vertices = roots + tuple((s, q) for s in chain.states for q in aut.states)
    edges = {}
    for v in vertices:
        s, q = v
        row = chain.init.items() if s == s0 else chain.successors(s)
        edges[v] = tuple(((t, q2), p) for t, p in row for q2 in aut.successors(q, t))
    acc, dead, unknown = classify_vertices(vertices, edges, aut)
    return ProductGraph(chain, aut, s0, vertices, edges, roots, acc, dead, unknown)


@dataclass(frozen=True)
class SubsetChain:
    """A finite Markov chain on indices ``0..n-1``; state 0 is the start."""

    states: tuple  # (chain state, frozenset of automaton states)
    trans: tuple  # per state: ((successor index, probability), ...)
    target: frozenset

    def __len__(self):
        return len(self.states)

    def with_target(self, target) -> "SubsetChain":
        return SubsetChain(self.states, self.trans, frozenset(target))


def build_subset_chain(chain: MarkovChain, aut: Automaton,
                       target_predicate: Callable = lambda s, U: False,
                       limit: int = DEFAULT_SUBSET_LIMIT) -> SubsetChain:
    """Reachable part of the chain over ``(s, delta_hat(Q0, s_1..s))`` from ``(s0, Q0)``."""
    _require_aligned(chain, aut)
    s0 = virtual_initial_name(chain)
    start = (s0, frozenset(aut.initial))
    index = {start: 0}
    states = [start]
    trans = []
    queue = deque([start])
    while queue:
        s, U = queue.popleft()
        row = chain.init.items() if s == s0 else chain.successors(s)
        out = []
        for t, p in row:
            nxt = (t, delta_hat(aut, U, (t,)))
            j = index.get(nxt)
            if j is None:
                if len(states) >= limit:
                    raise SizeAbort(f"subset chain exceeds {limit} states")
                j = index[nxt] = len(states)
                states.append(nxt)
                queue.append(nxt)
            out.append((j, p))
        trans.append(tuple(out))
    target = frozenset(i for i, (s, U) in enumerate(states) if target_predicate(s, U))
    return SubsetChain(tuple(states), tuple(trans), target)
