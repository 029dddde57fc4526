"""Ground truth for restricted classes, used to judge the recurrent-pair procedure."""

from fractions import Fraction

import numpy as np

from .automata import Lasso, complete, lasso_membership
from .errors import PreconditionError
from .finite import MonteCarloResult, mc_summary
from .graphs import tarjan_scc
from .linsolve import reachability_probabilities
from .model import BUCHI, Automaton, MarkovChain
from .product import align, build_subset_chain
from .rng import VectorSplitMix64, thresholds


def prob_dba(chain: MarkovChain, det: Automaton) -> Fraction:
    """Exact acceptance probability for a deterministic Büchi automaton.

    The product chain is the subset chain with singleton subsets; the answer
    is the probability of reaching a bottom SCC that contains an accepting
    automaton state.
    """
    if det.mode != BUCHI:
        raise PreconditionError("prob_dba expects a Büchi automaton")
    if not det.is_deterministic():
        raise PreconditionError("prob_dba expects a deterministic automaton")
    a = complete(align(chain, det))
    sc = build_subset_chain(chain, a)
    succ = lambda i: (j for j, _ in sc.trans[i])
    target = set()
    for comp in tarjan_scc(range(len(sc)), succ):
        members = set(comp)
        if any(j not in members for i in comp for j in succ(i)):
            continue
        if any(sc.states[i][1] & a.accepting for i in comp):
            target |= members
    return reachability_probabilities(sc.with_target(target))[0]


def trajectory_lasso(chain: MarkovChain, start) -> Lasso:
    """The unique trajectory of a functional chain from ``start``, as a lasso."""
    seen = {}
    seq = []
    s = start
    while s not in seen:
        seen[s] = len(seq)
        seq.append(s)
        ((s, _),) = chain.successors(s)
    k = seen[s]
    return Lasso.of(seq[:k], seq[k:])


def prob_functional(chain: MarkovChain, aut: Automaton) -> Fraction:
    """Exact acceptance probability when every chain state has a single successor."""
    if not chain.is_functional():
        raise PreconditionError("prob_functional expects a functional chain")
    a = align(chain, aut)
    return sum((p for s, p in chain.init.items()
                if lasso_membership(a, trajectory_lasso(chain, s))), Fraction(0))


def _step_tables(chain):
    """Row ``i < |S|`` is state ``i``; the last row is the initial distribution."""
    rows = [[chain.prob(s, t) for t in chain.states] for s in chain.states]
    rows.append([chain.init.get(t, Fraction(0)) for t in chain.states])
    return np.array([thresholds(r) for r in rows], dtype=np.int64)


def sample_letters(chain: MarkovChain, horizon: int, samples: int, seed: int) -> np.ndarray:
    """``horizon x samples`` matrix of state indices; column ``i`` is trajectory ``i``."""
    cuts = _step_tables(chain)
    rng = VectorSplitMix64(seed, samples)
    cur = np.full(samples, len(chain.states), dtype=np.int64)
    out = np.empty((horizon, samples), dtype=np.int64)
    for j in range(horizon):
        r = rng.next_unit()
        cur = (cuts[cur] <= r[:, None]).sum(axis=1)
        out[j] = cur
    return out


def visits_upper_estimate(chain: MarkovChain, aut: Automaton, k: int, horizon: int,
                          samples: int, seed: int) -> MonteCarloResult:
    """Fraction of sampled length-``horizon`` prefixes with a run visiting F at least ``k`` times.

    Runs must survive the whole prefix; the visit at position 0 counts.  In
    the limit of long horizons this over-approximates the acceptance
    probability for every fixed ``k``.
    """
    if k < 1 or horizon < k:
        raise ValueError("need k >= 1 and horizon >= k")
    a = align(chain, aut)
    n_q = len(a.states)
    fin = np.array([[q in a.accepting] for q in a.states], dtype=np.int16)
    edges = sorted((a.letter_index[t], a.index[p], a.index[q]) for p, t, q in a.trans)
    letters = sample_letters(chain, horizon, samples, seed)

    best = np.full((n_q, samples), -1, dtype=np.int16)
    for q in a.initial:
        best[a.index[q]] = fin[a.index[q], 0]
    for col in letters:
        masks = {}
        cand = np.full_like(best, -1)
        for t, p, q in edges:
            if t not in masks:
                masks[t] = col == t
            np.maximum(cand[q], np.where(masks[t], best[p], np.int16(-1)), out=cand[q])
        best = np.where(cand >= 0, np.minimum(cand + fin, k), -1).astype(np.int16)
    hits = int((best.max(axis=0, initial=-1) >= k).sum())
    est, hw = mc_summary(hits, samples)
    return MonteCarloResult(est, hw, samples, hits, samples - hits, 0)
