"""Seeded instance generation, differential trials, and the counterexample hunt.

A trial runs the recurrent-pair procedure on one (chain, automaton) pair and
compares it with an exact oracle value when the instance family provides one
(``dba_derived``: deterministic automaton made nondeterministic by
:func:`~ubamc.automata.guess_next_letter_uba`; ``functional``: every chain
state has a single successor).  Everything is reproducible from an
:class:`InstanceSpec`.
"""

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from . import __version__
from .automata import check_unambiguous, guess_next_letter_uba
from .errors import PreconditionError, SizeAbort, UbamcError
from .finite import prob_nfa, prob_nfa_subset_oracle
from .fixtures import (end_marked_kth_from_end, fair_coin, kth_from_end, uniform_chain,
                       universal_dba)
from .model import BUCHI, FINITE, Automaton, MarkovChain, serialize_automaton, serialize_markov_chain
from .omega import SOUNDNESS_FLAG, prob_uba_recurrent
from .oracles import prob_dba, prob_functional, visits_upper_estimate
from .product import build_subset_chain
from .rng import MASK, SplitMix64

RAW_UBA = "raw_uba"
DBA_DERIVED = "dba_derived"
FUNCTIONAL = "functional"
FAMILIES = (RAW_UBA, DBA_DERIVED, FUNCTIONAL)

AGREE, DISAGREE, FLAGGED, NOT_COMPARABLE = "agree", "disagree", "flagged", "not_comparable"

REJECTION_CAP = 10_000
FLAG_GAP = 0.2
FLAG_MAX_HALF_WIDTH = 0.05
LETTERS = ("a", "b", "c")


class RejectionCapExhausted(UbamcError):
    exit_code = 5


def _frac_json(p):
    return None if p is None else {"num": p.numerator, "den": p.denominator}


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    mc_states: int
    aut_states: int
    alphabet_size: int
    density: Fraction
    family: str

    def __post_init__(self):
        object.__setattr__(self, "density", Fraction(self.density))
        if not 0 <= self.seed <= MASK:
            raise ValueError("seed must fit in 64 bits")
        if not 1 <= self.mc_states <= 6 or not 1 <= self.aut_states <= 6:
            raise ValueError("mc_states and aut_states must be in 1..6")
        if not 1 <= self.alphabet_size <= 3:
            raise ValueError("alphabet_size must be in 1..3")
        if not 0 < self.density <= 1:
            raise ValueError("density must be in (0, 1]")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def to_dict(self):
        return {"seed": self.seed, "mc_states": self.mc_states, "aut_states": self.aut_states,
                "alphabet_size": self.alphabet_size,
                "density": f"{self.density.numerator}/{self.density.denominator}",
                "family": self.family}

    @classmethod
    def from_dict(cls, d):
        return cls(d["seed"], d["mc_states"], d["aut_states"], d["alphabet_size"],
                   Fraction(d["density"]), d["family"])


def random_spec(seed: int, family: str) -> InstanceSpec:
    """Spec with sizes drawn from ``SplitMix64(seed)``; the instance reuses ``seed``."""
    g = SplitMix64(seed)
    return InstanceSpec(seed & MASK, g.between(1, 4), g.between(1, 4), g.between(1, 3),
                        Fraction(g.between(1, 4), 4), family)


class Instance(NamedTuple):
    chain: MarkovChain
    aut: Automaton
    known_value: Optional[Fraction]
    provenance: Optional[str]
    source: Optional[Automaton]  # the deterministic automaton, for dba_derived


def _distribute(g, support):
    """Random positive rationals over ``support`` with common denominator at most 8."""
    den = g.between(len(support), 8)
    weights = [1] * len(support)
    for _ in range(den - len(support)):
        weights[g.below(len(support))] += 1
    return {t: Fraction(w, den) for t, w in zip(support, weights)}


def _random_chain(g, n, letters, density, functional):
    states = tuple(f"m{i}" for i in range(n))
    trans = {}
    for s in states:
        if functional:
            support = [g.choice(states)]
        else:
            support = [t for t in states if g.chance(density)] or [g.choice(states)]
        trans.update({(s, t): p for t, p in _distribute(g, support).items()})
    init_support = [t for t in states if g.chance(Fraction(1, 2))] or [states[0]]
    labels = {s: g.choice(letters) for s in states}
    return MarkovChain(states, trans, _distribute(g, init_support), labels)


def _random_nba(g, letters, m, density, mode=BUCHI):
    states = tuple(f"q{i}" for i in range(m))
    edge = density / m
    trans = {(p, a, q) for p in states for a in letters for q in states if g.chance(edge)}
    initial = {q for q in states if g.chance(Fraction(1, 2))} or {states[0]}
    accepting = {q for q in states if g.chance(Fraction(1, 2))}
    return Automaton(letters, states, initial, trans, accepting, mode)


def _random_uba(g, letters, m, density, mode=BUCHI):
    for _ in range(REJECTION_CAP):
        a = _random_nba(g, letters, m, density, mode)
        if check_unambiguous(a).unambiguous:
            return a
    raise RejectionCapExhausted(f"no unambiguous automaton within {REJECTION_CAP} attempts")


def _random_dba(g, letters, m, density):
    states = tuple(f"d{i}" for i in range(m))
    trans = {(p, a, g.choice(states)) for p in states for a in letters if g.chance(density)}
    accepting = {q for q in states if g.chance(Fraction(1, 2))}
    return Automaton(letters, states, {states[0]}, trans, accepting, BUCHI)


def gen_instance(spec: InstanceSpec) -> Instance:
    g = SplitMix64(spec.seed)
    letters = LETTERS[:spec.alphabet_size]
    chain = _random_chain(g, spec.mc_states, letters, spec.density,
                          functional=spec.family == FUNCTIONAL)
    if spec.family == DBA_DERIVED:
        det = _random_dba(g, letters, spec.aut_states, spec.density)
        return Instance(chain, guess_next_letter_uba(det), prob_dba(chain, det),
                        "dba_oracle", det)
    aut = _random_uba(g, letters, spec.aut_states, spec.density)
    if spec.family == FUNCTIONAL:
        return Instance(chain, aut, prob_functional(chain, aut), "functional_oracle", None)
    return Instance(chain, aut, None, None, None)


def nfa_instance(seed: int):
    """Random labelled chain (at most 4 states) and unambiguous NFA (at most 6 states)."""
    g = SplitMix64(seed)
    letters = LETTERS[:g.between(1, 3)]
    density = Fraction(g.between(1, 4), 4)
    chain = _random_chain(g, g.between(1, 4), letters, density, functional=False)
    return chain, _random_uba(g, letters, g.between(1, 6), density, FINITE)


@dataclass(frozen=True)
class DiscrepancyReport:
    spec: Optional[InstanceSpec]
    chain: MarkovChain
    aut: Automaton
    known_value: Optional[Fraction]
    provenance: Optional[str]
    procedure_value: Optional[Fraction]
    recurrence: Optional[object]
    diagnostic_estimate: float
    diagnostic_half_width: float
    verdict: str
    recurrent_set_empty: Optional[bool]
    positive_evidence: bool
    error: Optional[str] = None

    def to_dict(self):
        return {
            "version": __version__,
            "spec": None if self.spec is None else self.spec.to_dict(),
            "instance": {
                "mc": serialize_markov_chain(self.chain),
                "aut": serialize_automaton(self.aut),
                "known_value": _frac_json(self.known_value),
                "provenance": self.provenance,
            },
            "procedure_value": _frac_json(self.procedure_value),
            "known_value": _frac_json(self.known_value),
            "verdict": self.verdict,
            "recurrence": [] if self.recurrence is None else self.recurrence.to_list(),
            "recurrent_set_empty": self.recurrent_set_empty,
            "diagnostic_estimate": self.diagnostic_estimate,
            "diagnostic_half_width": self.diagnostic_half_width,
            "positive_evidence": self.positive_evidence,
            "error": self.error,
            "soundness_flag": SOUNDNESS_FLAG,
        }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def differential_trial(chain, aut, known_value=None, provenance=None, spec=None, *,
                       samples=10_000, horizon=200, k=4, seed=None) -> DiscrepancyReport:
    """Run the procedure and the visit estimate on one instance and judge the outcome."""
    if seed is None:
        seed = spec.seed if spec is not None else 0
    diag = visits_upper_estimate(chain, aut, k, horizon, samples, seed)
    positive = (known_value is not None and known_value > 0) or \
        diag.estimate - diag.half_width_3sigma > 0
    try:
        verdict_obj = prob_uba_recurrent(chain, aut)
    except SizeAbort as e:
        return DiscrepancyReport(spec, chain, aut, known_value, provenance, None, None,
                                 diag.estimate, diag.half_width_3sigma, NOT_COMPARABLE,
                                 None, positive, str(e))
    value = verdict_obj.value
    if known_value is not None:
        verdict = AGREE if value == known_value else DISAGREE
    elif (abs(diag.estimate - float(value)) > FLAG_GAP
          and diag.half_width_3sigma < FLAG_MAX_HALF_WIDTH):
        verdict = FLAGGED
    else:
        verdict = NOT_COMPARABLE
    return DiscrepancyReport(spec, chain, aut, known_value, provenance, value,
                             verdict_obj.recurrence, diag.estimate, diag.half_width_3sigma,
                             verdict, not verdict_obj.recurrence.recurrent_set, positive)


def run_spec(spec: InstanceSpec, **kw) -> DiscrepancyReport:
    inst = gen_instance(spec)
    return differential_trial(inst.chain, inst.aut, inst.known_value, inst.provenance,
                              spec, **kw)


def confirm_disagreement(report: DiscrepancyReport) -> bool:
    """Recompute both sides of a ``disagree`` report from scratch and recheck the inequality."""
    if report.verdict != DISAGREE or report.spec is None:
        return False
    inst = gen_instance(report.spec)
    if inst.provenance == "dba_oracle":
        known = prob_dba(inst.chain, inst.source)
    else:
        known = prob_functional(inst.chain, inst.aut)
    proc = prob_uba_recurrent(inst.chain, inst.aut).value
    return known == report.known_value and proc == report.procedure_value and known != proc


def _summary(reports):
    counts = {v: 0 for v in (AGREE, DISAGREE, FLAGGED, NOT_COMPARABLE)}
    for r in reports:
        counts[r.verdict] += 1
    empty = sum(1 for r in reports if r.recurrent_set_empty)
    return {"trials": len(reports), "verdicts": counts, "empty_recurrent_set": empty}


def fuzz(trials: int, seed: int, family: str = DBA_DERIVED, **kw) -> dict:
    """Trial ``i`` uses ``random_spec(seed + i, family)``; reports stay in index order."""
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    if family not in FAMILIES:
        raise PreconditionError(f"unknown family {family!r}")
    reports = []
    for i in range(trials):
        spec = random_spec(seed + i, family)
        try:
            reports.append(run_spec(spec, **kw))
        except RejectionCapExhausted as e:
            reports.append(_failed_generation(spec, str(e)))
    return {"version": __version__,
            "command": {"name": "fuzz", "trials": trials, "seed": seed, "family": family},
            "summary": _summary(reports),
            "reports": [r.to_dict() for r in reports]}


def _failed_generation(spec, message):
    empty_chain = MarkovChain((), {}, {})
    empty_aut = Automaton((), (), frozenset(), frozenset(), frozenset(), BUCHI)
    return DiscrepancyReport(spec, empty_chain, empty_aut, None, None, None, None, 0.0, 0.0,
                             NOT_COMPARABLE, None, False, message)


def is_erratum_witness(report: DiscrepancyReport) -> bool:
    return (report.verdict == DISAGREE and bool(report.recurrent_set_empty)
            and report.known_value is not None and report.known_value > 0)


def hunt_erratum_witness(trials: int, seed: int, **kw) -> dict:
    """First ``dba_derived`` instance with positive known value and no recurrent pair."""
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    reports = []
    for i in range(trials):
        report = run_spec(random_spec(seed + i, DBA_DERIVED), **kw)
        reports.append(report)
        if is_erratum_witness(report) and confirm_disagreement(report):
            return {"version": __version__,
                    "command": {"name": "hunt", "trials": trials, "seed": seed},
                    "found": True, "trial_index": i, "summary": _summary(reports),
                    "witness": report.to_dict()}
    return {"version": __version__, "command": {"name": "hunt", "trials": trials, "seed": seed},
            "found": False, "trial_index": None, "summary": _summary(reports),
            "witness": None}


def fixture_witness_report(**kw) -> DiscrepancyReport:
    """Fair coin against the predict-next-letter automaton, via the dba_derived pathway."""
    chain, det = fair_coin(), universal_dba()
    return differential_trial(chain, guess_next_letter_uba(det), prob_dba(chain, det),
                              "dba_oracle", None, **kw)


def scaling_benchmark(ks=(4, 8, 10, 12)) -> dict:
    """Linear-system method vs. subset chain on two k-parameterised NFA families.

    The oracle may exceed the solver's size limit; its chain size is recorded
    either way.
    """
    rows = []
    families = (("kth_from_end", fair_coin(), kth_from_end),
                ("end_marked_kth_from_end", uniform_chain("abc"), end_marked_kth_from_end))
    for name, chain, make in families:
        for k in ks:
            aut = make(k)
            t0 = time.perf_counter()
            try:
                value, outcome = prob_nfa(chain, aut), "value"
            except PreconditionError as e:
                value, outcome = None, f"refused: {type(e).__name__}"
            t1 = time.perf_counter()
            try:
                oracle, oracle_outcome = prob_nfa_subset_oracle(chain, aut), "value"
            except SizeAbort as e:
                oracle, oracle_outcome = None, f"size abort: {e}"
            t2 = time.perf_counter()
            rows.append({"family": name, "k": k, "prob_nfa": _frac_json(value),
                         "prob_nfa_outcome": outcome, "prob_nfa_seconds": round(t1 - t0, 4),
                         "oracle": _frac_json(oracle), "oracle_outcome": oracle_outcome,
                         "oracle_seconds": round(t2 - t1, 4),
                         "subset_chain_states": len(build_subset_chain(chain, aut))})
    return {"version": __version__, "rows": rows}
