"""Markov chains, automata, and their line-oriented text formats.

Probabilities are :class:`fractions.Fraction` throughout.  Both documents are
UTF-8, whitespace separated, with ``#`` starting a comment::

    @mc                          @automaton nba
    states a b                   alphabet a b
    init a 1/2                   states d0 d1
    init b 1/2                   initial d0
    trans a a 1/2                accepting d1
    trans a b 1/2                trans d0 a d1
    ...                          ...

Declaration order of states (and letters) is the canonical index order.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, NamedTuple, Optional

from .errors import ModelError, ParseError, StochasticityError, UnknownSymbolError

FINITE = "finite"
BUCHI = "buchi"
MODES = (FINITE, BUCHI)
_MODE_HEADER = {"nfa": FINITE, "nba": BUCHI}
_HEADER_OF_MODE = {FINITE: "nfa", BUCHI: "nba"}

_TOKEN = re.compile(r"^[\x21-\x7e]+$")
_PROB = re.compile(r"^(?:([01])|(\d+)/(\d+))$")


def _check_token(name, what):
    if not isinstance(name, str) or not _TOKEN.match(name) or name.startswith("#"):
        raise ModelError(f"invalid {what} identifier {name!r}")


def _check_unique(items, what):
    seen = set()
    for x in items:
        if x in seen:
            raise ModelError(f"duplicate {what} {x!r}")
        seen.add(x)


@dataclass(frozen=True)
class MarkovChain:
    """A finite Markov chain ``(S, P, pi)`` with an optional labelling ``S -> letters``.

    ``trans`` and ``init`` store only positive entries; zeros are dropped on
    construction so that equality is structural.
    """

    states: tuple
    trans: Mapping
    init: Mapping
    labels: Optional[Mapping] = None

    def __post_init__(self):
        states = tuple(self.states)
        _check_unique(states, "state")
        for s in states:
            _check_token(s, "state")
        known = set(states)

        trans = {}
        for (s, t), p in self.trans.items():
            for x in (s, t):
                if x not in known:
                    raise UnknownSymbolError(f"unknown state {x!r} in transition {s} -> {t}")
            p = Fraction(p)
            if p < 0 or p > 1:
                raise ModelError(f"probability {p} of {s} -> {t} outside [0,1]")
            if p:
                trans[(s, t)] = p
        init = {}
        for s, p in self.init.items():
            if s not in known:
                raise UnknownSymbolError(f"unknown state {s!r} in initial distribution")
            p = Fraction(p)
            if p < 0 or p > 1:
                raise ModelError(f"initial probability {p} of {s} outside [0,1]")
            if p:
                init[s] = p

        rows = {s: Fraction(0) for s in states}
        for (s, _), p in trans.items():
            rows[s] += p
        for s in states:
            if rows[s] != 1:
                raise StochasticityError(f"row of state {s!r} sums to {rows[s]}, expected 1")
        if states and sum(init.values(), Fraction(0)) != 1:
            raise StochasticityError(
                f"initial distribution sums to {sum(init.values(), Fraction(0))}, expected 1")

        labels = None
        if self.labels is not None:
            labels = dict(self.labels)
            for s in labels:
                if s not in known:
                    raise UnknownSymbolError(f"label for unknown state {s!r}")
            for s in states:
                if s not in labels:
                    raise ModelError(f"state {s!r} has no label")
                _check_token(labels[s], "letter")

        # ordered copies so that iteration follows declaration order
        order = {s: i for i, s in enumerate(states)}
        trans = dict(sorted(trans.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])))
        init = dict(sorted(init.items(), key=lambda kv: order[kv[0]]))
        if labels is not None:
            labels = {s: labels[s] for s in states}
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "trans", trans)
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "labels", labels)

    @cached_property
    def index(self):
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def _succ(self):
        out = {s: [] for s in self.states}
        for (s, t), p in self.trans.items():
            out[s].append((t, p))
        return {s: tuple(v) for s, v in out.items()}

    def successors(self, s):
        """``((t, P(s,t)), ...)`` over positive entries, in state order."""
        return self._succ[s]

    def prob(self, s, t) -> Fraction:
        return self.trans.get((s, t), Fraction(0))

    def is_functional(self) -> bool:
        return all(len(self._succ[s]) == 1 for s in self.states)

    def with_init(self, init) -> "MarkovChain":
        return MarkovChain(self.states, self.trans, init, self.labels)

    def unlabelled(self) -> "MarkovChain":
        """Same chain with states read as letters, for use with an aligned automaton."""
        return MarkovChain(self.states, self.trans, self.init)


@dataclass(frozen=True)
class Automaton:
    """Nondeterministic automaton ``(alphabet, Q, Q0, delta, F)`` read as NFA or NBA."""

    alphabet: tuple
    states: tuple
    initial: frozenset
    trans: frozenset
    accepting: frozenset = frozenset()
    mode: str = FINITE

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        states = tuple(self.states)
        _check_unique(alphabet, "letter")
        _check_unique(states, "state")
        for a in alphabet:
            _check_token(a, "letter")
        for q in states:
            _check_token(q, "state")
        if self.mode not in MODES:
            raise ModelError(f"unknown acceptance mode {self.mode!r}")
        qs, sigma = set(states), set(alphabet)
        initial = frozenset(self.initial)
        accepting = frozenset(self.accepting)
        trans = frozenset(tuple(t) for t in self.trans)
        for q in initial | accepting:
            if q not in qs:
                raise UnknownSymbolError(f"unknown state {q!r}")
        for p, a, q in trans:
            if p not in qs or q not in qs:
                raise UnknownSymbolError(f"transition {p} {a} {q} uses an undeclared state")
            if a not in sigma:
                raise UnknownSymbolError(f"transition {p} {a} {q} uses an undeclared letter")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "trans", trans)

    @cached_property
    def index(self):
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def letter_index(self):
        return {a: i for i, a in enumerate(self.alphabet)}

    @cached_property
    def _succ(self):
        out = {}
        for p, a, q in self.trans:
            out.setdefault((p, a), []).append(q)
        idx = self.index
        return {k: tuple(sorted(v, key=idx.__getitem__)) for k, v in out.items()}

    @cached_property
    def _post(self):
        """``q -> ((letter, target), ...)`` in canonical order."""
        out = {q: [] for q in self.states}
        for p, a, q in self.trans:
            out[p].append((a, q))
        li, qi = self.letter_index, self.index
        return {q: tuple(sorted(v, key=lambda e: (li[e[0]], qi[e[1]]))) for q, v in out.items()}

    def successors(self, q, a) -> tuple:
        return self._succ.get((q, a), ())

    def outgoing(self, q) -> tuple:
        return self._post[q]

    def ordered(self, subset) -> tuple:
        idx = self.index
        return tuple(sorted(subset, key=idx.__getitem__))

    @property
    def initial_states(self) -> tuple:
        return self.ordered(self.initial)

    @property
    def accepting_states(self) -> tuple:
        return self.ordered(self.accepting)

    def is_deterministic(self) -> bool:
        return len(self.initial) <= 1 and all(len(v) <= 1 for v in self._succ.values())

    def is_complete(self) -> bool:
        return len(self.initial) == 1 and all(
            self._succ.get((q, a)) for q in self.states for a in self.alphabet)

    def replace(self, **changes) -> "Automaton":
        fields = dict(alphabet=self.alphabet, states=self.states, initial=self.initial,
                      trans=self.trans, accepting=self.accepting, mode=self.mode)
        fields.update(changes)
        return Automaton(**fields)


def delta_hat(aut: Automaton, subset, word) -> frozenset:
    """States reachable from ``subset`` by reading the nonempty ``word``."""
    word = list(word)
    if not word:
        raise ValueError("delta_hat is defined on nonempty words only")
    current = frozenset(subset)
    for a in word:
        if a not in aut.letter_index:
            raise UnknownSymbolError(f"letter {a!r} not in the alphabet")
        current = frozenset(q2 for q in current for q2 in aut.successors(q, a))
    return current


def fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


class SizeMetrics(NamedTuple):
    mc_size: int
    aut_size: int


def _bits(n: int) -> int:
    return max(1, int(n).bit_length())


def size_metrics(chain: MarkovChain, aut: Automaton) -> SizeMetrics:
    """Bit lengths of the two inputs, with binary-encoded integers."""
    sid = _bits(len(chain.states))
    mc = len(chain.states) * sid
    for p in list(chain.trans.values()) + list(chain.init.values()):
        mc += 2 * sid + _bits(p.numerator) + _bits(p.denominator)
    qid, aid = _bits(len(aut.states)), _bits(len(aut.alphabet))
    aut_size = len(aut.states) + len(aut.alphabet)
    aut_size += len(aut.trans) * (2 * qid + aid) + (len(aut.initial) + len(aut.accepting)) * qid
    return SizeMetrics(mc, aut_size)


# --------------------------------------------------------------------------- #
# text formats


def format_prob(p) -> str:
    p = Fraction(p)
    if p.denominator == 1 and p.numerator in (0, 1):
        return str(p.numerator)
    return f"{p.numerator}/{p.denominator}"


def _lines(text):
    """Yield ``(lineno, [(col, token), ...])`` for non-empty lines, comments removed."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = []
        for m in re.finditer(r"\S+", line):
            if m.group().startswith("#"):
                break
            toks.append((m.start() + 1, m.group()))
        if toks:
            yield lineno, toks


def _parse_prob(tok, lineno, col) -> Fraction:
    m = _PROB.match(tok)
    if not m:
        raise ParseError(f"malformed probability {tok!r} (expected p/q, 0 or 1)", lineno, col)
    if m.group(1) is not None:
        return Fraction(int(m.group(1)))
    num, den = int(m.group(2)), int(m.group(3))
    if den == 0:
        raise ParseError(f"zero denominator in {tok!r}", lineno, col)
    p = Fraction(num, den)
    if p > 1:
        raise ParseError(f"probability {tok} exceeds 1", lineno, col)
    return p


def _arity(toks, n, lineno):
    if len(toks) != n:
        col = toks[min(len(toks), n) - 1][0] if len(toks) > n else toks[-1][0]
        raise ParseError(f"{toks[0][1]!r} expects {n - 1} argument(s), got {len(toks) - 1}",
                         lineno, col)


def _header(lines, expected):
    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise ParseError(f"empty document, expected {expected} header", 1, 1) from None
    return lineno, toks


def parse_markov_chain(text: str) -> MarkovChain:
    lines = _lines(text)
    lineno, toks = _header(lines, "@mc")
    if toks[0][1] != "@mc" or len(toks) != 1:
        raise ParseError("document must start with '@mc'", lineno, toks[0][0])
    states, init, trans, labels = [], {}, {}, {}
    declared = set()
    seen_states = False

    def known(tok, ln, col):
        if tok not in declared:
            raise UnknownSymbolError(f"line {ln}, column {col}: unknown state {tok!r}")
        return tok

    for lineno, toks in lines:
        kw = toks[0][1]
        if kw == "states":
            if seen_states:
                raise ParseError("duplicate 'states' line", lineno, toks[0][0])
            seen_states = True
            for col, s in toks[1:]:
                if s in declared:
                    raise ParseError(f"state {s!r} declared twice", lineno, col)
                declared.add(s)
                states.append(s)
        elif kw == "init":
            _arity(toks, 3, lineno)
            s = known(toks[1][1], lineno, toks[1][0])
            if s in init:
                raise ParseError(f"duplicate init for {s!r}", lineno, toks[0][0])
            init[s] = _parse_prob(toks[2][1], lineno, toks[2][0])
        elif kw == "trans":
            _arity(toks, 4, lineno)
            s = known(toks[1][1], lineno, toks[1][0])
            t = known(toks[2][1], lineno, toks[2][0])
            if (s, t) in trans:
                raise ParseError(f"duplicate transition {s} -> {t}", lineno, toks[0][0])
            trans[(s, t)] = _parse_prob(toks[3][1], lineno, toks[3][0])
        elif kw == "label":
            _arity(toks, 3, lineno)
            s = known(toks[1][1], lineno, toks[1][0])
            if s in labels:
                raise ParseError(f"duplicate label for {s!r}", lineno, toks[0][0])
            labels[s] = toks[2][1]
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, toks[0][0])
    if not seen_states:
        raise ParseError("missing 'states' line", lineno, 1)
    return MarkovChain(tuple(states), trans, init, labels or None)


def serialize_markov_chain(chain: MarkovChain) -> str:
    out = ["@mc", "states " + " ".join(chain.states)]
    out += [f"init {s} {format_prob(p)}" for s, p in chain.init.items()]
    out += [f"trans {s} {t} {format_prob(p)}" for (s, t), p in chain.trans.items()]
    if chain.labels is not None:
        out += [f"label {s} {a}" for s, a in chain.labels.items()]
    return "\n".join(out) + "\n"


def parse_automaton(text: str) -> Automaton:
    lines = _lines(text)
    lineno, toks = _header(lines, "@automaton")
    if toks[0][1] != "@automaton":
        raise ParseError("document must start with '@automaton nfa|nba'", lineno, toks[0][0])
    if len(toks) != 2 or toks[1][1] not in _MODE_HEADER:
        raise ParseError("missing or unknown mode in header (expected nfa or nba)",
                         lineno, toks[-1][0])
    mode = _MODE_HEADER[toks[1][1]]
    sections = {}
    trans = set()
    tlines = []
    for lineno, toks in lines:
        kw = toks[0][1]
        if kw in ("alphabet", "states", "initial", "accepting"):
            if kw in sections:
                raise ParseError(f"duplicate {kw!r} line", lineno, toks[0][0])
            sections[kw] = (lineno, toks[1:])
        elif kw == "trans":
            _arity(toks, 4, lineno)
            tlines.append((lineno, toks))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, toks[0][0])
    for required in ("alphabet", "states"):
        if required not in sections:
            raise ParseError(f"missing {required!r} line", lineno, 1)

    def names(kw):
        return [t for _, t in sections.get(kw, (0, []))[1]]

    alphabet, states = names("alphabet"), names("states")
    qs, sigma = set(states), set(alphabet)
    for kw in ("initial", "accepting"):
        ln, toks = sections.get(kw, (0, []))
        for col, q in toks:
            if q not in qs:
                raise UnknownSymbolError(f"line {ln}, column {col}: undeclared state {q!r}")
    for ln, toks in tlines:
        (_, _), (c1, p), (c2, a), (c3, q) = toks
        if p not in qs:
            raise UnknownSymbolError(f"line {ln}, column {c1}: undeclared state {p!r}")
        if a not in sigma:
            raise UnknownSymbolError(f"line {ln}, column {c2}: undeclared letter {a!r}")
        if q not in qs:
            raise UnknownSymbolError(f"line {ln}, column {c3}: undeclared state {q!r}")
        trans.add((p, a, q))
    return Automaton(tuple(alphabet), tuple(states), frozenset(names("initial")),
                     frozenset(trans), frozenset(names("accepting")), mode)


def serialize_automaton(aut: Automaton) -> str:
    out = [f"@automaton {_HEADER_OF_MODE[aut.mode]}",
           "alphabet " + " ".join(aut.alphabet),
           "states " + " ".join(aut.states)]
    if aut.initial:
        out.append("initial " + " ".join(aut.initial_states))
    if aut.accepting:
        out.append("accepting " + " ".join(aut.accepting_states))
    for q in aut.states:
        out += [f"trans {q} {a} {q2}" for a, q2 in aut.outgoing(q)]
    return "\n".join(out) + "\n"
