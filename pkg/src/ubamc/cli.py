"""Command-line entry point: ``ubamc <command> ...``.

Results go to stdout, diagnostics to stderr (lines starting with ``#`` carry
the tool version, input digests and timings).  Exit codes: 0 success, 1 usage,
2 parse error, 3 precondition violation, 4 internal invariant failure,
5 size abort.
"""

import argparse
import hashlib
import sys
import time
from decimal import ROUND_HALF_EVEN, Decimal, Inexact, localcontext
from fractions import Fraction

from . import __version__
from .automata import Lasso, check_separated, check_unambiguous
from .errors import ParseError, UbamcError
from .finite import prob_nfa
from .harness import FAMILIES, dumps, fuzz, hunt_erratum_witness
from .model import parse_automaton, parse_markov_chain
from .omega import CLI_MARKER, LEMMA1, SOUNDNESS_FLAG, SUBSET, prob_uba_recurrent, recurrent_pairs
from .oracles import prob_dba, prob_functional, visits_upper_estimate
from .product import align, build_product

DIGITS = 30
WARNING = (f"warning: {CLI_MARKER}: procedure per withdrawn Theorem 1; the value may "
           f"underestimate the true probability ({SOUNDNESS_FLAG})")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def rational(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def decimal_string(p: Fraction, digits: int = DIGITS) -> str:
    """Round-half-even to ``digits`` significant digits; ``…`` marks an inexact result."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        ctx.clear_flags()
        d = Decimal(p.numerator) / Decimal(p.denominator)
        inexact = ctx.flags[Inexact]
    return format(d, "f") + ("…" if inexact else "")


def _show_word(w):
    if isinstance(w, Lasso):
        return f"{' '.join(w.u) or 'ε'} ({' '.join(w.v)})^ω"
    return " ".join(w) if w else "ε"


class _Session:
    def __init__(self, out, err):
        self.out, self.err = out, err

    def say(self, line=""):
        print(line, file=self.out)

    def note(self, line):
        print(line, file=self.err)

    def read(self, label, path):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from e
        self.note(f"# {label} {path} sha256={hashlib.sha256(raw).hexdigest()}")
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"{path} is not valid UTF-8") from e

    def chain(self, args):
        return parse_markov_chain(self.read("mc", args.mc))

    def aut(self, args):
        return parse_automaton(self.read("aut", args.aut))

    def write(self, path, text):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_prob_nfa(s, args):
    chain, aut = s.chain(args), s.aut(args)
    if args.dot:
        s.write(args.dot, build_product(chain, align(chain, aut)).to_dot())
    p = prob_nfa(chain, aut)
    s.say(rational(p))
    s.say(decimal_string(p))


def cmd_prob_uba(s, args):
    chain, aut = s.chain(args), s.aut(args)
    s.note(WARNING)
    verdict = prob_uba_recurrent(chain, aut, union_method=args.union_method)
    s.say(rational(verdict.value))
    s.note(f"# union method used: {verdict.union_method}")
    if args.json:
        s.write(args.json, dumps(verdict.to_dict()))


def cmd_recurrent(s, args):
    chain, aut = s.chain(args), s.aut(args)
    s.note(WARNING)
    table = recurrent_pairs(chain, aut)
    s.out.write(table.render())
    rec = ", ".join(f"({a},{q})" for a, q in table.recurrent_set)
    s.say(f"recurrent set: {{{rec}}}")
    if args.json:
        s.write(args.json, dumps({"version": __version__, "recurrence": table.to_list(),
                                  "soundness_flag": SOUNDNESS_FLAG}))


def _nondeterminism(aut):
    if len(aut.initial) != 1:
        return f"initial states {' '.join(aut.initial_states) or '(none)'}"
    for q in aut.states:
        for a in aut.alphabet:
            succ = aut.successors(q, a)
            if len(succ) > 1:
                return f"state {q} on {a} -> {' '.join(sorted(succ, key=aut.index.get))}"
    return None


def cmd_check(s, args):
    aut = s.aut(args)
    if args.property == "unambiguous":
        v = check_unambiguous(aut)
        s.say("unambiguous" if v.unambiguous else "ambiguous")
        if not v.unambiguous:
            s.say(f"witness: {_show_word(v.witness)}")
    elif args.property == "separated":
        v = check_separated(aut)
        s.say("separated" if v.separated else "not separated")
        if not v.separated:
            s.say(f"states: {v.pair[0]} {v.pair[1]}")
            s.say(f"witness: {_show_word(v.witness)}")
    else:
        why = _nondeterminism(aut)
        s.say("deterministic" if why is None else "nondeterministic")
        if why is not None:
            s.say(f"witness: {why}")


def cmd_oracle(s, args):
    chain, aut = s.chain(args), s.aut(args)
    if args.kind == "visits":
        r = visits_upper_estimate(chain, aut, args.k, args.horizon, args.samples, args.seed)
        s.say(f"{r.estimate:.6f} +/- {r.half_width_3sigma:.6f} (3 sigma, {r.samples} samples)")
        return
    p = prob_dba(chain, aut) if args.kind == "dba" else prob_functional(chain, aut)
    s.say(rational(p))
    s.say(decimal_string(p))


def cmd_fuzz(s, args):
    t0 = time.perf_counter()
    doc = fuzz(args.trials, args.seed, args.family, samples=args.samples)
    s.write(args.report, dumps(doc))
    counts = doc["summary"]["verdicts"]
    s.say(" ".join(f"{k}={v}" for k, v in counts.items()))
    s.note(f"# elapsed {time.perf_counter() - t0:.2f}s")


def cmd_hunt(s, args):
    t0 = time.perf_counter()
    doc = hunt_erratum_witness(args.trials, args.seed, samples=args.samples)
    s.write(args.report, dumps(doc))
    if doc["found"]:
        w = doc["witness"]
        s.say(f"witness found at trial {doc['trial_index']}: procedure "
              f"{w['procedure_value']['num']}/{w['procedure_value']['den']}, known "
              f"{w['known_value']['num']}/{w['known_value']['den']}")
    else:
        s.say(f"no witness in {args.trials} trials")
    s.note(f"# elapsed {time.perf_counter() - t0:.2f}s")


def build_parser():
    p = _Parser(prog="ubamc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ubamc {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_inputs(name, help_, mc=True):
        c = sub.add_parser(name, help=help_)
        if mc:
            c.add_argument("--mc", required=True, help="Markov chain file")
        c.add_argument("--aut", required=True, help="automaton file")
        return c

    c = with_inputs("prob-nfa", "probability that some prefix is accepted")
    c.add_argument("--dot", metavar="OUT", help="write the product graph in DOT format")
    c.set_defaults(func=cmd_prob_nfa)

    c = with_inputs("prob-uba", "recurrent-pair procedure (unsound)")
    c.add_argument("--union-method", choices=(SUBSET, LEMMA1), default=SUBSET)
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_prob_uba)

    c = with_inputs("recurrent", "table of return probabilities")
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_recurrent)

    c = with_inputs("check", "structural automaton properties", mc=False)
    c.add_argument("--property", required=True,
                   choices=("unambiguous", "separated", "deterministic"))
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("oracle", help="exact or sampled reference values")
    c.add_argument("kind", choices=("dba", "functional", "visits"))
    c.add_argument("--mc", required=True)
    c.add_argument("--aut", required=True)
    c.add_argument("--k", type=int, default=4)
    c.add_argument("--horizon", type=int, default=200)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_oracle)

    c = sub.add_parser("fuzz", help="differential trials on random instances")
    c.add_argument("--trials", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--family", choices=FAMILIES, default="dba_derived")
    c.add_argument("--report", required=True, metavar="OUT")
    c.add_argument("--samples", type=int, default=10_000)
    c.set_defaults(func=cmd_fuzz)

    c = sub.add_parser("hunt", help="search for an instance the procedure gets wrong")
    c.add_argument("--trials", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--report", required=True, metavar="OUT")
    c.add_argument("--samples", type=int, default=10_000)
    c.set_defaults(func=cmd_hunt)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    session = _Session(out, err)
    try:
        args = build_parser().parse_args(argv)
        session.note(f"# ubamc {__version__}")
        args.func(session, args)
    except UsageError as e:
        session.note(f"usage error: {e}")
        return 1
    except UbamcError as e:
        session.note(f"error: {e}")
        return e.exit_code
    except SystemExit as e:  # --help and --version
        return e.code or 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
