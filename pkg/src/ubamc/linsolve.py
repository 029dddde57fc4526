"""Exact rational solution of ``x = C x + d`` and of chain reachability.

Uniqueness is established structurally before any arithmetic: every unknown
must be able to reach positive ``d`` mass through nonzero entries of ``C``.
When that holds ``I - C`` is nonsingular for the systems built in this package,
and elimination over :class:`~fractions.Fraction` gives the exact answer.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractionError, InvariantError, SingularSystemError, SizeAbort
from .graphs import backward_closure

MAX_UNKNOWNS = 2000

_recorders = []


@dataclass(frozen=True)
class LinearSystem:
    """Unknowns ``index``; ``C`` as sparse rows ``{column: value}``; vector ``d``."""

    index: tuple
    C: tuple
    d: tuple

    def __post_init__(self):
        n = len(self.index)
        if len(self.C) != n or len(self.d) != n:
            raise ValueError("C and d must have one row per unknown")
        C = tuple({j: Fraction(v) for j, v in row.items() if v} for row in self.C)
        for row in C:
            for j, v in row.items():
                if not 0 <= j < n:
                    raise ValueError(f"column {j} out of range")
                if v < 0:
                    raise ValueError("C must be nonnegative")
        d = tuple(Fraction(v) for v in self.d)
        if any(v < 0 for v in d):
            raise ValueError("d must be nonnegative")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_dense(cls, index, C, d):
        return cls(tuple(index), tuple({j: v for j, v in enumerate(row) if v} for row in C),
                   tuple(d))

    def __len__(self):
        return len(self.index)


@contextmanager
def record_solves():
    """Collect ``(system, solution)`` for every :func:`solve_unique` call in the block."""
    log = []
    _recorders.append(log)
    try:
        yield log
    finally:
        _recorders.remove(log)


def residual(system: LinearSystem, x) -> list:
    """``x - (C x + d)`` entrywise."""
    return [x[i] - sum((v * x[j] for j, v in row.items()), Fraction(0)) - system.d[i]
            for i, row in enumerate(system.C)]


def check_contraction(system: LinearSystem) -> None:
    """Raise :class:`ContractionError` unless every unknown can reach positive ``d``."""
    n = len(system)
    pred = [[] for _ in range(n)]
    for i, row in enumerate(system.C):
        for j in row:
            pred[j].append(i)
    good = backward_closure([i for i in range(n) if system.d[i] > 0], pred.__getitem__)
    for i in range(n):
        if i not in good:
            raise ContractionError(
                f"unknown {system.index[i]!r} cannot reach the accepting set",
                vertex=system.index[i])


def _bits(v: Fraction) -> int:
    return abs(v.numerator).bit_length() + v.denominator.bit_length()


def _eliminate(rows, rhs):
    """Gaussian elimination on sparse rows, pivoting on the smallest entry by bit size."""
    n = len(rows)
    remaining = set(range(n))
    order = []
    for k in range(n):
        cands = sorted(r for r in remaining if k in rows[r])
        if not cands:
            raise SingularSystemError(
                "uniqueness precondition violated: I - C is singular")
        piv = min(cands, key=lambda r: (_bits(rows[r][k]), r))
        remaining.discard(piv)
        order.append((k, piv))
        prow, pval = rows[piv], rows[piv][k]
        for r in cands:
            if r == piv:
                continue
            row = rows[r]
            f = row[k] / pval
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            rhs[r] -= f * rhs[piv]
    x = [Fraction(0)] * n
    for k, piv in reversed(order):
        prow = rows[piv]
        acc = rhs[piv]
        for j, v in prow.items():
            if j != k:
                acc -= v * x[j]
        x[k] = acc / prow[k]
    return x


def solve_unique(system: LinearSystem, check_range: bool = True) -> list:
    """The unique solution of ``x = C x + d``, verified to have zero residual."""
    n = len(system)
    if n > MAX_UNKNOWNS:
        raise SizeAbort(f"{n} unknowns exceed the dense limit of {MAX_UNKNOWNS}")
    check_contraction(system)
    rows = []
    for i, row in enumerate(system.C):
        r = {j: -v for j, v in row.items()}
        r[i] = r.get(i, 0) + 1
        if not r[i]:
            del r[i]
        rows.append(r)
    x = _eliminate(rows, list(system.d))
    if any(residual(system, x)):
        raise InvariantError("nonzero residual after exact elimination")
    if check_range and any(v < 0 or v > 1 for v in x):
        raise InvariantError("solution entry outside [0, 1]")
    for log in _recorders:
        log.append((system, x))
    return x


def reachability_probabilities(chain) -> list:
    """Probability of eventually entering ``chain.target`` from every state.

    ``chain`` needs ``trans`` (per state: ``((successor, p), ...)``) and
    ``target`` (a set of state indices).
    """
    n = len(chain.trans)
    target = set(chain.target)
    pred = [[] for _ in range(n)]
    for i, row in enumerate(chain.trans):
        for j, p in row:
            if p:
                pred[j].append(i)
    alive = backward_closure(target, pred.__getitem__)
    unknown = [i for i in range(n) if i in alive and i not in target]
    pos = {i: k for k, i in enumerate(unknown)}
    C, d = [], []
    for i in unknown:
        row, mass = {}, Fraction(0)
        for j, p in chain.trans[i]:
            if j in target:
                mass += p
            elif j in pos:
                row[pos[j]] = row.get(pos[j], 0) + p
        C.append(row)
        d.append(mass)
    x = solve_unique(LinearSystem(tuple(unknown), tuple(C), tuple(d))) if unknown else []
    out = [Fraction(0)] * n
    for i in target:
        out[i] = Fraction(1)
    for k, i in enumerate(unknown):
        out[i] = x[k]
    return out
