"""Continued-fraction recovery of rational parameters.

A learned float y is replaced by the rational p/q that satisfies both
|y − p/q| ≤ eps and eps ≤ 1/q², when exactly one such rational exists.
The second inequality bounds the denominator (q ≤ 1/√eps), and any two
distinct fractions below that bound differ by at least eps, so the
candidates near y are the bounded Farey neighbors of y and at most one
further step outward; no brute-force denominator scan is needed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .automata import FLOAT, RATIONAL, MultiplicityAutomaton
from .errors import InputError

DENOMINATOR_CAP = 10 ** 12
# slack on the |y - p/q| comparison only; the q bound stays exact
COMPARISON_SLACK = Fraction(1, 10 ** 12)


def _as_fraction(x) -> Fraction:
    """Floats are read as the decimal they print as, not their binary value."""
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InputError("value must be finite")
        return Fraction(repr(float(x)))
    return Fraction(x)


def convergents(y, max_terms: int = 64) -> list[Fraction]:
    """Continued-fraction convergents of y, reduced, denominators increasing."""
    if max_terms < 1:
        raise InputError("max_terms must be at least 1")
    yf = _as_fraction(y)
    a0 = math.floor(yf)
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    out = [Fraction(p, q)]
    rem = yf - a0
    while len(out) < max_terms and rem != 0:
        inv = 1 / rem
        a = math.floor(inv)
        rem = inv - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append(Fraction(p, q))
    return out


def _bounded_neighbors(yf: Fraction, qmax: int) -> tuple[Fraction, Fraction]:
    """Farey(qmax) fractions lo ≤ yf ≤ hi closest to yf (lo=hi when yf qualifies)."""
    if yf.denominator <= qmax:
        return yf, yf
    num, den = yf.numerator, yf.denominator
    a = num // den
    p_prev, q_prev = 1, 0
    p_cur, q_cur = a, 1
    rem_num, rem_den = num - a * den, den
    while True:
        # rem_num > 0: yf has denominator > qmax, so the walk always exits early
        a = rem_den // rem_num
        p_next, q_next = a * p_cur + p_prev, a * q_cur + q_prev
        if q_next > qmax:
            t = (qmax - q_prev) // q_cur
            if t >= 1:
                other = Fraction(t * p_cur + p_prev, t * q_cur + q_prev)
            else:
                other = Fraction(p_prev, q_prev)
            here = Fraction(p_cur, q_cur)
            return (here, other) if here < yf else (other, here)
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        rem_num, rem_den = rem_den - a * rem_num, rem_num


def _farey_pred(f: Fraction, n: int) -> Fraction:
    """The Farey(n) fraction immediately below f (f must have denominator ≤ n)."""
    p, q = f.numerator, f.denominator
    s0 = pow(p, -1, q) if q > 1 else 0
    s = s0 + ((n - s0) // q) * q
    return Fraction(p * s - 1, q * s)


def _farey_succ(f: Fraction, n: int) -> Fraction:
    p, q = f.numerator, f.denominator
    s0 = (-pow(p, -1, q)) % q if q > 1 else 0
    s = s0 + ((n - s0) // q) * q
    return Fraction(p * s + 1, q * s)


def best_rational_within(y, eps) -> Fraction | None:
    """The unique p/q with |y − p/q| ≤ eps ≤ 1/q², or None.

    None is returned both when no rational satisfies the two
    inequalities and when several do (so a returned value is always the
    unique admissible one).
    """
    ef = _as_fraction(eps)
    if ef <= 0:
        raise InputError("eps must be positive")
    yf = _as_fraction(y)
    qmax = math.isqrt(ef.denominator // ef.numerator)
    if qmax < 1:
        return None
    if qmax > DENOMINATOR_CAP:
        warnings.warn(f"denominator bound {qmax} exceeds {DENOMINATOR_CAP}; capping "
                      "(eps is smaller than this search supports)", stacklevel=2)
        qmax = DENOMINATOR_CAP
    slack = ef + COMPARISON_SLACK
    lo, hi = _bounded_neighbors(yf, qmax)
    admissible: set[Fraction] = set()
    f = lo
    for _ in range(8):
        if yf - f > slack:
            break
        admissible.add(f)
        f = _farey_pred(f, qmax)
    f = hi
    for _ in range(8):
        if f - yf > slack:
            break
        admissible.add(f)
        f = _farey_succ(f, qmax)
    if len(admissible) == 1:
        return admissible.pop()
    return None


@dataclass(frozen=True)
class ExactifyEntry:
    location: str
    value: float
    rational: Fraction | None


@dataclass(frozen=True)
class ExactifyReport:
    eps: float
    complete: bool
    entries: tuple[ExactifyEntry, ...]

    @property
    def failures(self) -> tuple[ExactifyEntry, ...]:
        return tuple(e for e in self.entries if e.rational is None)


def exactify_ma(a: MultiplicityAutomaton, n: int) -> tuple[MultiplicityAutomaton, ExactifyReport]:
    """Round every parameter of `a` to its admissible rational at eps = n^(-1/4).

    When every parameter succeeds the result is a rational-mode
    automaton; otherwise the automaton stays in float mode (recovered
    parameters take their rounded values, failed ones keep their
    floats) and the report flags the failures.
    """
    if n < 1:
        raise InputError("sample size must be at least 1")
    eps = float(n) ** -0.25
    entries: list[ExactifyEntry] = []

    def recover(loc: str, v) -> Fraction | None:
        r = best_rational_within(v, eps)
        entries.append(ExactifyEntry(loc, float(v), r))
        return r

    iota = [recover(f"iota[{i}]", v) for i, v in enumerate(a.iota)]
    tau = [recover(f"tau[{i}]", v) for i, v in enumerate(a.tau)]
    mats = {x: [[recover(f"phi[{x}][{i}][{j}]", a.matrices[x][i, j])
                 for j in range(a.n)] for i in range(a.n)]
            for x in a.alphabet.symbols}
    complete = all(e.rational is not None for e in entries)
    if complete:
        out = MultiplicityAutomaton(a.alphabet, iota, tau, mats,
                                    mode=RATIONAL, labels=a.labels)
    else:
        def keep(r, orig) -> float:
            return float(orig) if r is None else float(r)
        out = MultiplicityAutomaton(
            a.alphabet,
            [keep(r, a.iota[i]) for i, r in enumerate(iota)],
            [keep(r, a.tau[i]) for i, r in enumerate(tau)],
            {x: [[keep(mats[x][i][j], a.matrices[x][i, j]) for j in range(a.n)]
                 for i in range(a.n)] for x in a.alphabet.symbols},
            mode=FLOAT, labels=a.labels)
    return out, ExactifyReport(eps, complete, tuple(entries))
