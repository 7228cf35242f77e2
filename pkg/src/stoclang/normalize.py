"""Turning a signed series with unit total mass into a distribution.

A multiplicity automaton whose series converges absolutely to 1 may
still take negative values on some words. The normalized series keeps
a tree S of prefixes with positive suffix mass, discards the negative
part N(u) at every node, and rescales the survivors by per-node
factors λ_u so that the result p_r is a genuine stochastic language
with p_r(u) ≤ r(u) wherever r(u) > 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .automata import (MultiplicityAutomaton, RATIONAL, _resolvent_tau,
                       abs_letter_sum, absolute_convergence_certificate,
                       tail_sum)
from .errors import CertificationError, ContractError
from .words import Word

MASS_TOL = 1e-6
# suffix masses this close to zero are treated as nonpositive (off the tree)
PREFIX_POS_TOL = 1e-12
MAX_SAMPLE_LEN = 10 ** 6


@dataclass
class _NodeRecord:
    """One explored prefix u of the support tree S."""
    vec: np.ndarray     # ι·M_u
    weight: object      # r(u)
    r_prefix: object    # r(uΣ*)
    child_prefix: dict  # x → r(uxΣ*)
    neg_mass: object    # r(N(u)), never positive
    mass: object        # λ_parent·r(uΣ*), the p_r mass below u (1 at the root)
    lam: object         # λ_u
    in_s: bool = True


class NormalizedSeries:
    """Lazily explored normalization of a certified automaton.

    Nodes are materialized on demand and memoized, so only prefixes
    actually touched by evaluation or sampling are ever computed. The
    memo is the sole mutable state; inserts are idempotent, so sharing
    it between threads is safe under the interpreter lock.
    """

    def __init__(self, base: MultiplicityAutomaton):
        cert = absolute_convergence_certificate(base)
        if not cert.certified:
            raise CertificationError(
                f"absolute letter-sum spectral radius {cert.rho_abs:.6f} is not "
                "below 1; cannot certify that the series converges absolutely")
        total = tail_sum(base, 0)
        if abs(float(total) - 1.0) > MASS_TOL:
            raise CertificationError(
                f"series total mass {float(total):.9f} differs from 1 by more "
                f"than {MASS_TOL}; normalization requires unit total mass")
        self.base = base
        self.certificate = cert
        self.memo: dict[Word, _NodeRecord] = {}
        self._one = Fraction(1) if base.mode == RATIONAL else 1.0
        self._materialize_root()

    # -- tree construction -------------------------------------------------

    def _scalar(self, v):
        return v if self.base.mode == RATIONAL else float(v)

    def _positive(self, v) -> bool:
        if self.base.mode == RATIONAL:
            return v > 0
        return v > PREFIX_POS_TOL

    def _children_of(self, vec):
        res = _resolvent_tau(self.base)
        return {x: self._scalar(np.dot(np.dot(vec, self.base.matrices[x]), res))
                for x in self.base.alphabet.symbols}

    def _finish_record(self, vec, weight, r_prefix, mass, denom=None) -> _NodeRecord:
        child_prefix = self._children_of(vec)
        # a cut child inside the (0, tol] boundary band counts as zero,
        # never as positive discarded mass
        zero = self._one * 0
        neg = sum((min(v, zero) for v in child_prefix.values()
                   if not self._positive(v)), start=zero)
        if weight <= 0:
            neg = neg + weight
        lam = mass / ((r_prefix if denom is None else denom) - neg)
        return _NodeRecord(vec, weight, r_prefix, child_prefix, neg, mass, lam)

    def _materialize_root(self) -> None:
        a = self.base
        vec = a.iota
        weight = self._scalar(np.dot(vec, a.tau))
        r_prefix = tail_sum(a, 0)
        # the root factor divides by an exact 1, not the measured total;
        # the gate has already pinned that total to 1 within tolerance
        self.memo[()] = self._finish_record(vec, weight, r_prefix, self._one,
                                            denom=self._one)

    def _record(self, u: Word) -> _NodeRecord | None:
        """The memo record for u, or None when u ∉ S."""
        known = self.memo.get(u)
        if known is not None:
            return known
        if not u:
            return None
        parent = self._record(u[:-1])
        if parent is None:
            return None
        x = u[-1]
        r_prefix = parent.child_prefix[x]
        if not self._positive(r_prefix):
            return None
        vec = np.dot(parent.vec, self.base.matrices[x])
        weight = self._scalar(np.dot(vec, self.base.tau))
        rec = self._finish_record(vec, weight, r_prefix, parent.lam * r_prefix)
        self.memo[u] = rec
        return rec


def in_support(ns: NormalizedSeries, u) -> bool:
    """Whether the prefix u belongs to the positive-mass tree S."""
    return ns._record(ns.base.alphabet.word(u)) is not None


def node_neg_mass(ns: NormalizedSeries, u):
    """r(N(u)): the nonpositive suffix masses discarded at node u."""
    rec = ns._record(ns.base.alphabet.word(u))
    if rec is None:
        raise ContractError(f"prefix {u!r} is outside the support tree")
    return rec.neg_mass


def lambda_at(ns: NormalizedSeries, u):
    """The rescaling factor λ_u, in (0, 1] for every u in the tree."""
    rec = ns._record(ns.base.alphabet.word(u))
    if rec is None:
        raise ContractError(f"prefix {u!r} is outside the support tree")
    return rec.lam


def pr_eval(ns: NormalizedSeries, u):
    """p_r(u): λ_u·r(u) when u survives, 0 when u or its weight is cut."""
    rec = ns._record(ns.base.alphabet.word(u))
    if rec is None or rec.weight <= 0:
        return ns.base.zero()
    return rec.lam * rec.weight


def pr_prefix_mass(ns: NormalizedSeries, u):
    """Total p_r mass of words extending u (1 at the root, 0 off the tree)."""
    rec = ns._record(ns.base.alphabet.word(u))
    if rec is None:
        return ns.base.zero()
    return rec.mass


def pr_sample(ns: NormalizedSeries, seed_state) -> Word:
    """One word drawn from p_r by walking the tree autoregressively.

    At each node the stop weight is p_r(u) and each surviving child x
    carries weight λ_u·r(uxΣ*); the two together add up to the node
    mass, so the walk terminates with probability one.
    """
    rng = (seed_state if isinstance(seed_state, np.random.Generator)
           else np.random.default_rng(seed_state))
    u: tuple = ()
    rec = ns._record(u)
    while True:
        stop = float(rec.lam * rec.weight) if rec.weight > 0 else 0.0
        kids = [(x, float(rec.lam * v)) for x, v in rec.child_prefix.items()
                if ns._positive(v)]
        total = stop + sum(w for _, w in kids)
        draw = rng.random() * total
        if draw < stop or not kids:
            return u
        acc = stop
        chosen = kids[-1][0]
        for x, w in kids:
            acc += w
            if draw < acc:
                chosen = x
                break
        u = u + (chosen,)
        if len(u) > MAX_SAMPLE_LEN:
            raise ContractError(f"sampled word exceeded {MAX_SAMPLE_LEN} letters")
        rec = ns._record(u)


def neg_total_and_abs_mass(ns: NormalizedSeries, depth: int) -> dict:
    """Truncated r(N) and a bracket on the absolute mass Σ|r(u)|.

    neg_total sums node_neg_mass over the tree down to the given
    depth; the absolute mass is summed over all words up to the depth
    and bracketed above using the certified geometric tail.
    """
    a = ns.base
    neg_total = 0.0
    frontier: list[Word] = [()]
    for _ in range(depth + 1):
        nxt: list[Word] = []
        for u in frontier:
            rec = ns._record(u)
            neg_total += float(rec.neg_mass)
            nxt.extend(u + (x,) for x, v in rec.child_prefix.items()
                       if ns._positive(v))
        frontier = nxt

    tau = a.tau.astype(float)
    rows = [a.iota.astype(float)]
    lower = 0.0
    for level in range(depth + 1):
        lower += sum(abs(float(row @ tau)) for row in rows)
        if level < depth:
            rows = [row @ a.matrices[x].astype(float) for row in rows
                    for x in a.alphabet.symbols]

    m_abs = abs_letter_sum(a)
    row = np.abs(a.iota.astype(float))
    for _ in range(depth + 1):
        row = row @ m_abs
    tail = float(row @ np.linalg.solve(np.eye(a.n) - m_abs, np.abs(tau)))
    return {"neg_total": neg_total, "abs_mass_lower": lower,
            "abs_mass_upper": lower + tail}
