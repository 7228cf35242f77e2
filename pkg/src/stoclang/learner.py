"""Residual-driven automaton learning over empirical samples.

The learner walks candidate prefixes of the sample in length-lex order.
For each frontier word v = ux it asks whether the empirical residual
v⁻¹P_S can be written as a convex-free affine combination of the
residuals of the states kept so far, up to an L∞ slack eps: the system

    |v⁻¹P_S(wΣ*) − Σ_u x_u · u⁻¹P_S(wΣ*)| ≤ eps   for every w ∈ fact(S)
    Σ_u x_u = 1

If no solution exists, v becomes a new state; otherwise the solution
coefficients wire v's incoming transition onto the existing states.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact_linalg
from .automata import (FLOAT, RATIONAL, MultiplicityAutomaton,
                       absolute_convergence_certificate, is_pa, prefix_weight,
                       tail_sum, word_weight)
from .errors import ContractError, FeasibilityError, InputError
from .sampling import EmpiricalTrie, Sample, build_trie
from .simplex import OPTIMAL, solve_lp
from .words import EPSILON, Word

SOLVE_SLACK = 1e-9
SUPPORT_TOL = 1e-6
RANK_SV_TOL = 1e-8
RESIDUAL_MEMBER_TOL = 1e-12


@dataclass(frozen=True)
class FeasibilityRow:
    w: Word
    target: float
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class FeasibilitySystem:
    """The inequation system I(Q, v, S, eps) in matrix-ready form."""

    variables: tuple[Word, ...]
    rows: tuple[FeasibilityRow, ...]
    eps: float


@dataclass(frozen=True)
class FeasibilityOutcome:
    feasible: bool
    solution: dict[Word, float] | None
    achieved_eps: float
    diagnostic: str | None = None


def epsilon_schedule(n: int) -> float:
    """The learner's slack at sample size n: n^(-1/3)."""
    if n < 1:
        raise InputError("sample size must be at least 1")
    return float(n) ** (-1.0 / 3.0)


def build_system(trie: EmpiricalTrie, q_words, v: Word, eps: float,
                 max_factor_len: int | None = None) -> FeasibilitySystem:
    """One row per distinct w ∈ fact(S), in length-lex order."""
    variables = tuple(q_words)
    v_node = trie.node(v)
    if v_node is None or v_node.prefix_count == 0:
        raise ContractError(f"frontier word {v} has no mass in the sample")
    u_nodes = []
    for u in variables:
        node = trie.node(u)
        if node is None or node.prefix_count == 0:
            raise ContractError(f"state word {u} has no mass in the sample")
        u_nodes.append(node)

    def walk_count(node, w: Word) -> int:
        for s in w:
            node = node.children.get(s)
            if node is None:
                return 0
        return node.prefix_count

    rows = []
    for w in trie.factor_set():
        if max_factor_len is not None and len(w) > max_factor_len:
            continue
        target = walk_count(v_node, w) / v_node.prefix_count
        coeffs = tuple(walk_count(nd, w) / nd.prefix_count for nd in u_nodes)
        rows.append(FeasibilityRow(w, target, coeffs))
    return FeasibilitySystem(variables, tuple(rows), eps)


def solve_feasibility(sys: FeasibilitySystem) -> FeasibilityOutcome:
    """Minimize the L∞ violation t; feasible iff t ≤ eps (+1e-9 slack).

    Free variables are split into nonnegative pairs and the program is
    handed to the deterministic two-phase simplex.
    """
    k = len(sys.variables)
    nrows = len(sys.rows)
    nstruct = 2 * k + 1 + 2 * nrows
    a = np.zeros((2 * nrows + 1, nstruct))
    b = np.zeros(2 * nrows + 1)
    c = np.zeros(nstruct)
    c[2 * k] = 1.0
    for i, row in enumerate(sys.rows):
        coeffs = np.array(row.coeffs)
        a[2 * i, :k] = coeffs
        a[2 * i, k:2 * k] = -coeffs
        a[2 * i, 2 * k] = -1.0
        a[2 * i, 2 * k + 1 + 2 * i] = 1.0
        b[2 * i] = row.target
        a[2 * i + 1, :k] = -coeffs
        a[2 * i + 1, k:2 * k] = coeffs
        a[2 * i + 1, 2 * k] = -1.0
        a[2 * i + 1, 2 * k + 2 + 2 * i] = 1.0
        b[2 * i + 1] = -row.target
    a[2 * nrows, :k] = 1.0
    a[2 * nrows, k:2 * k] = -1.0
    b[2 * nrows] = 1.0

    status, z, _ = solve_lp(a, b, c)
    if status != OPTIMAL:
        return FeasibilityOutcome(False, None, math.inf,
                                  diagnostic=f"linear program ended {status}")
    x = z[:k] - z[k:2 * k]
    achieved = 0.0
    for row in sys.rows:
        achieved = max(achieved, abs(row.target - float(np.dot(row.coeffs, x))))
    feasible = achieved <= sys.eps + SOLVE_SLACK
    solution = dict(zip(sys.variables, (float(v) for v in x))) if feasible else None
    return FeasibilityOutcome(feasible, solution, achieved)


@dataclass(frozen=True)
class DeesStep:
    index: int
    v: Word
    decision: str  # "new-state" | "combination"
    achieved_eps: float
    coefficients: dict[Word, float] | None


@dataclass(frozen=True)
class DeesTrace:
    steps: tuple[DeesStep, ...]
    automaton: MultiplicityAutomaton

    def to_jsonl(self) -> str:
        lines = []
        for s in self.steps:
            lines.append(json.dumps({
                "step": s.index,
                "v": list(s.v),
                "decision": s.decision,
                "achieved_eps": s.achieved_eps,
                "coefficients": None if s.coefficients is None
                else {" ".join(u): c for u, c in s.coefficients.items()},
            }))
        return "\n".join(lines) + ("\n" if lines else "")


def dees(sample: Sample, eps_exponent: float = -1.0 / 3.0,
         max_factor_len: int | None = None) -> DeesTrace:
    """Learn a prefixial MA from a sample; returns the trace with the automaton.

    The slack is sample.size ** eps_exponent; the default exponent -1/3
    shrinks it slowly enough that residual estimates settle first.
    """
    if sample.size == 0:
        raise InputError("cannot learn from an empty sample")
    alphabet = sample.alphabet
    trie = build_trie(sample)
    eps = float(sample.size) ** eps_exponent

    states: list[Word] = [EPSILON]
    state_pos = {EPSILON: 0}
    taus: dict[Word, float] = {EPSILON: trie.end_count(EPSILON) / trie.prefix_count(EPSILON)}
    phi: dict[tuple[Word, str, Word], float] = {}
    steps: list[DeesStep] = []

    frontier: list[tuple[tuple, Word]] = []
    seen: set[Word] = set()

    def push_children(u: Word) -> None:
        for x in alphabet.symbols:
            v = u + (x,)
            if v not in seen and trie.prefix_count(v) > 0:
                seen.add(v)
                heapq.heappush(frontier, (alphabet.lenlex_key(v), v))

    push_children(EPSILON)
    while frontier:
        _, v = heapq.heappop(frontier)
        u, x = v[:-1], v[-1]
        ratio = trie.prefix_count(v) / trie.prefix_count(u)
        outcome = solve_feasibility(build_system(trie, states, v, eps,
                                                 max_factor_len=max_factor_len))
        if outcome.feasible:
            for w, alpha in outcome.solution.items():
                phi[(u, x, w)] = alpha * ratio
            decision = "combination"
        else:
            states.append(v)
            state_pos[v] = len(states) - 1
            taus[v] = trie.end_count(v) / trie.prefix_count(v)
            phi[(u, x, v)] = ratio
            push_children(v)
            decision = "new-state"
        steps.append(DeesStep(len(steps), v, decision, outcome.achieved_eps,
                              outcome.solution))

    n = len(states)
    iota = [1.0] + [0.0] * (n - 1)
    tau = [taus[u] for u in states]
    matrices = {x: [[0.0] * n for _ in range(n)] for x in alphabet.symbols}
    for (u, x, w), weight in phi.items():
        matrices[x][state_pos[u]][state_pos[w]] = weight
    automaton = MultiplicityAutomaton(alphabet, iota, tau, matrices,
                                      mode=FLOAT, labels=states)
    return DeesTrace(tuple(steps), automaton)


def structure_agrees(a: MultiplicityAutomaton, b: MultiplicityAutomaton) -> bool:
    """Same labeled states and the same nonzero patterns in ι, τ and every φ."""
    if a.labels is None or b.labels is None:
        raise ContractError("structure comparison needs prefixial-labeled automata")
    if set(a.labels) != set(b.labels) or a.alphabet.symbols != b.alphabet.symbols:
        return False

    def nonzero(m: MultiplicityAutomaton, v) -> bool:
        if m.mode == RATIONAL:
            return v != 0
        return abs(v) > SUPPORT_TOL

    pos_a = {w: i for i, w in enumerate(a.labels)}
    pos_b = {w: i for i, w in enumerate(b.labels)}
    for w in a.labels:
        i, j = pos_a[w], pos_b[w]
        if nonzero(a, a.iota[i]) != nonzero(b, b.iota[j]):
            return False
        if nonzero(a, a.tau[i]) != nonzero(b, b.tau[j]):
            return False
    for x in a.alphabet.symbols:
        ma, mb = a.matrices[x], b.matrices[x]
        for w1 in a.labels:
            for w2 in a.labels:
                if (nonzero(a, ma[pos_a[w1], pos_a[w2]])
                        != nonzero(b, mb[pos_b[w1], pos_b[w2]])):
                    return False
    return True


def _stochastic_gate(a: MultiplicityAutomaton) -> None:
    if is_pa(a).ok:
        return
    cert = absolute_convergence_certificate(a)
    total = float(tail_sum(a, 0)) if cert.certified else math.nan
    if cert.certified and abs(total - 1.0) <= 1e-6:
        return
    raise ContractError("reduced representation needs a stochastic language: "
                        f"certificate={cert.certified}, total mass={total}")


def prefixial_reduced_representation(a: MultiplicityAutomaton,
                                     test_depth: int = 4) -> MultiplicityAutomaton:
    """Canonical prefixial automaton of the language computed by `a`.

    Scans prefixes in length-lex order and keeps those whose residual
    series is linearly independent of the ones already kept; residuals
    are compared on the test words Σ^{≤test_depth}.  Exact arithmetic in
    rational mode, SVD rank testing in float mode.
    """
    _stochastic_gate(a)
    alphabet = a.alphabet
    rational = a.mode == RATIONAL

    def residual_mass(u: Word):
        return prefix_weight(a, u)

    def member(mass) -> bool:
        if rational:
            return mass != 0
        return abs(mass) > RESIDUAL_MEMBER_TOL

    test_words = list(alphabet.words_upto(test_depth))

    def residual_vector(u: Word) -> list:
        base = prefix_weight(a, u)
        return [prefix_weight(a, u + w) / base for w in test_words]

    states: list[Word] = [EPSILON]
    vectors: list[list] = [residual_vector(EPSILON)]
    taus: dict[Word, object] = {EPSILON: word_weight(a, EPSILON) / prefix_weight(a, EPSILON)}
    phi: dict[tuple[Word, str, Word], object] = {}

    frontier: list[tuple[tuple, Word]] = []

    def push_children(u: Word) -> None:
        for x in alphabet.symbols:
            v = u + (x,)
            if member(residual_mass(v)):
                heapq.heappush(frontier, (alphabet.lenlex_key(v), v))

    push_children(EPSILON)
    while frontier:
        _, v = heapq.heappop(frontier)
        u, x = v[:-1], v[-1]
        ratio = prefix_weight(a, v) / prefix_weight(a, u)
        vec = residual_vector(v)
        coeffs = _dependency(vectors, vec, rational)
        if coeffs is None:
            if len(states) >= a.n:
                cond = _stack_condition(vectors + [vec])
                raise ContractError(
                    f"residual space looks rank-deficient: candidate {v} appears "
                    f"independent beyond the {a.n}-dimensional bound "
                    f"(test-matrix condition number {cond:.3e}); "
                    "increase test_depth or check the input automaton")
            states.append(v)
            vectors.append(vec)
            taus[v] = word_weight(a, v) / prefix_weight(a, v)
            phi[(u, x, v)] = ratio
            push_children(v)
        else:
            for w, alpha in zip(states, coeffs):
                if alpha != 0:
                    phi[(u, x, w)] = alpha * ratio
    n = len(states)
    zero = Fraction(0) if rational else 0.0
    one = Fraction(1) if rational else 1.0
    iota = [one] + [zero] * (n - 1)
    tau = [taus[u] for u in states]
    matrices = {x: [[zero] * n for _ in range(n)] for x in alphabet.symbols}
    pos = {w: i for i, w in enumerate(states)}
    for (u, x, w), weight in phi.items():
        matrices[x][pos[u]][pos[w]] = weight
    return MultiplicityAutomaton(alphabet, iota, tau, matrices,
                                 mode=a.mode, labels=states)


def _stack_condition(vectors: list[list]) -> float:
    m = np.array([[float(v) for v in vec] for vec in vectors])
    return float(np.linalg.cond(m))


def _dependency(basis: list[list], vec: list, rational: bool):
    """Coefficients writing vec over basis, or None when independent."""
    if rational:
        if exact_linalg.rank([list(b) for b in basis] + [list(vec)]) > len(basis):
            return None
        coeffs = exact_linalg.span_coefficients([list(b) for b in basis], list(vec))
        if coeffs is None:
            raise FeasibilityError("exact rank test and exact solve disagree")
        return coeffs
    mat = np.array(basis, dtype=float)
    target = np.array(vec, dtype=float)
    stacked = np.vstack([mat, target])
    sv = np.linalg.svd(stacked, compute_uv=False)
    if np.sum(sv > RANK_SV_TOL) > len(basis):
        return None
    coeffs, residuals, rank, _ = np.linalg.lstsq(mat.T, target, rcond=None)
    err = float(np.linalg.norm(mat.T @ coeffs - target))
    if err > SUPPORT_TOL:
        cond = _stack_condition(basis + [vec])
        raise FeasibilityError(
            f"residual dependency solve left error {err:.3e} "
            f"(condition number {cond:.3e}); test words may not separate the residuals")
    return [float(cc) for cc in coeffs]
