"""Named target automata and randomized generators for experiments."""
from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .automata import (FLOAT, RATIONAL, MultiplicityAutomaton,
                       absolute_convergence_certificate, build_a_alpha,
                       tail_sum)
from .errors import InputError
from .words import Alphabet

_UNARY = Alphabet(("a",))

_A_ALPHA = re.compile(r"a_alpha\(([^;]+);([^,]+),([^,]+),([^)]+)\)\Z")
_PI_FORM = re.compile(r"(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?\Z")


def fixture_names() -> tuple[str, ...]:
    """Fixed fixture names; the a_alpha(ALPHA;L0,L1,L2) family is also accepted."""
    return ("dirac", "half_loop", "two_state_pda")


def _angle(text: str) -> float:
    text = text.strip().lower()
    m = _PI_FORM.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        div = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / div
    try:
        return float(text)
    except ValueError:
        raise InputError(f"cannot parse angle {text!r}; use a number, pi, or pi/K")


def fixture(name: str, mode: str | None = None) -> MultiplicityAutomaton:
    """A named target automaton.

    dirac emits ε with probability 1; half_loop stops or repeats `a`
    with probability 1/2 each; two_state_pda stops with probability
    1/5, moves to a second state on `a` with probability 4/5, and there
    stops with probability 9/10 or loops with probability 1/10. All
    three default to rational weights. a_alpha(ALPHA;L0,L1,L2) is the
    damped-rotation family, float only.
    """
    name = name.strip()
    m = _A_ALPHA.match(name)
    if m:
        if mode == RATIONAL:
            raise InputError("a_alpha has trigonometric weights; float mode only")
        lams = [float(g.strip()) for g in m.groups()[1:]]
        return build_a_alpha(_angle(m.group(1)), *lams)
    if name == "dirac":
        out = MultiplicityAutomaton(_UNARY, [1], [1], {"a": [[0]]}, mode=RATIONAL)
    elif name == "half_loop":
        h = Fraction(1, 2)
        out = MultiplicityAutomaton(_UNARY, [1], [h], {"a": [[h]]}, mode=RATIONAL)
    elif name == "two_state_pda":
        out = MultiplicityAutomaton(
            _UNARY, [1, 0], [Fraction(1, 5), Fraction(9, 10)],
            {"a": [[0, Fraction(4, 5)], [0, Fraction(1, 10)]]}, mode=RATIONAL)
    else:
        raise InputError(f"unknown fixture {name!r}; known: "
                         f"{', '.join(fixture_names())}, a_alpha(ALPHA;L0,L1,L2)")
    if mode == FLOAT:
        return out.to_float()
    return out


def unit_mass(a: MultiplicityAutomaton) -> MultiplicityAutomaton:
    """Rescale ι so the series sums to exactly 1 (requires ρ(M) < 1)."""
    total = tail_sum(a, 0)
    if total == 0:
        raise InputError("series has zero total mass; cannot rescale")
    return MultiplicityAutomaton(
        a.alphabet, [v / total for v in a.iota], list(a.tau),
        {x: a.matrices[x] for x in a.alphabet.symbols},
        mode=a.mode, labels=a.labels)


def random_pa(rng: np.random.Generator, n_states: int, alphabet,
              min_stop: float = 0.2) -> MultiplicityAutomaton:
    """Dense random PA; every state keeps at least min_stop stopping mass."""
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    if n_states < 1:
        raise InputError("need at least one state")
    if not 0 < min_stop < 1:
        raise InputError("min_stop must be in (0, 1)")
    iota = rng.random(n_states) + 0.05
    iota /= iota.sum()
    tau = min_stop + (1.0 - min_stop) * rng.random(n_states)
    k = len(alphabet.symbols)
    mats = {x: np.zeros((n_states, n_states)) for x in alphabet.symbols}
    for q in range(n_states):
        w = rng.random(k * n_states) + 0.01
        w *= (1.0 - tau[q]) / w.sum()
        for xi, x in enumerate(alphabet.symbols):
            mats[x][q] = w[xi * n_states:(xi + 1) * n_states]
    return MultiplicityAutomaton(alphabet, iota, tau, mats, mode=FLOAT)


def perturb_ma(rng: np.random.Generator, a: MultiplicityAutomaton,
               scale: float = 0.05) -> MultiplicityAutomaton:
    """Additive uniform noise of size ≤ scale on τ and every φ entry."""
    base = a.to_float()
    tau = base.tau + rng.uniform(-scale, scale, base.n)
    mats = {x: base.matrices[x] + rng.uniform(-scale, scale, (base.n, base.n))
            for x in base.alphabet.symbols}
    return MultiplicityAutomaton(base.alphabet, base.iota, tau, mats,
                                 mode=FLOAT, labels=base.labels)


def random_certified_ma(rng: np.random.Generator, n_states: int, alphabet,
                        scale: float = 0.05,
                        min_stop: float = 0.2) -> MultiplicityAutomaton | None:
    """A perturbed random PA rescaled to unit mass, or None when the
    perturbation loses the absolute-convergence certificate."""
    probe = perturb_ma(rng, random_pa(rng, n_states, alphabet, min_stop), scale)
    if not absolute_convergence_certificate(probe).certified:
        return None
    total = float(tail_sum(probe, 0))
    if abs(total) < 1e-3:
        return None
    return unit_mass(probe)
