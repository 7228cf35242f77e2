"""Seeded end-to-end experiments: sample, learn, measure, report."""
from __future__ import annotations

import json
import math
import os
import statistics
from dataclasses import dataclass

from .automata import MultiplicityAutomaton, equal_ma, load_ma, word_weight
from .errors import CertificationError, InputError
from .fixtures import fixture
from .learner import dees, prefixial_reduced_representation, structure_agrees
from .normalize import NormalizedSeries, neg_total_and_abs_mass
from .rationalize import exactify_ma
from .sampling import draw_sample

METRICS = ("l1_ball", "state_count", "param_error", "neg_mass", "exact_recovery")
BALL_MAX_RADIUS = 10
BALL_MAX_ALPHABET = 3


def l1_on_ball(a: MultiplicityAutomaton, b: MultiplicityAutomaton, k: int) -> float:
    """Σ_{|w|≤k} |r_A(w) − r_B(w)| by enumeration of the ball."""
    if a.alphabet.symbols != b.alphabet.symbols:
        raise InputError("automata must share an alphabet")
    if k > BALL_MAX_RADIUS or len(a.alphabet.symbols) > BALL_MAX_ALPHABET:
        raise InputError(f"ball too large: radius ≤ {BALL_MAX_RADIUS} and "
                         f"alphabet ≤ {BALL_MAX_ALPHABET} symbols")
    total = 0.0
    for w in a.alphabet.words_upto(k):
        total += abs(float(word_weight(a, w)) - float(word_weight(b, w)))
    return total


@dataclass(frozen=True)
class ExperimentConfig:
    target: str
    sample_sizes: tuple[int, ...]
    seeds: tuple[int, ...]
    metrics: tuple[str, ...] = METRICS
    output: str | None = None
    ball_radius: int = 6
    neg_mass_depth: int = 8
    eps_exponent: float = -1.0 / 3.0

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if any(n < 1 for n in self.sample_sizes):
            raise InputError("sample sizes must be positive")
        if any(x >= y for x, y in zip(self.sample_sizes, self.sample_sizes[1:])):
            raise InputError("sample sizes must be strictly increasing")
        if len(set(self.seeds)) != len(self.seeds):
            raise InputError("seeds must be distinct")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise InputError(f"unknown metrics {bad}; choose from {METRICS}")


@dataclass(frozen=True)
class MetricRow:
    n: int
    seed: int
    values: dict


@dataclass(frozen=True)
class MetricReport:
    config: ExperimentConfig
    rows: tuple[MetricRow, ...]

    def values(self, metric: str, n: int) -> list[float]:
        return [r.values[metric] for r in self.rows if r.n == n and metric in r.values]

    def median(self, metric: str, n: int) -> float:
        vals = self.values(metric, n)
        if not vals:
            raise InputError(f"no rows for metric {metric!r} at n={n}")
        return statistics.median(vals)

    def aggregates(self) -> list[dict]:
        """One record per (metric, n) with median and quartiles."""
        out = []
        for metric in self.config.metrics:
            for n in self.config.sample_sizes:
                vals = sorted(self.values(metric, n))
                if not vals:
                    continue
                if len(vals) >= 2:
                    q1, q2, q3 = statistics.quantiles(vals, n=4, method="inclusive")
                else:
                    q1 = q2 = q3 = vals[0]
                out.append({"metric": metric, "n": n, "count": len(vals),
                            "median": q2, "q25": q1, "q75": q3})
        return out

    def to_jsonl(self) -> str:
        lines = [json.dumps({"n": r.n, "seed": r.seed, **r.values}, sort_keys=True)
                 for r in self.rows]
        return "\n".join(lines) + "\n" if lines else ""

    def to_csv(self) -> str:
        lines = ["metric,n,count,median,q25,q75"]
        lines += [f"{a['metric']},{a['n']},{a['count']},{a['median']!r},"
                  f"{a['q25']!r},{a['q75']!r}" for a in self.aggregates()]
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = [f"target={self.config.target} rows={len(self.rows)}"]
        for a in self.aggregates():
            lines.append(f"  {a['metric']:>14s} n={a['n']:<8d} "
                         f"median={a['median']:.6g} "
                         f"(q25={a['q25']:.6g}, q75={a['q75']:.6g})")
        return "\n".join(lines)


def resolve_target(name: str) -> MultiplicityAutomaton:
    """A fixture by name, else an automaton file by path."""
    try:
        return fixture(name)
    except InputError:
        pass
    if os.path.exists(name):
        return load_ma(name)
    raise InputError(f"target {name!r} is neither a known fixture nor a file")


def _param_error(learned: MultiplicityAutomaton, target: MultiplicityAutomaton) -> float:
    if learned.labels is None or target.labels is None:
        return math.inf
    if not structure_agrees(learned, target):
        return math.inf
    pos = {lab: i for i, lab in enumerate(target.labels)}
    worst = 0.0
    for i, lab in enumerate(learned.labels):
        j = pos[lab]
        worst = max(worst, abs(float(learned.iota[i]) - float(target.iota[j])),
                    abs(float(learned.tau[i]) - float(target.tau[j])))
        for x in learned.alphabet.symbols:
            for i2, lab2 in enumerate(learned.labels):
                j2 = pos[lab2]
                worst = max(worst, abs(float(learned.matrices[x][i, i2])
                                       - float(target.matrices[x][j, j2])))
    return worst


def _neg_mass(learned: MultiplicityAutomaton, depth: int) -> float:
    try:
        ns = NormalizedSeries(learned)
    except CertificationError:
        return math.inf
    return abs(neg_total_and_abs_mass(ns, depth)["neg_total"])


def _exact_recovery(learned: MultiplicityAutomaton, n: int,
                    target_prr: MultiplicityAutomaton) -> float:
    exact, report = exactify_ma(learned, n)
    return 1.0 if report.complete and equal_ma(exact, target_prr) else 0.0


def run_experiment(cfg: ExperimentConfig) -> MetricReport:
    """Per (n, seed): draw, learn, measure; deterministic given cfg."""
    target = resolve_target(cfg.target)
    needs_prr = any(m in cfg.metrics for m in ("param_error", "exact_recovery"))
    target_prr = prefixial_reduced_representation(target) if needs_prr else None
    rows = []
    for n in cfg.sample_sizes:
        for seed in cfg.seeds:
            sample = draw_sample(target, n, seed)
            learned = dees(sample, eps_exponent=cfg.eps_exponent).automaton
            vals = {}
            if "l1_ball" in cfg.metrics:
                vals["l1_ball"] = l1_on_ball(learned, target, cfg.ball_radius)
            if "state_count" in cfg.metrics:
                vals["state_count"] = float(learned.n)
            if "param_error" in cfg.metrics:
                vals["param_error"] = _param_error(learned, target_prr)
            if "neg_mass" in cfg.metrics:
                vals["neg_mass"] = _neg_mass(learned, cfg.neg_mass_depth)
            if "exact_recovery" in cfg.metrics:
                vals["exact_recovery"] = _exact_recovery(learned, n, target_prr)
            rows.append(MetricRow(n, seed, vals))
    report = MetricReport(cfg, tuple(sorted(rows, key=lambda r: (r.n, r.seed))))
    if cfg.output is not None:
        try:
            with open(cfg.output + ".jsonl", "w", encoding="utf-8") as fh:
                fh.write(report.to_jsonl())
            with open(cfg.output + ".csv", "w", encoding="utf-8") as fh:
                fh.write(report.to_csv())
        except OSError as e:
            raise InputError(f"cannot write report to {cfg.output!r}: {e}")
    return report
