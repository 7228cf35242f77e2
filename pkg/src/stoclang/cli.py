"""Command-line front end; every command is a thin composition of library calls.

Exit codes: 0 on success, 2 on input or contract errors, 3 when
normalization refuses an uncertified automaton.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .automata import dumps_ma, load_ma, prefix_weight, save_ma, word_weight
from .errors import CertificationError, StoclangError
from .experiment import METRICS, ExperimentConfig, resolve_target, run_experiment
from .fixtures import fixture, fixture_names
from .learner import dees
from .normalize import NormalizedSeries, pr_eval, pr_sample
from .rationalize import exactify_ma
from .sampling import Sample, draw_sample, load_sample, save_sample
from .words import Word


def _read_words(path: str, alphabet) -> list[Word]:
    """Sample-format word list: one word per line, `#` lines ignored."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    return [alphabet.word(tuple(line.split())) for line in lines
            if not line.startswith("#")]


def _show(v) -> str:
    return str(v) if isinstance(v, Fraction) else repr(float(v))


def _cmd_learn(args) -> int:
    sample = load_sample(args.sample)
    trace = dees(sample, eps_exponent=args.eps_exponent)
    save_ma(trace.automaton, args.out)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace.to_jsonl())
    if not getattr(args, "quiet", False):
        print(f"learned {trace.automaton.n} states from {sample.size} words "
              f"-> {args.out}")
    return 0


def _cmd_sample(args) -> int:
    target = resolve_target(args.target)
    sample = draw_sample(target, args.n, getattr(args, "seed", None) or 0)
    save_sample(sample, args.out)
    if not getattr(args, "quiet", False):
        print(f"wrote {sample.size} words -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    a = load_ma(args.infile)
    for w in _read_words(args.words, a.alphabet):
        v = prefix_weight(a, w) if args.prefix else word_weight(a, w)
        print(_show(v))
    return 0


def _cmd_exactify(args) -> int:
    a = load_ma(args.infile)
    exact, report = exactify_ma(a, args.n)
    save_ma(exact, args.out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"eps": report.eps, "complete": report.complete})
                     + "\n")
            for e in report.entries:
                fh.write(json.dumps({
                    "location": e.location, "value": e.value,
                    "rational": None if e.rational is None else str(e.rational),
                }) + "\n")
    if not getattr(args, "quiet", False):
        bad = len(report.failures)
        state = "complete" if report.complete else f"incomplete ({bad} parameters kept floating)"
        print(f"exactification {state} at eps={report.eps:.6g} -> {args.out}")
    return 0


def _cmd_normalize(args) -> int:
    ns = NormalizedSeries(load_ma(args.infile))
    if args.eval is not None:
        for w in _read_words(args.eval, ns.base.alphabet):
            print(_show(pr_eval(ns, w)))
        return 0
    rng = np.random.default_rng(getattr(args, "seed", None) or 0)
    words = tuple(pr_sample(ns, rng) for _ in range(args.sample))
    save_sample(Sample(ns.base.alphabet, words), args.out)
    if not getattr(args, "quiet", False):
        print(f"wrote {len(words)} words -> {args.out}")
    return 0


def _parse_seeds(text: str) -> tuple[int, ...]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(range(int(lo), int(hi)))
    return tuple(int(t) for t in text.split(","))


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        target=args.target,
        sample_sizes=tuple(int(t) for t in args.sizes.split(",")),
        seeds=_parse_seeds(args.seeds),
        metrics=tuple(args.metrics.split(",")) if args.metrics else METRICS,
        output=args.out,
        ball_radius=args.ball_radius,
        neg_mass_depth=args.neg_mass_depth,
        eps_exponent=args.eps_exponent,
    )
    report = run_experiment(cfg)
    if not getattr(args, "quiet", False):
        print(report.summary())
    return 0


def _cmd_fixture(args) -> int:
    if args.list:
        for name in fixture_names():
            print(name)
        print("a_alpha(ALPHA;L0,L1,L2)")
        return 0
    if args.name is None:
        raise StoclangError("--name is required unless --list is given")
    a = fixture(args.name, mode=getattr(args, "mode", None))
    if args.out:
        save_ma(a, args.out)
        if not getattr(args, "quiet", False):
            print(f"wrote {args.name} -> {args.out}")
    else:
        sys.stdout.write(dumps_ma(a))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("rational", "float"),
                        default=argparse.SUPPRESS,
                        help="weight arithmetic for commands that build automata")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="random seed (default 0)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress progress lines")
    p = argparse.ArgumentParser(prog="stoclang", parents=[common],
                                description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("learn", parents=[common],
                       help="learn an automaton from a sample file")
    q.add_argument("--sample", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--trace", default=None)
    q.add_argument("--eps-exponent", type=float, default=-1.0 / 3.0)
    q.set_defaults(func=_cmd_learn)

    q = sub.add_parser("sample", parents=[common],
                       help="draw words from a fixture or automaton file")
    q.add_argument("--target", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_sample)

    q = sub.add_parser("eval", parents=[common],
                       help="print series values for the words in a file")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--words", required=True)
    q.add_argument("--prefix", action="store_true",
                   help="print suffix masses r(uΣ*) instead of word weights")
    q.set_defaults(func=_cmd_eval)

    q = sub.add_parser("exactify", parents=[common],
                       help="round a learned automaton to rational weights")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--n", type=int, required=True,
                   help="sample size that produced the automaton")
    q.add_argument("--out", required=True)
    q.add_argument("--report", default=None)
    q.set_defaults(func=_cmd_exactify)

    q = sub.add_parser("normalize", parents=[common],
                       help="evaluate or sample the normalized distribution")
    q.add_argument("--in", dest="infile", required=True)
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--eval", default=None, help="words file; prints p_r per word")
    g.add_argument("--sample", type=int, default=None, help="number of words to draw")
    q.add_argument("--out", default=None, help="sample output file")
    q.set_defaults(func=_cmd_normalize)

    q = sub.add_parser("experiment", parents=[common],
                       help="run a seeded sample/learn/measure grid")
    q.add_argument("--target", required=True)
    q.add_argument("--sizes", required=True, help="comma-separated sample sizes")
    q.add_argument("--seeds", required=True, help="comma list or LO:HI range")
    q.add_argument("--metrics", default=None,
                   help=f"comma-separated subset of {','.join(METRICS)}")
    q.add_argument("--out", default=None, help="report base path (.jsonl/.csv)")
    q.add_argument("--ball-radius", type=int, default=6)
    q.add_argument("--neg-mass-depth", type=int, default=8)
    q.add_argument("--eps-exponent", type=float, default=-1.0 / 3.0)
    q.set_defaults(func=_cmd_experiment)

    q = sub.add_parser("fixture", parents=[common],
                       help="materialize a named fixture automaton")
    q.add_argument("--name", default=None)
    q.add_argument("--out", default=None)
    q.add_argument("--list", action="store_true")
    q.set_defaults(func=_cmd_fixture)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "normalize" and args.sample is not None and not args.out:
        print("error: --sample requires --out", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except CertificationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (StoclangError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
