"""Command-line entry point: ``mnat <subcommand> ...``.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a verification
(exchange check or greedy audit) finds a counterexample.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adversarial import make_learner, play, played_common_base, regret_trace, sample_sequence
from .bandit import BanditConfig, NoiseSpec, estimate_regret
from .errors import MnatError
from .greedy import audit_robustness, greedy_with_selector, make_selector
from .instances import BANDIT_SEPARABLE_DOC, load_instance, load_matroid_file, read_json
from .lattice import FeasibleRegion, restrict
from .matroids import common_bases
from .mchecker import check_exchange, check_prop_ab

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2

REGRET_HEADER = ("trial", "round", "point", "true_value", "regret_so_far")
ADVERSARIAL_HEADER = ("trial", "round", "choice", "point", "value", "regret_so_far")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _point(x) -> str:
    return ";".join(str(int(v)) for v in x)


def _num(v) -> str:
    return repr(float(v))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load(args):
    doc = read_json(args.instance) if args.instance else BANDIT_SEPARABLE_DOC
    return doc, load_instance(doc)


def _budget(args, doc) -> int:
    if args.budget is not None:
        return args.budget
    if isinstance(doc, dict) and "K" in doc:
        return int(doc["K"])
    raise UsageError("--budget is required for this instance")


def _box(text: str, n: int):
    try:
        a, b = (int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"--box expects 'a,b' with integers, got {text!r}") from None
    return (a,) * n, (b,) * n


# -- subcommands ----------------------------------------------------------------


def cmd_verify(args) -> int:
    _, f = _load(args)
    if args.box:
        f = restrict(f, *_box(args.box, f.n))
    report = check_exchange(f)
    refined = check_prop_ab(f)
    out = report.to_dict()
    out["prop_ab"] = refined.to_dict()
    print(_dump(out))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_greedy(args) -> int:
    doc, f = _load(args)
    K = _budget(args, doc)
    try:
        selector = make_selector(args.selector)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    traj = greedy_with_selector(f, K, selector)
    out = {"trajectory": traj.to_dict(), "final_value": float(f.value(traj.final))}
    code = EXIT_OK
    if args.audit:
        audit = audit_robustness(f, traj, FeasibleRegion(f, K))
        out["audit"] = audit.to_dict()
        code = EXIT_OK if audit.passed else EXIT_VIOLATION
    print(_dump(out))
    return code


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _write_sidecar(path, summary):
    if path is None:
        print(_dump(summary), file=sys.stderr)
    else:
        Path(path).with_suffix(".json").write_text(_dump(summary) + "\n", encoding="utf-8")


def _regret(args, mode: str) -> int:
    doc, f = _load(args)
    K = _budget(args, doc)
    try:
        noise = NoiseSpec.parse(args.noise)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = BanditConfig(f, K, args.rounds, noise, mode)
    stream, close = _open_out(args.out)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(REGRET_HEADER)

        def emit(res):
            for trial, t, x, v, reg in res.rows:
                writer.writerow((trial, t, _point(x), _num(v), _num(reg)))

        summary = estimate_regret(config, args.trials, args.seed, on_trial=emit)
    finally:
        if close:
            stream.close()
    _write_sidecar(args.out, {
        "version": __version__,
        "subcommand": args.command,
        "instance": args.instance,
        "budget": K,
        "rounds": args.rounds,
        "trials": args.trials,
        "noise": str(noise),
        "seed": args.seed,
        **summary.to_dict(),
    })
    return EXIT_OK


def cmd_simple_regret(args) -> int:
    return _regret(args, "simple")


def cmd_cum_regret(args) -> int:
    return _regret(args, "cumulative")


def cmd_adversarial(args) -> int:
    ms = tuple(load_matroid_file(p) for p in (args.m1, args.m2, args.m3))
    if not ms[0].n == ms[1].n == ms[2].n:
        raise UsageError("matroids must share a ground set")
    regrets, answers = [], []
    stream, close = _open_out(args.out)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(ADVERSARIAL_HEADER)
        for trial in range(args.trials):
            # Same stream split as distinguisher(), so its answer can be read off this run.
            seq_seed, learner_seed = np.random.SeedSequence(args.seed, spawn_key=(trial,)).spawn(2)
            run = play(make_learner(args.learner, args.rounds), sample_sequence(*ms, args.rounds, seq_seed),
                       learner_seed)
            regrets.append(run.regret)
            answers.append(played_common_base(run))
            for t, c, x, v, reg in regret_trace(run):
                writer.writerow((trial, t, c, _point(x), _num(v), _num(reg)))
    finally:
        if close:
            stream.close()
    arr = np.asarray(regrets)
    _write_sidecar(args.out, {
        "version": __version__,
        "subcommand": "adversarial",
        "matroids": [args.m1, args.m2, args.m3],
        "learner": args.learner,
        "rounds": args.rounds,
        "trials": args.trials,
        "seed": args.seed,
        "mean": float(arr.mean()),
        "stderr": float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0,
        "regrets": [float(r) for r in regrets],
        "distinguisher_yes": sum(answers),
        "common_base_exists": bool(common_bases(*ms)),
    })
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mnat", description="M-natural-concave maximization toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="exhaustively check the exchange inequality")
    v.add_argument("--instance", required=True)
    v.add_argument("--box", help="restrict to [a,b]^N, e.g. 0,1")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("greedy", help="run greedy with a step selector")
    g.add_argument("--instance", required=True)
    g.add_argument("--budget", type=int)
    g.add_argument("--selector", default="exact", help="exact | zero | worst | random:<seed>")
    g.add_argument("--audit", action="store_true", help="check the error-sum guarantee")
    g.set_defaults(func=cmd_greedy)

    for name, func, rounds in (("simple-regret", cmd_simple_regret, 10_000),
                               ("cum-regret", cmd_cum_regret, 10_000)):
        r = sub.add_parser(name, help=f"Monte Carlo {name.replace('-', ' ')} experiment")
        r.add_argument("--instance", help="instance JSON (default: built-in N=4, K=2 separable fixture)")
        r.add_argument("--budget", type=int)
        r.add_argument("--rounds", type=_positive, default=rounds)
        r.add_argument("--trials", type=_positive, default=100)
        r.add_argument("--noise", default="gaussian:1")
        r.add_argument("--seed", type=int, default=0)
        r.add_argument("--out", help="CSV path; a .json summary is written next to it")
        r.set_defaults(func=func)

    a = sub.add_parser("adversarial", help="online learning against three matroid distances")
    for flag in ("--m1", "--m2", "--m3"):
        a.add_argument(flag, required=True)
    a.add_argument("--learner", choices=("mwu", "greedy"), default="mwu")
    a.add_argument("--rounds", type=_positive, default=3000)
    a.add_argument("--trials", type=_positive, default=1)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_adversarial)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (MnatError, OSError, ValueError) as exc:
        print(f"mnat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
