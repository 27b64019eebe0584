"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import gamefile, games, solvers, verify
from .errors import BudgetExceeded, DimensionError, DomainError, LPError, UnsupportedScenario, ValidationError
from .model import Behaviour, Correlation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

GAME_NAMES = ("chsh", "kv", "hadamard-cor", "tensor", "hat", "tilde")


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--budget",
        type=float,
        default=None,
        help=f"cap on enumeration scans (default: ${solvers.BUDGET_ENV} or {solvers.DEFAULT_BUDGET:.0e})",
    )
    common.add_argument("--threads", type=int, default=1, help="worker threads for see-saw restarts (default 1)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="bellgap", description="Bell functional values over local, bilocal, NS and quantum classes.")
    sub = parser.add_subparsers(dest="command", required=True)

    mk = sub.add_parser("make-game", parents=[common], help="write a game file")
    mk.add_argument("name", choices=GAME_NAMES)
    mk.add_argument("--l", type=int, help="kv: hypercube dimension n = 2^l")
    mk.add_argument("--eta", type=float, help="kv: noise rate (default 1/2 - 1/l)")
    mk.add_argument("--n", type=int, default=4, help="hadamard-cor: number of inputs (default 4)")
    mk.add_argument("--in", dest="inputs", nargs="+", default=[], help="input game file(s) for tensor, hat, tilde")
    mk.add_argument("-o", "--out", help="output path (default: stdout)")

    val = sub.add_parser("value", parents=[common], help="value of a functional over one class")
    val.add_argument("file")
    val.add_argument("--class", dest="value_class", required=True, choices=solvers.CLASSES)
    val.add_argument("--certificate", help="write the value, certificate and witness to this JSON file")
    val.add_argument("--seeds", type=int, default=20, help="see-saw restarts for quantum-lower (default 20)")
    val.add_argument("--seed", type=int, default=0, help="base random seed for quantum-lower (default 0)")
    val.add_argument("--dims", type=int, nargs="+", help="local dimensions for the see-saw (default 2 each)")

    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", choices=(*verify.SUITES, "all"))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("-o", "--out", help="write the report JSON here")
    ver.add_argument("-v", "--verbose", action="store_true", help="print every check, not only failures")

    rep = sub.add_parser("report", parents=[common], help="values, LV ratios and inclusion checks for one functional")
    rep.add_argument("file")
    rep.add_argument("--classes", nargs="+", choices=solvers.CLASSES)
    rep.add_argument("--seeds", type=int, default=20)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("-o", "--out", help="write the report JSON here (default: stdout)")
    return parser


def _budget(args) -> int | None:
    return None if args.budget is None else int(args.budget)


def _load(path: str):
    try:
        return gamefile.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def make_game(args):
    name = args.name
    if name == "chsh":
        return games.chsh_game()
    if name == "kv":
        if args.l is None:
            raise UsageError("kv needs --l")
        return games.khot_vishnoi(games.KVParams(args.l, args.eta))
    if name == "hadamard-cor":
        return games.hadamard_correlation_functional(args.n)
    loaded = [_load(p) for p in args.inputs]
    if name == "tensor":
        if len(loaded) not in (1, 2):
            raise UsageError("tensor needs --in with one or two game files")
        return games.tensor_product(loaded[0], loaded[-1])
    if len(loaded) != 1:
        raise UsageError(f"{name} needs --in with exactly one game file")
    return games.hat_construction(loaded[0]) if name == "hat" else games.tilde_construction(loaded[0])


def _witness_entries(w) -> list[dict]:
    if isinstance(w, Correlation):
        return [{"x": [int(i) + 1 for i in idx], "v": float(w.table[idx])} for idx in zip(*np.nonzero(w.table))]
    if isinstance(w, Behaviour):
        k = w.scenario.parties
        return [
            {"x": [int(i) + 1 for i in idx[:k]], "a": [int(i) + 1 for i in idx[k:]], "p": float(w.table[idx])}
            for idx in zip(*np.nonzero(w.table))
        ]
    return []


def cmd_make_game(args) -> int:
    _write(gamefile.dumps(make_game(args)), args.out)
    return EXIT_OK


def cmd_value(args) -> int:
    m = _load(args.file)
    options = {}
    if args.value_class == "quantum-lower":
        options = {"seeds": args.seeds, "seed": args.seed, "threads": args.threads, "dims": args.dims}
    report = solvers.compute_value(m, args.value_class, budget=_budget(args), **options)
    bound = "" if report.exact else " (lower bound)"
    print(f"{report.value_class} value of {report.functional_id}: {report.value!r}{bound} [{report.method}]")
    if args.certificate:
        doc = report.to_dict()
        doc["witness"] = _witness_entries(report.witness)
        Path(args.certificate).write_text(json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, seed=args.seed, threads=args.threads, budget=_budget(args))
    parts = report.parts or [report]
    for part in parts:
        shown = [c for c in part.checks if args.verbose or not c.passed]
        failed = sum(not c.passed for c in part.checks)
        status = "PASS" if part.passed else "FAIL"
        print(f"[{status}] {part.suite}: {len(part.checks) - failed}/{len(part.checks)} checks in {part.wall_time:.2f}s")
        for c in shown:
            print("    " + c.line())
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_report(args) -> int:
    m = _load(args.file)
    doc = verify.functional_report(
        m, args.classes, budget=_budget(args), seeds=args.seeds, seed=args.seed, threads=args.threads
    )
    _write(json.dumps(doc, indent=1), args.out)
    return EXIT_OK if doc["pass"] else EXIT_FAIL


COMMANDS = {"make-game": cmd_make_game, "value": cmd_value, "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if args.budget is not None and args.budget < 0:
        parser.error("--budget must be non-negative")
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, DomainError, DimensionError, ValidationError, UnsupportedScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LPError as exc:
        print(f"LP failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
