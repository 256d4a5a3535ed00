"""Command-line front end.

Subcommands cover the full pipeline: validate a game file, certify a
profile, compute the robustness bound ladder for a game pair, solve a
two-player game, size a sampling budget, and run generative-model
experiments.

Conventions: machine-readable output (CSV, JSON, integers) goes to stdout,
diagnostics to stderr. Exit codes: 0 success, 1 domain or validation
failure, 2 I/O or parse failure. Every seeded command is deterministic
given its flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, experiments, games, metrics
from .equilibrium import certify_profile
from .solver import solve_mpe

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

_IPM_FLAGS = {"tv": metrics.TOTAL_VARIATION, "w1": metrics.WASSERSTEIN}


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _load_game(path: str) -> games.MarkovGame:
    text = _read_text(path)
    try:
        return games.parse_game(text)
    except games.GameValidationError as exc:
        raise _Failure(
            EXIT_DOMAIN, f"{path}: " + "; ".join(exc.violations)
        ) from exc
    except games.GameFormatError as exc:
        raise _Failure(EXIT_IO, f"{path}: {exc}") from exc


def _load_profile(path: str) -> games.StrategyProfile:
    text = _read_text(path)
    try:
        return games.parse_profile(text)
    except games.GameFormatError as exc:
        raise _Failure(EXIT_IO, f"{path}: {exc}") from exc


def _cmd_validate(args) -> int:
    text = _read_text(args.game)
    try:
        game = games.parse_game(text, validate=False)
    except games.GameFormatError as exc:
        raise _Failure(EXIT_IO, f"{args.game}: {exc}") from exc
    violations = games.validate_game(game)
    for violation in violations:
        print(violation)
    return EXIT_DOMAIN if violations else EXIT_OK


def _cmd_certify(args) -> int:
    game = _load_game(args.game)
    profile = _load_profile(args.profile)
    try:
        games.check_profile(game, profile)
    except ValueError as exc:
        raise _Failure(EXIT_DOMAIN, str(exc)) from exc
    if args.tol <= 0:
        raise _Failure(EXIT_DOMAIN, "--tol must be positive")
    certificate = certify_profile(game, profile, args.tol)
    print("player,alpha")
    for player, alpha in enumerate(certificate.alpha_clamped(), start=1):
        print(f"{player},{_fmt(alpha)}")
    return EXIT_OK


def _cmd_bound(args) -> int:
    game = _load_game(args.game)
    approx = _load_game(args.approx_game)
    ipm_kind = _IPM_FLAGS[args.ipm]
    values = None
    profile = None
    if args.values:
        doc = _read_text(args.values)
        try:
            parsed = json.loads(doc)
            values = [np.asarray(v, dtype=np.float64)
                      for v in parsed["values"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise _Failure(
                EXIT_IO,
                f"{args.values}: expected JSON object with a 'values' array "
                f"of per-player vectors ({exc})",
            ) from exc
    else:
        if approx.num_players != 2:
            raise _Failure(
                EXIT_DOMAIN,
                "no --values given and the approximate game is not "
                "two-player; pass --values to supply equilibrium values",
            )
        result = solve_mpe(approx, tol=args.tol, seed=args.seed)
        if not result.converged:
            print(
                "warning: solver did not certify an equilibrium of the "
                "approximate game; bounds use its best iterate",
                file=sys.stderr,
            )
        profile = result.profile
    try:
        report = bounds.robustness_report(
            game, approx, ipm_kind, profile=profile, values=values
        )
    except ValueError as exc:
        raise _Failure(EXIT_DOMAIN, str(exc)) from exc
    print("player,epsilon,delta,delta_term,alpha_instance,alpha_ipm,"
          "alpha_corollary")
    for player in range(len(report.alpha_instance)):
        corollary = ("" if report.alpha_corollary is None
                     else _fmt(report.alpha_corollary[player]))
        print(",".join([
            str(player + 1),
            _fmt(report.epsilon),
            _fmt(report.delta),
            _fmt(report.per_player_delta_term[player]),
            _fmt(report.alpha_instance[player]),
            _fmt(report.alpha_ipm[player]),
            corollary,
        ]))
    if report.alpha_corollary is None:
        print("note: Lipschitz worst-case bound inapplicable "
              "(gamma * L_P >= 1)", file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args) -> int:
    game = _load_game(args.game)
    if game.num_players != 2:
        raise _Failure(EXIT_DOMAIN, "two-player solver only")
    if args.tol <= 0 or args.max_iter < 1:
        raise _Failure(EXIT_DOMAIN, "--tol must be positive and --max-iter >= 1")
    result = solve_mpe(game, tol=args.tol, max_iter=args.max_iter,
                       seed=args.seed)
    profile_doc = games.serialize_profile(result.profile)
    certificate_lines = ["player,alpha"]
    for player, alpha in enumerate(result.certificate.alpha_clamped(),
                                   start=1):
        certificate_lines.append(f"{player},{_fmt(alpha)}")
    if args.out:
        try:
            Path(args.out).write_text(profile_doc, encoding="utf-8")
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
        print("\n".join(certificate_lines))
    else:
        sys.stdout.write(profile_doc)
        print("\n".join(certificate_lines), file=sys.stderr)
    print(f"converged={str(result.converged).lower()} "
          f"iterations={result.iterations}", file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_DOMAIN


def _cmd_sample_size(args) -> int:
    players = args.players if args.players is not None else len(args.actions)
    if players != len(args.actions):
        raise _Failure(
            EXIT_DOMAIN,
            f"--players is {players} but --actions lists "
            f"{len(args.actions)} counts",
        )
    try:
        n = bounds.sample_size_game(args.alpha, args.p, args.span,
                                    args.states, list(args.actions),
                                    players, args.gamma)
    except ValueError as exc:
        raise _Failure(EXIT_DOMAIN, str(exc)) from exc
    print(n)
    return EXIT_OK


def _summary_path(records_path: str) -> Path:
    path = Path(records_path)
    return path.with_name(path.stem + "_summary" + (path.suffix or ".csv"))


def _cmd_experiment(args) -> int:
    game = _load_game(args.game)
    if game.num_players != 2:
        raise _Failure(EXIT_DOMAIN, "experiments need a two-player game")
    if args.n < 1 or args.trials < 0:
        raise _Failure(EXIT_DOMAIN, "--n must be >= 1 and --trials >= 0")
    records = experiments.run_experiments(
        game, args.n, args.trials, args.seed, solver_tol=args.solver_tol
    )
    records_doc = experiments.records_csv(records, game.num_players)
    summary_doc = experiments.summary_csv(experiments.summarize(records))
    summary_path = _summary_path(args.out)
    try:
        Path(args.out).write_text(records_doc, encoding="utf-8")
        summary_path.write_text(summary_doc, encoding="utf-8")
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot write output: {exc}") from exc
    print(f"wrote {args.out} and {summary_path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpekit",
        description="Certify, bound, solve, and sample finite Markov games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a game file against the model "
                                        "invariants")
    p.add_argument("game")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("certify", help="per-player equilibrium gaps of a "
                                       "profile")
    p.add_argument("game")
    p.add_argument("profile")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("bound", help="robustness bound ladder for a game pair")
    p.add_argument("game")
    p.add_argument("approx_game")
    p.add_argument("--ipm", choices=sorted(_IPM_FLAGS), required=True)
    p.add_argument("--values", help="JSON file with per-player value vectors "
                                    "for the approximate game's equilibrium")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="solver tolerance when --values is not given")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("solve", help="solve a two-player game and certify "
                                     "the result")
    p.add_argument("game")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the profile here (default: stdout)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sample-size", help="per-pair generative samples "
                                           "sufficient for a target gap")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--span", type=float, required=True,
                   help="span of the reward function")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--actions", type=int, nargs="+", required=True,
                   help="action counts, one per player")
    p.add_argument("--players", type=int)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=_cmd_sample_size)

    p = sub.add_parser("experiment", help="plug-in equilibrium experiments "
                                          "with a generative model")
    p.add_argument("game")
    p.add_argument("--n", type=int, required=True,
                   help="samples per state-action pair")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="records CSV path; the "
                   "summary lands next to it with a _summary suffix")
    p.add_argument("--solver-tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Failure as failure:
        print(f"error: {failure.message}", file=sys.stderr)
        return failure.code
    except ValueError as exc:
        # domain errors raised by the library surface as exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
