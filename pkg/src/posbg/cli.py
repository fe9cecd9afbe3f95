"""Command-line interface.

Subcommands: ``run-episode`` (one episode, optional trace), ``run-sweep``
(the grid harness, CSV/JSON output), ``run-zk`` (one zero-knowledge learning
session), and ``hba-eval`` (evaluate a JSON-defined game).  A TOML config
file can pre-set any flag of its subcommand; explicit flags win.  The
``POSBG_SEED`` environment variable supplies a default master seed when
``--seed`` is absent.

Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from posbg.agents import (
    FullKnowledgeAttacker,
    LifespanVariant,
    PartialKnowledgeAttacker,
    ThresholdDefender,
    compute_lifespan,
    compute_threshold,
    run_zk_session,
)
from posbg.engine import GameParams, TieBreak, TraceRow, run_episode
from posbg.hba import action_values, hba_action, load_game, History
from posbg.rng import RandomSource, derive_seed
from posbg.sweep import AttackerModelKind, GridSpec, ZkAggregate, run_sweep

_TIE_BREAKS = {t.value: t for t in TieBreak}
_VARIANTS = {"exact": LifespanVariant.EXACT_THRESHOLD, "closed-form": LifespanVariant.CLOSED_FORM}
_ZK_AGGREGATES = {z.value: z for z in ZkAggregate}
_MODELS = {m.value: m for m in AttackerModelKind}


class UsageError(Exception):
    """Validation problem that should exit with status 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posbg",
        description="Attacker/defender alert-threshold game simulator and sweep harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    episode = sub.add_parser("run-episode", help="play one episode and print the outcome")
    episode.add_argument("--config", help="TOML file pre-setting any flag of this command")
    episode.add_argument("--model", default="fk", choices=["fk", "pk"])
    episode.add_argument("--p", type=float, default=None, help="true-positive alert rate")
    episode.add_argument("--q", type=float, default=None, help="ambient alert rate")
    episode.add_argument("--lifespan-variant", default=None, choices=sorted(_VARIANTS))
    episode.add_argument("--tie-break", default=None, choices=sorted(_TIE_BREAKS))
    episode.add_argument("--seed", type=int, default=None)
    episode.add_argument("--trace", action="store_true", default=None,
                         help="print one line per step: t,a_att,a_def,alert,s_A,s_I")
    episode.add_argument("--out", default=None, help="write the trace to this file")

    swp = sub.add_parser("run-sweep", help="run the (p, q) grid sweep and write a report")
    swp.add_argument("--config", help="TOML file pre-setting any flag of this command")
    swp.add_argument("--grid-min", type=float, default=None)
    swp.add_argument("--grid-max", type=float, default=None)
    swp.add_argument("--grid-points", type=int, default=None)
    swp.add_argument("--trials", type=int, default=None)
    swp.add_argument("--models", default=None, help="comma list from fk,pk,zk")
    swp.add_argument("--attempts", type=int, default=None)
    swp.add_argument("--lifespan-variant", default=None, choices=sorted(_VARIANTS))
    swp.add_argument("--tie-break", default=None, choices=sorted(_TIE_BREAKS))
    swp.add_argument("--zk-aggregate", default=None, choices=sorted(_ZK_AGGREGATES))
    swp.add_argument("--seed", type=int, default=None)
    swp.add_argument("--jobs", type=int, default=None, help="worker threads (never affects results)")
    swp.add_argument("--out", default=None, help="output path (default: stdout)")
    swp.add_argument("--format", default=None, choices=["csv", "json"])

    zk = sub.add_parser("run-zk", help="run one zero-knowledge learning session")
    zk.add_argument("--config", help="TOML file pre-setting any flag of this command")
    zk.add_argument("--p", type=float, default=None)
    zk.add_argument("--q", type=float, default=None)
    zk.add_argument("--attempts", type=int, default=None)
    zk.add_argument("--tie-break", default=None, choices=sorted(_TIE_BREAKS))
    zk.add_argument("--seed", type=int, default=None)

    hba = sub.add_parser("hba-eval", help="evaluate a JSON game definition")
    hba.add_argument("--config", help="TOML file pre-setting any flag of this command")
    hba.add_argument("--game", default=None, help="path to the JSON game definition")
    hba.add_argument("--player", default=None, help="player index or label (default: 0)")
    return parser


_DEFAULTS = {
    "run-episode": {
        "model": "fk", "p": None, "q": None, "lifespan_variant": "exact",
        "tie_break": "attacker", "seed": None, "trace": False, "out": None,
    },
    "run-sweep": {
        "grid_min": 0.01, "grid_max": 0.99, "grid_points": 20, "trials": 10000,
        "models": "fk,pk,zk", "attempts": 10, "lifespan_variant": "exact",
        "tie_break": "attacker", "zk_aggregate": "mean", "seed": None,
        "jobs": 1, "out": None, "format": "csv",
    },
    "run-zk": {"p": None, "q": None, "attempts": 10, "tie_break": "attacker", "seed": None},
    "hba-eval": {"game": None, "player": "0"},
}


def _load_config(path: str, command: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid TOML: {exc}") from exc
    allowed = set(_DEFAULTS[command])
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(
            f"config file {path!r} has unknown keys for {command}: {sorted(unknown)}"
        )
    return data


def _merge(args: argparse.Namespace, command: str) -> dict:
    """Resolve each option: explicit flag, else config file, else default."""
    merged = dict(_DEFAULTS[command])
    if getattr(args, "config", None):
        merged.update(_load_config(args.config, command))
    for key in _DEFAULTS[command]:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("POSBG_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"POSBG_SEED must be an integer, got {env!r}") from exc
    return 0


def _require_probability(name: str, value) -> float:
    if value is None:
        raise UsageError(f"--{name} is required")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"--{name} must be in [0, 1], got {value}")
    return value


def _cmd_run_episode(opts: dict) -> int:
    p = _require_probability("p", opts["p"])
    q = _require_probability("q", opts["q"])
    tie = _TIE_BREAKS[opts["tie_break"]]
    seed = _resolve_seed(opts["seed"])
    params = GameParams(p=p, q=q, tie_break=tie)
    threshold = compute_threshold(p, q)
    defender = ThresholdDefender(threshold)
    if opts["model"] == "fk":
        attacker = FullKnowledgeAttacker(threshold)
        lifespan = None
    else:
        lifespan = compute_lifespan(p, q, _VARIANTS[opts["lifespan_variant"]])
        attacker = PartialKnowledgeAttacker(lifespan)
    trace: list[TraceRow] | None = [] if (opts["trace"] or opts["out"]) else None
    result = run_episode(attacker, defender, params, RandomSource(seed), trace=trace)
    if trace is not None:
        lines = "\n".join(row.format() for row in trace) + "\n"
        if opts["out"]:
            with open(opts["out"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(lines)
        else:
            sys.stdout.write(lines)
    outcome = "win" if result.attacker_won else "loss"
    lifespan_part = "" if lifespan is None else f" lifespan={lifespan}"
    print(
        f"{outcome}: score={result.score} duration={result.duration} "
        f"ended_by={result.ended_by.value} threshold={threshold}{lifespan_part} seed={seed}"
    )
    return 0


def _cmd_run_sweep(opts: dict) -> int:
    grid = GridSpec(
        min=_require_probability("grid-min", opts["grid_min"]),
        max=_require_probability("grid-max", opts["grid_max"]),
        points=int(opts["grid_points"]),
    )
    model_names = [m.strip() for m in str(opts["models"]).split(",") if m.strip()]
    unknown = [m for m in model_names if m not in _MODELS]
    if unknown:
        raise UsageError(f"unknown models {unknown}; choose from fk,pk,zk")
    if not model_names:
        raise UsageError("--models must name at least one of fk,pk,zk")
    report = run_sweep(
        grid=grid,
        models=[_MODELS[m] for m in model_names],
        trials=int(opts["trials"]),
        master_seed=_resolve_seed(opts["seed"]),
        lifespan_variant=_VARIANTS[opts["lifespan_variant"]],
        attempts=int(opts["attempts"]),
        tie_break=_TIE_BREAKS[opts["tie_break"]],
        zk_aggregate=_ZK_AGGREGATES[opts["zk_aggregate"]],
        jobs=int(opts["jobs"]),
    )
    if opts["format"] == "json":
        if opts["out"]:
            report.write_json(opts["out"])
        else:
            import json as _json

            _json.dump(report.to_json_dict(), sys.stdout, indent=2)
            sys.stdout.write("\n")
    else:
        if opts["out"]:
            report.write_csv(opts["out"])
        else:
            sys.stdout.write(report.to_csv())
    return 0


def _cmd_run_zk(opts: dict) -> int:
    p = _require_probability("p", opts["p"])
    q = _require_probability("q", opts["q"])
    seed = _resolve_seed(opts["seed"])
    params = GameParams(p=p, q=q, tie_break=_TIE_BREAKS[opts["tie_break"]])
    defender = ThresholdDefender.for_rates(p, q)
    result = run_zk_session(params, defender, int(opts["attempts"]), RandomSource(seed))
    print(
        f"attempts={result.attempts} max_score={result.max_score} "
        f"mean_score={result.mean_score:.10g} win_rate={result.win_rate:.10g} seed={seed}"
    )
    return 0


def _cmd_hba_eval(opts: dict) -> int:
    if not opts["game"]:
        raise UsageError("--game is required")
    try:
        game = load_game(opts["game"])
    except OSError as exc:
        raise UsageError(f"cannot read game file: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise UsageError(f"invalid game definition: {exc}") from exc
    player_spec = str(opts["player"])
    if game.player_labels and player_spec in game.player_labels:
        player = game.player_labels.index(player_spec)
    else:
        try:
            player = int(player_spec)
        except ValueError as exc:
            raise UsageError(f"unknown player {player_spec!r}") from exc
    if not 0 <= player < game.n_players:
        raise UsageError(f"player index {player} out of range")
    state = game.initial_state
    history = History(states=(state,))
    values = action_values(game, player, state, history)
    chosen = hba_action(game, player, state, history)
    labels = (
        game.action_labels[player]
        if game.action_labels
        else tuple(str(a) for a in range(game.n_actions[player]))
    )
    state_label = game.state_labels[state] if game.state_labels else str(state)
    print(f"player={player} state={state_label}")
    for a, value in enumerate(values):
        marker = " <- chosen" if a == chosen else ""
        print(f"  action {labels[a]}: expected_payoff={value:.10g}{marker}")
    print(f"chosen_action={labels[chosen]}")
    return 0


_COMMANDS = {
    "run-episode": _cmd_run_episode,
    "run-sweep": _cmd_run_sweep,
    "run-zk": _cmd_run_zk,
    "hba-eval": _cmd_hba_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge(args, args.command)
        return _COMMANDS[args.command](opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"failed: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:  # console script hook
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
