"""The ``gt`` command line.

Exit codes: 0 success, 1 semantic/validation failure, 2 resource refusal or
infeasibility, 3 parse error. Machine-readable JSON goes to stdout (or the
-o file) and is byte-identical across runs on identical inputs; run
summaries, timings and decimal approximations go to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .convert import build_cbr_table, counterfactual_best_response, efce_to_bce
from .equilibrium import compute_bce, compute_efce, optimal_bce, optimal_efce
from .errors import (GameParseError, InternalCheckError, ProfileError,
                     ProfileParseError, ResourceGuardError)
from .game import Game, Sequence, parse_game
from .metrics import NOTIONS, expected_utility, gap, outcome_distribution
from .oracles import brute_force_gap
from .rational import decimal_repr, format_rational, parse_rational
from .strategy import parse_profile, serialize_profile

EXIT_OK, EXIT_SEMANTIC, EXIT_RESOURCE, EXIT_PARSE = 0, 1, 2, 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GameParseError, ProfileParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ProfileError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC
    except ResourceGuardError as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except InternalCheckError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_RESOURCE


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gt {__version__}")
    sub = p.add_subparsers(required=True, metavar="command")

    def cmd(name, fn, help_, game=True, profile=False, out=False):
        c = sub.add_parser(name, help=help_)
        if game:
            c.add_argument("game", help="path to a game JSON document")
        if profile:
            c.add_argument("profile", help="path to a profile JSON document")
        if out:
            c.add_argument("-o", "--output", help="write the resulting profile here")
        c.set_defaults(func=fn)
        return c

    cmd("validate", cmd_validate, "check a game document and report violations")
    cmd("info", cmd_info, "summarize players, infosets and strategy counts")
    cmd("outcome", cmd_outcome, "terminal distribution induced by a profile",
        profile=True)
    c = cmd("gap", cmd_gap, "exact worst-case deviation gain of a profile",
            profile=True)
    c.add_argument("--notion", choices=NOTIONS, required=True)
    c.add_argument("--oracle", action="store_true",
                   help="use the brute-force table oracle instead of the DP")
    c.add_argument("--table-cap", type=int, default=70_000,
                   help="oracle refusal threshold on |X|^|X|")
    c = cmd("convert", cmd_convert, "rewrite off-path recommendations to "
            "counterfactual best responses", profile=True, out=True)
    cmd("decompose", cmd_decompose, "behavior profile to small-support mixture",
        profile=True, out=True)
    c = cmd("cbr", cmd_cbr, "counterfactual best response at a sequence",
            profile=True)
    c.add_argument("--player", required=True, help="player name or 0-based index")
    c.add_argument("--sequence", required=True,
                   help='"INFOSET:ACTION", or "empty" for the unconditional response')
    c = cmd("solve", cmd_solve, "compute an (optimal) equilibrium", out=True)
    c.add_argument("--notion", choices=("efce", "bce"), required=True)
    c.add_argument("--objective", help="path to {\"c\": {terminal: \"p/q\"}}")
    c.add_argument("--epsilon", default="0",
                   help="slack for --notion efce trigger rows (rational)")
    c = sub.add_parser("paper-check",
                       help="run the bundled end-to-end verification suite")
    c.set_defaults(func=cmd_paper_check)
    return p


def _load_game(path: str) -> Game:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def _load_profile(game: Game, path: str, behavior_mode="expand"):
    with open(path, encoding="utf-8") as fh:
        return parse_profile(game, fh.read(), behavior_mode)


def _emit(doc, args=None):
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    out = getattr(args, "output", None) if args else None
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _player_arg(game: Game, value: str) -> int:
    return game.player_index(int(value)) if value.isdigit() else game.player_index(value)


def _sequence_arg(game: Game, player: int, text: str) -> Sequence:
    if text in ("empty", "∅"):
        return Sequence.empty(player)
    if ":" not in text:
        raise ValueError(f'sequence must be "INFOSET:ACTION" or "empty", got {text!r}')
    infoset_id, action = text.split(":", 1)
    return game.sequence(player, infoset_id, action)


def cmd_validate(args) -> int:
    game = _load_game(args.game)
    report = game.validate()
    _emit(report.to_json_dict())
    return EXIT_OK if report.ok else EXIT_SEMANTIC


def cmd_info(args) -> int:
    game = _load_game(args.game)
    per_player = {}
    for i, name in enumerate(game.players):
        pure = 1
        for iset in game.infosets[i]:
            pure *= len(iset.actions)
        per_player[name] = {
            "infosets": len(game.infosets[i]),
            "sequences": len(game.sequences(i)) if game.validate().ok else None,
            "pure_strategies": pure,
        }
    _emit({"players": list(game.players), "nodes": game.num_nodes,
           "chance_nodes": game.num_chance_nodes,
           "terminals": len(game.terminals), "valid": game.validate().ok,
           "per_player": per_player})
    return EXIT_OK


def cmd_outcome(args) -> int:
    game = _load_game(args.game)
    pi = _load_profile(game, args.profile)
    _emit(outcome_distribution(game, pi).to_json_dict())
    return EXIT_OK


def cmd_gap(args) -> int:
    game = _load_game(args.game)
    pi = _load_profile(game, args.profile)
    if args.oracle:
        report = brute_force_gap(game, pi, args.notion, table_cap=args.table_cap)
    else:
        report = gap(game, pi, args.notion)
    _emit(report.to_json_dict(game))
    print(f"gap = {format_rational(report.overall)} "
          f"~ {decimal_repr(report.overall)}", file=sys.stderr)
    return EXIT_OK


def cmd_convert(args) -> int:
    game = _load_game(args.game)
    pi = _load_profile(game, args.profile, behavior_mode="decompose")
    gap_in = gap(game, pi, "efce").overall
    out = efce_to_bce(game, pi)
    gap_out = gap(game, out, "bce").overall
    same = outcome_distribution(game, pi).probs == outcome_distribution(game, out).probs
    _emit(json.loads(serialize_profile(game, out)), args)
    print(f"efce gap in:  {format_rational(gap_in)}\n"
          f"bce gap out:  {format_rational(gap_out)}\n"
          f"outcome-equivalent: {same}", file=sys.stderr)
    return EXIT_OK


def cmd_decompose(args) -> int:
    game = _load_game(args.game)
    pi = _load_profile(game, args.profile, behavior_mode="decompose")
    _emit(json.loads(serialize_profile(game, pi)), args)
    return EXIT_OK


def cmd_cbr(args) -> int:
    game = _load_game(args.game)
    pi = _load_profile(game, args.profile)
    player = _player_arg(game, args.player)
    seq = _sequence_arg(game, player, args.sequence)
    strategy, value = counterfactual_best_response(game, pi, player, seq)
    table = build_cbr_table(game, pi, player)
    mass = table.entries[seq].reach.event_mass
    _emit({"player": game.players[player], "sequence": seq.label(),
           "strategy": strategy.assignment(game),
           "value": format_rational(value),
           "event_mass": format_rational(mass)})
    print(f"value = {format_rational(value)} ~ {decimal_repr(value)}",
          file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.time()
    game = _load_game(args.game)
    objective = None
    if args.objective:
        with open(args.objective, encoding="utf-8") as fh:
            doc = json.load(fh)
        objective = {zid: parse_rational(v) for zid, v in doc.get("c", {}).items()}
        for zid in objective:
            game.terminal(zid)  # unknown terminals are semantic errors
    epsilon = parse_rational(args.epsilon)
    value = None
    if args.notion == "efce":
        if objective is None:
            pi = compute_efce(game, epsilon)
        else:
            pi, value = optimal_efce(game, objective)
    else:
        if objective is None:
            pi = compute_bce(game)
        else:
            pi, value = optimal_bce(game, objective)
    measured = gap(game, pi, args.notion).overall
    _emit(json.loads(serialize_profile(game, pi)), args)
    report = {
        "command": "solve",
        "inputs": {"game": {"path": args.game, "sha256": _sha256(args.game)}},
        "outputs": {"notion": args.notion,
                    "gap": format_rational(measured),
                    "expected_utility": [
                        format_rational(expected_utility(game, pi, i))
                        for i in range(game.n)]},
        "wall_time_s": round(time.time() - started, 3),
        "version": __version__,
    }
    if args.objective:
        report["inputs"]["objective"] = {"path": args.objective,
                                         "sha256": _sha256(args.objective)}
    if value is not None:
        report["outputs"]["objective_value"] = format_rational(value)
    print(json.dumps(report, indent=2), file=sys.stderr)
    return EXIT_OK


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def cmd_paper_check(args) -> int:
    from .checks import run_all
    ok = run_all(sys.stdout)
    return EXIT_OK if ok else EXIT_SEMANTIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
