"""Command-line interface.

    deploylab solve GAME.json [--method enumerate|hedge] [--eps E]
    deploylab symmetrize GAME.json [--eps E]
    deploylab analyze-graph GAME.json [--dot FILE]
    deploylab mechanism --type insurance|election --n N --benefit CSV --c C ...
    deploylab experiment --experiment NAME [--trials T] [--dimension D] ...

Exit codes: 0 success, 1 experiment produced failures, 2 configuration
error.  DEPLOYLAB_WORKERS overrides the experiment worker count.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import experiments as expmod
from .games import (BimatrixGame, game_to_dict, load_game, save_game,
                    support_enumeration_equilibria)
from .graphs import (build_graph, build_ordinal_potential, condensation,
                     maximal_states, pure_nash,
                     strongly_maximal_equilibrium_classes)
from .mechanisms import (ElectionParams, InsuranceParams, StagHuntSpec,
                         apply_election, apply_insurance, iterated_dominance)
from .symmetrization import gkt_symmetrize, normalize_bimatrix, \
    solve_bimatrix_via_hedge


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in sorted(obj) if True] \
            if isinstance(obj, (set, frozenset)) else [_jsonable(v) for v in obj]
    return obj


def _write_json(data, path):
    if path is None or path == "-":
        json.dump(_jsonable(data), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _cmd_solve(args):
    game = load_game(args.game)
    if not isinstance(game, BimatrixGame):
        raise ValueError("solve expects a bimatrix or symmetric game")
    if args.method == "enumerate":
        eqs = support_enumeration_equilibria(game)
        out = {"method": "enumerate",
               "equilibria": [[p.tolist(), q.tolist()] for p, q in eqs]}
    else:
        res = solve_bimatrix_via_hedge(game, args.eps)
        out = {"method": "hedge", "success": res["success"],
               "iterations": res["iterations"]}
        if res["success"]:
            p, q = res["pair"]
            out["pair"] = [p.tolist(), q.tolist()]
    _write_json(out, args.out)
    return 0


def _cmd_symmetrize(args):
    game = load_game(args.game)
    if not isinstance(game, BimatrixGame):
        raise ValueError("symmetrize expects a bimatrix or symmetric game")
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    norm, record = normalize_bimatrix(game)
    gkt = gkt_symmetrize(norm)
    save_game(BimatrixGame.symmetric(gkt.C),
              os.path.join(out_dir, "gkt_game.json"))
    res = solve_bimatrix_via_hedge(game, args.eps)
    report = {
        "success": res["success"],
        "iterations": res["iterations"],
        "eps_chain": res.get("eps_chain"),
        "verdicts": res.get("verdicts"),
        "recovered_pair": None,
        "normalization": {"shift_a": record.shift_a,
                          "shift_b": record.shift_b,
                          "scale": record.scale},
    }
    if res["success"]:
        p, q = res["pair"]
        report["recovered_pair"] = [p.tolist(), q.tolist()]
    _write_json(report, os.path.join(out_dir, "pipeline_report.json"))
    return 0


def _cmd_analyze_graph(args):
    game = load_game(args.game)
    if isinstance(game, BimatrixGame):
        from .games import StrategicGame
        game = StrategicGame.from_bimatrix(game)
    weak = maximal_states(game, "weak")
    strong = maximal_states(game, "strong")
    potential = build_ordinal_potential(game)
    out = {
        "pure_nash": {str(list(s)): lbl for s, lbl in pure_nash(game).items()},
        "weak_maximal": [list(s) for s in sorted(weak.maximal_states)],
        "strong_maximal": [list(s) for s in sorted(strong.maximal_states)],
        "classes": [[list(s) for s in sorted(c)]
                    for c in strongly_maximal_equilibrium_classes(game)],
        "flags": weak.flags,
        "potential": None if potential is None else
        {str(list(s)): v for s, v in sorted(potential.items())},
    }
    _write_json(out, args.out)
    if args.dot:
        graph = build_graph(game, "ordinal")
        cond = condensation(graph)
        lines = ["digraph condensation {"]
        for cid, comp in enumerate(cond.components):
            label = "\\n".join(str(list(game.decode(v))) for v in comp[:4])
            if len(comp) > 4:
                label += "\\n..."
            shape = "doublecircle" if cid in cond.sinks else "ellipse"
            lines.append('  c%d [label="%s", shape=%s];' % (cid, label, shape))
        for a, b in sorted(cond.dag_arcs):
            lines.append("  c%d -> c%d;" % (a, b))
        lines.append("}")
        with open(args.dot, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_mechanism(args):
    benefit = tuple(float(v) for v in args.benefit.split(","))
    spec = StagHuntSpec(args.n, benefit, args.c)
    if args.type == "insurance":
        if args.premium is None or args.surplus is None:
            raise ValueError("insurance needs --premium and --surplus")
        game = apply_insurance(spec, InsuranceParams(args.premium,
                                                    args.surplus))
        dom = iterated_dominance(game, "strict")
    else:
        params = ElectionParams(args.penalty) if args.penalty else None
        game = apply_election(spec, params)
        dom = iterated_dominance(game, "weak")
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    save_game(game, os.path.join(out_dir, "induced_game.json"))
    weak = maximal_states(game, "weak")
    strong = maximal_states(game, "strong")
    analysis = {
        "dominance": {
            "kind": dom["kind"],
            "rounds": dom.get("rounds"),
            "survivors": dom.get("survivors"),
            "eliminations": [list(e) for e in dom.get("eliminations", [])],
        },
        "weak_maximal": [list(s) for s in sorted(weak.maximal_states)],
        "strong_maximal": [list(s) for s in sorted(strong.maximal_states)],
        "flags": weak.flags,
    }
    _write_json(analysis, os.path.join(out_dir, "analysis.json"))
    return 0


def _cmd_experiment(args):
    config = expmod.ExperimentConfig(
        experiment=args.experiment, trials=args.trials,
        dimension=args.dimension, eps=args.eps, seed=args.seed,
        schedule_form=args.schedule_form, schedule_c=args.schedule_c,
        schedule_exponent=args.schedule_exponent, max_iters=args.max_iters,
        out_dir=args.out or ".", workers=args.workers)
    report = expmod.run_experiment(config)
    formats = tuple(args.format.split(","))
    paths = expmod.emit_report(report, formats, config.out_dir)
    print("wrote %s" % ", ".join(paths))
    print("success rate %d/%d" % (report.successes, report.trials))
    return 0 if report.successes == report.trials else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="deploylab",
        description="game dynamics, symmetrization, and deployment-graph "
                    "analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="equilibria of a bimatrix game")
    p.add_argument("game")
    p.add_argument("--method", choices=("enumerate", "hedge"),
                   default="enumerate")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("symmetrize", help="GKT pipeline on a bimatrix game")
    p.add_argument("game")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_symmetrize)

    p = sub.add_parser("analyze-graph",
                       help="deployment-graph analysis of a strategic game")
    p.add_argument("game")
    p.add_argument("--dot", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analyze_graph)

    p = sub.add_parser("mechanism", help="induced mechanism games")
    p.add_argument("--type", choices=("insurance", "election"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--benefit", required=True,
                   help="comma-separated adopter benefits, one per count")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--premium", type=float, default=None)
    p.add_argument("--surplus", type=float, default=None)
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mechanism)

    p = sub.add_parser("experiment", help="batch experiments")
    p.add_argument("--experiment", choices=expmod.EXPERIMENTS, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dimension", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schedule-form", default="power")
    p.add_argument("--schedule-c", type=float, default=1.0)
    p.add_argument("--schedule-exponent", type=float, default=0.5)
    p.add_argument("--max-iters", type=int, default=10**6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
