"""Batch experiment harness: random game generation, the named
experiments, and deterministic report emission (JSON/CSV/SVG).

Per-trial randomness is derived from (config.seed, trial_index), so any
trial reproduces in isolation.  Reports are byte-deterministic for a
given config; wall-clock times are kept in memory only and never
serialized.
"""

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .games import BimatrixGame, is_approx_equilibrium
from .graphs import (classify_acyclicity, maximal_states, pure_nash)
from .hedge import (LearningRateSchedule, relative_entropy, rescale_to_unit,
                    run_hedge)
from .mechanisms import (A, D, X, Y, InsuranceParams, StagHuntSpec,
                         apply_election, apply_insurance, build_stag_hunt,
                         iterated_dominance)
from .symmetrization import solve_bimatrix_via_hedge

EXPERIMENTS = ("random-symmetric-hedge", "rps-repulsion", "gkt-roundtrip",
               "stag-hunt-suite", "mechanism-suite")

RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


@dataclass
class ExperimentConfig:
    experiment: str
    trials: int = 100
    dimension: int = 10
    eps: float = 1e-3
    seed: int = 0
    schedule_form: str = "power"
    schedule_c: float = 1.0
    schedule_exponent: float = 0.5
    max_iters: int = 10**6
    out_dir: str = "."
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError("unknown experiment %r" % (self.experiment,))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def schedule(self):
        return LearningRateSchedule(self.schedule_form, self.schedule_c,
                                    self.schedule_exponent)


@dataclass
class ExperimentReport:
    config: dict
    records: list
    successes: int = 0

    @property
    def trials(self):
        return len(self.records)

    @property
    def success_rate(self):
        return self.successes / self.trials if self.records else 0.0


def _trial_rng(seed, trial):
    return np.random.default_rng([seed, trial])


def gen_random_game(kind, dims, seed):
    """Deterministic random game; entries i.i.d. uniform on [0,1].

    kinds: 'symmetric' (C, used as (C, C^T)), 'bimatrix', 'stag-hunt'
    (dims = player count; increasing benefit straddling c), 'strategic'
    (dims = tuple of strategy counts).
    """
    rng = np.random.default_rng(seed)
    if kind == "symmetric":
        C = rng.random((dims, dims))
        return BimatrixGame.symmetric(C)
    if kind == "bimatrix":
        m, n = dims if isinstance(dims, tuple) else (dims, dims)
        return BimatrixGame(rng.random((m, n)), rng.random((m, n)))
    if kind == "stag-hunt":
        n = dims
        c = float(rng.uniform(0.0, 1.0))
        lows = int(rng.integers(1, n))  # at least one entry on each side of c
        below = c - rng.uniform(0.05, 1.0, size=lows)
        above = c + rng.uniform(0.05, 1.0, size=n - lows)
        benefit = tuple(sorted(np.concatenate([below, above])))
        return StagHuntSpec(n, benefit, c)
    if kind == "strategic":
        from .games import StrategicGame
        counts = tuple(dims)
        table = rng.random(counts + (len(counts),))
        return StrategicGame(counts, table)
    raise ValueError("unknown game kind %r" % (kind,))


def hedge_symmetric_solve(C, eps, max_iters=10**6, restarts=10, seed=0,
                          segment=2000, schedule=None):
    """Approximate symmetric equilibrium of (C, C^T) by Hedge.

    Restarts from random interior points within the iteration budget;
    each restart checks the last iterate and several window averages of
    the orbit against the equilibrium gap max(Cx) - x.Cx <= eps.
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if schedule is None:
        schedule = LearningRateSchedule("power", 1.0, 0.5)
    per_restart = max_iters // restarts

    def gap(x):
        p = C @ x
        return float(p.max() - x @ p)

    used = 0
    for restart in range(restarts):
        if restart == 0:
            x = np.ones(n) / n
        else:
            x = _trial_rng(seed, restart).dirichlet(np.ones(n))
        running = np.zeros(n)
        checkpoints = [(0, np.zeros(n))]
        done = 0
        while done < per_restart:
            chunk = min(segment, per_restart - done)
            trace = run_hedge(C, x, schedule, max_iters=chunk,
                              record_every=chunk, k0=done)
            x = trace.final
            running += trace.iterate_sum
            done += trace.count
            used += trace.count
            checkpoints.append((done, running.copy()))
            candidates = [x, running / done]
            for frac in (2, 4, 8):
                cut = done - done // frac
                k0c, s0 = min(checkpoints, key=lambda cs: abs(cs[0] - cut))
                if done - k0c > 0:
                    candidates.append((running - s0) / (done - k0c))
            for cand in candidates:
                if gap(cand) <= eps:
                    return {"success": True, "strategy": cand,
                            "iterations": used, "restarts": restart + 1,
                            "gap": gap(cand)}
            if trace.stop_reason == "fixed-point":
                break
    return {"success": False, "strategy": None, "iterations": used,
            "restarts": restarts, "gap": None}


def _trial_random_symmetric(config, t):
    rng = _trial_rng(config.seed, t)
    C = rng.random((config.dimension, config.dimension))
    res = hedge_symmetric_solve(C, config.eps, max_iters=config.max_iters,
                                seed=config.seed * 1000003 + t)
    ok = res["success"]
    if ok:
        ok = is_approx_equilibrium(C, res["strategy"], config.eps,
                                   "symmetric")
    return {"trial": t, "seed": [config.seed, t], "outcome": bool(ok),
            "iterations": res["iterations"], "achieved_eps": res["gap"]}


def _trial_rps_repulsion(config, t):
    C0, _, _ = rescale_to_unit(RPS)
    uniform = np.ones(3) / 3
    rng = _trial_rng(config.seed, t)
    x0 = rng.dirichlet(np.ones(3))
    ok = True
    for alpha in (0.1, 0.5, 1.0):
        trace = run_hedge(C0, x0, LearningRateSchedule("constant", alpha),
                          max_iters=2000, reference=uniform)
        re_seq = [r for r in trace.re_to_reference if r is not None]
        if any(b <= a for a, b in zip(re_seq, re_seq[1:])):
            ok = False
    return {"trial": t, "seed": [config.seed, t], "outcome": ok,
            "iterations": 2000, "achieved_eps": None}


def _trial_gkt_roundtrip(config, t):
    rng = _trial_rng(config.seed, t)
    d = min(config.dimension, 3)
    game = BimatrixGame(rng.random((d, d)), rng.random((d, d)))
    res = solve_bimatrix_via_hedge(game, config.eps)
    ok = res["success"] and is_approx_equilibrium(
        game, res["pair"], config.eps, "bimatrix")
    return {"trial": t, "seed": [config.seed, t], "outcome": bool(ok),
            "iterations": res["iterations"],
            "achieved_eps": config.eps if ok else None}


def _trial_stag_hunt(config, t):
    rng = _trial_rng(config.seed, t)
    n = int(rng.integers(2, min(config.dimension, 4) + 1))
    spec = gen_random_game("stag-hunt", n, [config.seed, t, 1])
    game = build_stag_hunt(spec)
    flags = classify_acyclicity(game)
    analysis = maximal_states(game, "weak")
    ok = flags["weakly_acyclic"] and \
        analysis.maximal_states <= analysis.pure_nash
    return {"trial": t, "seed": [config.seed, t], "outcome": bool(ok),
            "iterations": 0, "achieved_eps": None}


def _trial_mechanism(config, t):
    rng = _trial_rng(config.seed, t)
    n = int(rng.integers(2, 4))
    spec = gen_random_game("stag-hunt", n, [config.seed, t, 1])
    margin = min(b - spec.c for b in spec.benefit if b > spec.c)
    surplus = float(rng.uniform(0.6, 0.9)) * margin
    premium = float(rng.uniform(0.2, 0.8)) * surplus
    ins = apply_insurance(spec, InsuranceParams(premium, surplus))
    rec = iterated_dominance(ins, "strict")
    a_profile = (A,) * n
    ok = rec["rounds"] == 2 and \
        [r == [A] for r in rec["survivors"]].count(True) == n and \
        maximal_states(ins, "weak").maximal_states == {a_profile} and \
        maximal_states(ins, "strong").maximal_states == {a_profile}

    el = apply_election(spec)
    wrec = iterated_dominance(el, "weak")
    ok = ok and all(sorted(r) == [X, Y] for r in wrec["survivors"])
    flags = classify_acyclicity(el)
    ok = ok and flags["weakly_ordinally_acyclic"]
    strong = maximal_states(el, "strong").maximal_states
    ok = ok and all(D not in s for s in strong)
    ok = ok and pure_nash(el).get((D,) * n) == "weak"
    return {"trial": t, "seed": [config.seed, t], "outcome": bool(ok),
            "iterations": 0, "achieved_eps": None}


_TRIALS = {
    "random-symmetric-hedge": _trial_random_symmetric,
    "rps-repulsion": _trial_rps_repulsion,
    "gkt-roundtrip": _trial_gkt_roundtrip,
    "stag-hunt-suite": _trial_stag_hunt,
    "mechanism-suite": _trial_mechanism,
}


def _run_one(args):
    config, t = args
    fn = _TRIALS[config.experiment]
    t0 = time.perf_counter()
    rec = fn(config, t)
    rec["wall_time"] = time.perf_counter() - t0
    return rec


def run_experiment(config):
    """Execute the configured experiment; failures carry their seeds."""
    workers = config.workers
    env = os.environ.get("DEPLOYLAB_WORKERS")
    if env:
        workers = int(env)
    jobs = [(config, t) for t in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    records.sort(key=lambda r: r["trial"])
    successes = sum(1 for r in records if r["outcome"])
    return ExperimentReport(asdict(config), records, successes)


def _strip_times(record):
    return {k: v for k, v in record.items() if k != "wall_time"}


def _svg_plot(values, title, width=480, height=240):
    """Minimal polyline plot; no plotting dependency."""
    pad = 30
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
             % (width, height),
             '<text x="%d" y="15" font-size="12">%s</text>' % (pad, title),
             '<rect x="%d" y="20" width="%d" height="%d" fill="none" '
             'stroke="black"/>' % (pad, width - 2 * pad, height - 20 - pad)]
    vals = [v for v in values if v is not None]
    if vals:
        vmax = max(vals) or 1.0
        pts = []
        for i, v in enumerate(values):
            if v is None:
                continue
            xpix = pad + (width - 2 * pad) * (i / max(1, len(values) - 1))
            ypix = (height - pad) - (height - 20 - pad) * (v / vmax)
            pts.append("%.1f,%.1f" % (xpix, ypix))
        lines.append('<polyline points="%s" fill="none" stroke="steelblue"/>'
                     % " ".join(pts))
    lines.append("</svg>")
    return "\n".join(lines)


def emit_report(report, formats=("json",), out_dir="."):
    """Write report files; returns the paths written.

    Wall-clock fields are dropped so identical configs yield identical
    bytes.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    base = os.path.join(out_dir, report.config["experiment"])
    if "json" in formats:
        path = base + ".json"
        payload = {"config": report.config,
                   "records": [_strip_times(r) for r in report.records],
                   "successes": report.successes,
                   "trials": report.trials,
                   "success_rate": report.success_rate}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)
    if "csv" in formats:
        path = base + ".csv"
        cols = ["trial", "seed", "outcome", "iterations", "achieved_eps"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in report.records:
                w.writerow([json.dumps(r[c]) if isinstance(r[c], list)
                            else r[c] for c in cols])
        paths.append(path)
    if "svg" in formats:
        path = base + ".svg"
        with open(path, "w") as fh:
            fh.write(_svg_plot([r["iterations"] for r in report.records],
                               "iterations per trial — %s"
                               % report.config["experiment"]))
            fh.write("\n")
        paths.append(path)
    return paths
