"""Experiment harness: generators, trials, reports, determinism."""

import json
import os

import numpy as np
import pytest

from deploylab.experiments import (ExperimentConfig, emit_report,
                                   gen_random_game, hedge_symmetric_solve,
                                   run_experiment)
from deploylab.games import is_approx_equilibrium


class TestGenRandomGame:
    def test_deterministic(self):
        a = gen_random_game("symmetric", 4, 11)
        b = gen_random_game("symmetric", 4, 11)
        assert np.array_equal(a.A, b.A)

    def test_kinds(self):
        bim = gen_random_game("bimatrix", (2, 3), 0)
        assert bim.shape == (2, 3)
        spec = gen_random_game("stag-hunt", 3, 0)
        assert spec.n == 3 and spec.benefit[-1] > spec.c > spec.benefit[0]
        strat = gen_random_game("strategic", (2, 2, 2), 0)
        assert strat.strategy_counts == (2, 2, 2)
        with pytest.raises(ValueError):
            gen_random_game("extensive", 2, 0)


class TestHedgeSymmetricSolve:
    def test_solves_small_game(self):
        rng = np.random.default_rng(12)
        C = rng.random((4, 4))
        res = hedge_symmetric_solve(C, 1e-3, max_iters=10**5, seed=1)
        assert res["success"]
        assert is_approx_equilibrium(C, res["strategy"], 1e-3, "symmetric")
        assert res["gap"] <= 1e-3


class TestRunExperiment:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(experiment="nonexistent")
        with pytest.raises(ValueError):
            ExperimentConfig(experiment="stag-hunt-suite", trials=0)

    def test_stag_hunt_suite(self):
        config = ExperimentConfig(experiment="stag-hunt-suite", trials=5,
                                  dimension=3, seed=2)
        report = run_experiment(config)
        assert report.successes == 5
        assert [r["trial"] for r in report.records] == list(range(5))

    def test_worker_parity(self, monkeypatch):
        base = dict(experiment="mechanism-suite", trials=4, dimension=3,
                    eps=0.05, seed=3)
        serial = run_experiment(ExperimentConfig(**base))
        monkeypatch.setenv("DEPLOYLAB_WORKERS", "2")
        parallel = run_experiment(ExperimentConfig(**base))
        strip = lambda recs: [{k: v for k, v in r.items() if k != "wall_time"}
                              for r in recs]
        assert strip(serial.records) == strip(parallel.records)

    def test_failure_records_carry_seeds(self):
        config = ExperimentConfig(experiment="rps-repulsion", trials=3,
                                  dimension=3, seed=4)
        report = run_experiment(config)
        for r in report.records:
            assert r["seed"] == [4, r["trial"]]


class TestEmitReport:
    def _report(self, seed=5):
        config = ExperimentConfig(experiment="stag-hunt-suite", trials=4,
                                  dimension=3, seed=seed)
        return run_experiment(config)

    def test_json_byte_deterministic(self, tmp_path):
        r1, r2 = self._report(), self._report()
        p1 = emit_report(r1, ("json",), str(tmp_path / "a"))[0]
        p2 = emit_report(r2, ("json",), str(tmp_path / "b"))[0]
        with open(p1, "rb") as f1, open(p2, "rb") as f2:
            assert f1.read() == f2.read()

    def test_json_content(self, tmp_path):
        path = emit_report(self._report(), ("json",), str(tmp_path))[0]
        with open(path) as fh:
            data = json.load(fh)
        assert data["trials"] == 4
        assert data["success_rate"] == data["successes"] / 4
        assert all("wall_time" not in r for r in data["records"])

    def test_csv_and_svg(self, tmp_path):
        paths = emit_report(self._report(), ("json", "csv", "svg"),
                            str(tmp_path))
        assert len(paths) == 3
        with open(paths[1]) as fh:
            header = fh.readline().strip()
        assert header == "trial,seed,outcome,iterations,achieved_eps"
        with open(paths[2]) as fh:
            assert fh.readline().startswith("<svg")
        assert all(os.path.exists(p) for p in paths)
