"""The deploylab command-line interface."""

import json

import numpy as np
import pytest

from deploylab.cli import main
from deploylab.games import BimatrixGame, save_game


@pytest.fixture
def stag_hunt_file(tmp_path):
    path = tmp_path / "stag.json"
    save_game(BimatrixGame.symmetric(np.array([[10.0, -1.0], [0.0, 0.0]])),
              path)
    return str(path)


class TestSolve:
    def test_enumerate(self, stag_hunt_file, tmp_path):
        out = str(tmp_path / "eq.json")
        assert main(["solve", stag_hunt_file, "--out", out]) == 0
        with open(out) as fh:
            data = json.load(fh)
        assert data["method"] == "enumerate"
        assert len(data["equilibria"]) == 3

    def test_hedge(self, stag_hunt_file, tmp_path):
        out = str(tmp_path / "eq.json")
        assert main(["solve", stag_hunt_file, "--method", "hedge",
                     "--eps", "0.05", "--out", out]) == 0
        with open(out) as fh:
            data = json.load(fh)
        assert data["success"] and "pair" in data

    def test_missing_file_is_config_error(self, tmp_path):
        assert main(["solve", str(tmp_path / "nope.json")]) == 2

    def test_strategic_game_rejected(self, tmp_path):
        path = tmp_path / "g.json"
        with open(path, "w") as fh:
            json.dump({"kind": "strategic", "strategy_counts": [2, 2],
                       "payoffs": [[0, 0]] * 4}, fh)
        assert main(["solve", str(path)]) == 2


class TestSymmetrize:
    def test_writes_gkt_game_and_report(self, stag_hunt_file, tmp_path):
        out = str(tmp_path / "sym")
        assert main(["symmetrize", stag_hunt_file, "--eps", "0.05",
                     "--out", out]) == 0
        with open(tmp_path / "sym" / "gkt_game.json") as fh:
            gkt = json.load(fh)
        assert gkt["kind"] == "symmetric"
        assert len(gkt["A"]) == 2 + 2 + 1
        with open(tmp_path / "sym" / "pipeline_report.json") as fh:
            report = json.load(fh)
        assert report["success"]
        assert report["recovered_pair"] is not None
        assert report["normalization"]["scale"] > 0


class TestAnalyzeGraph:
    def test_analysis_and_dot(self, stag_hunt_file, tmp_path):
        out = str(tmp_path / "analysis.json")
        dot = str(tmp_path / "cond.dot")
        assert main(["analyze-graph", stag_hunt_file, "--out", out,
                     "--dot", dot]) == 0
        with open(out) as fh:
            data = json.load(fh)
        assert set(data["pure_nash"]) == {"[0, 0]", "[1, 1]"}
        assert data["weak_maximal"] == [[0, 0], [1, 1]]
        assert data["flags"]["weakly_acyclic"]
        assert data["potential"] is not None
        with open(dot) as fh:
            text = fh.read()
        assert text.startswith("digraph") and "doublecircle" in text


class TestMechanism:
    def test_insurance(self, tmp_path):
        out = str(tmp_path / "ins")
        assert main(["mechanism", "--type", "insurance", "--n", "2",
                     "--benefit=-1,10", "--c", "0", "--premium", "0.5",
                     "--surplus", "1.0", "--out", out]) == 0
        with open(tmp_path / "ins" / "analysis.json") as fh:
            data = json.load(fh)
        assert data["dominance"]["rounds"] == 2
        assert data["dominance"]["survivors"] == [[0], [0]]
        assert data["weak_maximal"] == [[0, 0]]

    def test_election(self, tmp_path):
        out = str(tmp_path / "el")
        assert main(["mechanism", "--type", "election", "--n", "2",
                     "--benefit=-1,10", "--c", "0", "--out", out]) == 0
        with open(tmp_path / "el" / "analysis.json") as fh:
            data = json.load(fh)
        assert data["dominance"]["survivors"] == [[2, 3], [2, 3]]
        assert data["flags"]["weakly_ordinally_acyclic"]
        with open(tmp_path / "el" / "induced_game.json") as fh:
            game = json.load(fh)
        assert game["kind"] == "strategic"

    def test_insurance_needs_premium(self):
        assert main(["mechanism", "--type", "insurance", "--n", "2",
                     "--benefit=-1,10", "--c", "0"]) == 2

    def test_invalid_benefit_is_config_error(self):
        assert main(["mechanism", "--type", "insurance", "--n", "2",
                     "--benefit=10,-1", "--c", "0", "--premium", "0.5",
                     "--surplus", "1.0"]) == 2


class TestExperiment:
    def test_success_exit_zero(self, tmp_path, capsys):
        code = main(["experiment", "--experiment", "stag-hunt-suite",
                     "--trials", "3", "--dimension", "3", "--seed", "1",
                     "--format", "json,csv", "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "success rate 3/3" in out
        assert (tmp_path / "stag-hunt-suite.json").exists()
        assert (tmp_path / "stag-hunt-suite.csv").exists()

    def test_unknown_experiment_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["experiment", "--experiment", "unknown"])
