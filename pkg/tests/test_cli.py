"""
Tests for the command-line entry point.
"""

import filecmp
import json
import os
import sys

import pytest
import yaml

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from cli import build_parser, main
from data_loader import read_json, read_membership, write_edge_list, write_membership
from experiment import ENV_OUTPUT_DIR

GENERATE_ARGS = [
    "--n", "500", "--avg-degree", "10", "--max-degree", "40",
    "--mixing", "constant", "--mu", "0.2", "--seed", "3",
]


@pytest.fixture
def network_dir(config_file, temp_dir):
    out = os.path.join(temp_dir, "net")
    assert main(["generate", "--config", config_file, "--output", out, *GENERATE_ARGS]) == 0
    return out


class TestParser:
    """Test cases for argument parsing."""

    def test_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_algorithm(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["detect", "--graph", "g.edges", "--algorithm", "infomap"])

    def test_experiment_seed_defaults_to_config(self):
        args = build_parser().parse_args(["experiment", "exp.yaml"])
        assert args.seed is None
        assert args.output is None

    def test_seed_defaults_to_zero_outside_experiment(self):
        parser = build_parser()
        parser.parse_args(["experiment", "exp.yaml"])
        assert parser.parse_args(["generate", "--n", "10"]).seed == 0
        assert parser.parse_args(["detect", "--graph", "g", "--algorithm", "louvain"]).seed == 0


class TestGenerate:
    """Test cases for the generate command."""

    def test_writes_network(self, network_dir, capsys):
        assert set(os.listdir(network_dir)) == {
            "network.edges",
            "reference.membership",
            "network.meta.json",
        }
        meta = read_json(os.path.join(network_dir, "network.meta.json"))
        assert meta["node_count"] == 500
        assert meta["params"]["mixing"] == {"kind": "constant", "mu": 0.2}
        assert "=== Generated Network ===" in capsys.readouterr().out

    def test_constant_needs_mu(self, config_file, temp_dir):
        args = ["generate", "--config", config_file, "--output", temp_dir,
                "--n", "100", "--avg-degree", "5", "--max-degree", "20", "--mixing", "constant"]
        assert main(args) == 1

    def test_missing_sizes(self, config_file, temp_dir):
        assert main(["generate", "--config", config_file, "--output", temp_dir]) == 1

    def test_default_seed_is_reproducible(self, config_file, temp_dir):
        args = GENERATE_ARGS[:-2]
        first, second = os.path.join(temp_dir, "a"), os.path.join(temp_dir, "b")
        assert main(["generate", "--config", config_file, "--output", first, *args]) == 0
        assert main(["generate", "--config", config_file, "--output", second, *args]) == 0
        for name in ("network.edges", "reference.membership", "network.meta.json"):
            assert filecmp.cmp(os.path.join(first, name), os.path.join(second, name), shallow=False)
        assert read_json(os.path.join(first, "network.meta.json"))["seed"] == 0

    def test_env_output_dir(self, config_file, temp_dir, monkeypatch):
        target = os.path.join(temp_dir, "from_env")
        monkeypatch.setenv(ENV_OUTPUT_DIR, target)
        assert main(["generate", "--config", config_file, *GENERATE_ARGS]) == 0
        assert os.path.exists(os.path.join(target, "network.edges"))


class TestDetectAndEvaluate:
    """Test cases for detect, evaluate and profile."""

    def test_detect_on_network_dir(self, network_dir, config_file, temp_dir, capsys):
        out = os.path.join(temp_dir, "partitions")
        args = ["detect", "--config", config_file, "--graph", network_dir,
                "--algorithm", "louvain", "--output", out]
        assert main(args) == 0
        partition = read_membership(os.path.join(out, "louvain.membership"), 500)
        assert partition.community_count > 1
        meta = read_json(os.path.join(out, "louvain.meta.json"))
        assert meta["config"]["algorithm"] == "louvain"
        assert "=== Detection ===" in capsys.readouterr().out

    def test_detect_edge_list_with_overrides(self, dumbbell, config_file, temp_dir):
        edges = os.path.join(temp_dir, "dumbbell.edges")
        write_edge_list(dumbbell, edges)
        args = ["detect", "--config", config_file, "--graph", edges, "--algorithm", "walktrap",
                "--walktrap-steps", "3", "--output", temp_dir]
        assert main(args) == 0
        meta = read_json(os.path.join(temp_dir, "walktrap.meta.json"))
        assert meta["config"]["walktrap_steps"] == 3
        assert meta["community_count"] == 2

    def test_invalid_knob_fails(self, dumbbell, config_file, temp_dir):
        edges = os.path.join(temp_dir, "dumbbell.edges")
        write_edge_list(dumbbell, edges)
        args = ["detect", "--config", config_file, "--graph", edges,
                "--algorithm", "markov_cluster", "--mcl-inflation", "0.5", "--output", temp_dir]
        assert main(args) == 1

    def test_evaluate(self, dumbbell_partition, config_file, temp_dir, capsys):
        ref = os.path.join(temp_dir, "ref.membership")
        est = os.path.join(temp_dir, "est.membership")
        write_membership(dumbbell_partition, ref)
        write_membership(dumbbell_partition, est)
        args = ["evaluate", "--config", config_file, "--reference", ref, "--estimated", est,
                "--output", temp_dir]
        assert main(args) == 0
        printed = json.loads(capsys.readouterr().out)
        assert printed == {"fcc": 1.0, "ri": 1.0, "ari": 1.0, "nmi": 1.0}
        assert read_json(os.path.join(temp_dir, "scores.json")) == printed

    def test_evaluate_size_mismatch(self, dumbbell_partition, config_file, temp_dir):
        ref = os.path.join(temp_dir, "ref.membership")
        est = os.path.join(temp_dir, "est.membership")
        write_membership(dumbbell_partition, ref)
        with open(est, "w") as file:
            file.write("0 0\n1 0\n")
        args = ["evaluate", "--config", config_file, "--reference", ref, "--estimated", est]
        assert main(args) == 1

    def test_profile(self, network_dir, config_file, temp_dir):
        out = os.path.join(temp_dir, "profile")
        args = ["profile", "--config", config_file, "--graph", network_dir,
                "--membership", os.path.join(network_dir, "reference.membership"),
                "--output", out]
        assert main(args) == 0
        curves = os.listdir(os.path.join(out, "curves"))
        assert "scaled_density__reference.csv" in curves
        assert os.path.exists(os.path.join(out, "embeddedness__reference.csv"))
        fit = read_json(os.path.join(out, "power_law__reference.json"))
        assert fit["community_count"] > 1


class TestExperimentCommand:
    """Test cases for the experiment and schema commands."""

    def test_schema(self, config_file, capsys):
        assert main(["schema", "--config", config_file]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert "regimes" in schema["properties"]

    def test_invalid_experiment(self, config_file, temp_dir):
        path = os.path.join(temp_dir, "exp.yaml")
        with open(path, "w") as file:
            yaml.safe_dump({"regimes": []}, file)
        assert main(["experiment", path, "--config", config_file]) == 1

    @pytest.mark.integration
    def test_experiment(self, config_file, temp_dir, capsys):
        path = os.path.join(temp_dir, "exp.yaml")
        experiment = {
            "regimes": [
                {
                    "n": 500,
                    "avg_degree": 10,
                    "max_degree": 40,
                    "mixing": {"kind": "constant", "mu": 0.2},
                }
            ],
            "sample_count": 1,
            "algorithms": [{"algorithm": "louvain"}],
        }
        with open(path, "w") as file:
            yaml.safe_dump(experiment, file)
        out = os.path.join(temp_dir, "run")
        args = ["experiment", path, "--config", config_file, "--output", out, "--seed", "3"]
        assert main(args) == 0
        assert "=== Experiment ===" in capsys.readouterr().out
        report = read_json(os.path.join(out, "report.json"))
        assert report["config"]["master_seed"] == 3
        assert report["scores"][0]["source"] == "louvain"
