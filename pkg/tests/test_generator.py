"""
Tests for the LFR-style benchmark generator.
"""

import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from data_loader import NetworkLoader, read_json
from generator import (
    AssignmentError,
    BimodalMixing,
    CommunitySizeError,
    ConfigurationModelError,
    ConstantMixing,
    DegreeSequenceError,
    LfrGenerator,
    LfrParams,
    ParameterError,
    assign_nodes,
    assignment_feasible,
    configuration_model,
    even_community_targets,
    generate_lfr,
    internal_degree_targets,
    mixing_deviation,
    mixing_from_dict,
    preset_params,
    rewire_to_mixing,
    sample_community_sizes,
    sample_mixing_coefficients,
    sample_powerlaw_degrees,
)
from partition import Partition
from power_law import fit_power_law
from topo_measures import (
    bin_by_size,
    community_sizes,
    embeddedness,
    internal_degrees,
    profile_communities,
)


@pytest.fixture
def small_params():
    return LfrParams(n=500, avg_degree=10, max_degree=40, mixing=ConstantMixing(0.2), seed=3)


@pytest.fixture
def small_network(small_params):
    return generate_lfr(small_params)


class TestLfrParams:
    """Test cases for parameter validation."""

    def test_rejects_small_gamma(self):
        with pytest.raises(ParameterError):
            LfrParams(n=100, avg_degree=5, max_degree=20, gamma=2.0)

    def test_rejects_beta_out_of_range(self):
        with pytest.raises(ParameterError):
            LfrParams(n=100, avg_degree=5, max_degree=20, beta=2.5)

    def test_rejects_degree_order(self):
        with pytest.raises(ParameterError):
            LfrParams(n=100, avg_degree=30, max_degree=20)
        with pytest.raises(ParameterError):
            LfrParams(n=100, avg_degree=5, max_degree=100)

    def test_rejects_bad_mixing(self):
        with pytest.raises(ParameterError):
            ConstantMixing(1.5)

    def test_dict_round_trip(self, small_params):
        assert LfrParams.from_dict(small_params.to_dict()) == small_params

    def test_mixing_from_dict(self):
        assert mixing_from_dict({"kind": "constant", "mu": 0.3}) == ConstantMixing(0.3)
        assert mixing_from_dict({"kind": "bimodal"}) == BimodalMixing(0.5, 0.2)
        with pytest.raises(ParameterError):
            mixing_from_dict({"kind": "uniform"})

    def test_presets(self):
        params = preset_params(2, seed=5)
        assert (params.n, params.avg_degree, params.max_degree) == (25000, 11.0, 2850)
        assert isinstance(params.mixing, BimodalMixing)
        with pytest.raises(ParameterError):
            preset_params(4)


class TestDegreeSequence:
    """Test cases for sample_powerlaw_degrees."""

    def test_mean_and_max(self):
        params = LfrParams(n=5000, avg_degree=10, max_degree=180, seed=1)
        degrees = sample_powerlaw_degrees(params, np.random.default_rng(1))
        assert degrees.mean() == pytest.approx(10, rel=0.1)
        assert degrees.max() == 180
        assert degrees.sum() % 2 == 0

    def test_regular_sequence(self):
        params = LfrParams(n=10, avg_degree=3, max_degree=3)
        degrees = sample_powerlaw_degrees(params, np.random.default_rng(0))
        assert degrees.tolist() == [3] * 10

    def test_unreachable_mean(self):
        params = LfrParams(n=100, avg_degree=1.0, max_degree=50, gamma=2.1)
        with pytest.raises(DegreeSequenceError):
            sample_powerlaw_degrees(params, np.random.default_rng(0))


class TestConfigurationModel:
    """Test cases for configuration_model."""

    def test_exact_degrees(self):
        degrees = np.array([3, 3, 2, 2, 2, 1, 1, 1, 1, 0])
        g = configuration_model(degrees, np.random.default_rng(0))
        assert g.degrees().tolist() == degrees.tolist()

    def test_simple_graph(self):
        rng = np.random.default_rng(2)
        params = LfrParams(n=2000, avg_degree=8, max_degree=100, seed=2)
        degrees = sample_powerlaw_degrees(params, rng)
        g = configuration_model(degrees, rng)
        assert g.degrees().tolist() == degrees.tolist()
        for u, nbrs in enumerate(g.adjacency):
            assert u not in nbrs
            assert len(set(nbrs)) == len(nbrs)

    def test_odd_sum(self):
        with pytest.raises(DegreeSequenceError):
            configuration_model([1, 1, 1], np.random.default_rng(0))

    def test_degree_too_large(self):
        with pytest.raises(DegreeSequenceError):
            configuration_model([4, 2, 2], np.random.default_rng(0))

    def test_unrealizable(self):
        # even degree sum, yet no simple graph has this sequence
        with pytest.raises(ConfigurationModelError):
            configuration_model([3, 3, 1, 1], np.random.default_rng(0), max_retries=3)


class TestMixing:
    """Test cases for mixing coefficients and internal degree targets."""

    def test_constant(self):
        mixing = sample_mixing_coefficients(10, ConstantMixing(0.3), np.random.default_rng(0))
        assert mixing.tolist() == [0.3] * 10

    def test_bimodal_half_zero(self):
        mixing = sample_mixing_coefficients(1001, BimodalMixing(), np.random.default_rng(0))
        assert (mixing == 0).sum() >= 500
        assert mixing.min() >= 0 and mixing.max() <= 1
        drawn = mixing[mixing > 0]
        assert drawn.mean() == pytest.approx(0.5, abs=0.05)

    def test_internal_targets(self):
        targets = internal_degree_targets(
            np.array([10, 3, 4, 0]), np.array([0.25, 0.5, 0.0, 0.5])
        )
        # 7.5 rounds up, 1.5 rounds up
        assert targets.tolist() == [8, 2, 4, 0]


class TestCommunitySizes:
    """Test cases for community sizes and node assignment."""

    def test_sizes_sum_to_n(self):
        params = LfrParams(n=1000, avg_degree=10, max_degree=50)
        sizes, (s_min, s_max) = sample_community_sizes(params, np.random.default_rng(0))
        assert sum(sizes) == 1000
        assert min(sizes) >= s_min and max(sizes) <= s_max

    def test_sizes_host_internal_degrees(self):
        params = LfrParams(n=1000, avg_degree=10, max_degree=60)
        rng = np.random.default_rng(4)
        internal = internal_degree_targets(
            sample_powerlaw_degrees(params, rng), np.full(1000, 0.1)
        )
        sizes, _ = sample_community_sizes(params, rng, internal_degrees=internal)
        assert sum(sizes) == 1000
        assert max(sizes) >= internal.max() + 1
        assert assignment_feasible(sizes, internal)

    def test_impossible_bounds(self):
        params = LfrParams(n=100, avg_degree=5, max_degree=20)
        with pytest.raises(CommunitySizeError):
            sample_community_sizes(params, np.random.default_rng(0), s_min=60, s_max=70)

    def test_feasibility_check(self):
        assert assignment_feasible([3, 2], [2, 2, 2, 1, 0])
        assert not assignment_feasible([3, 2], [2, 2, 2, 2, 0])

    def test_assignment_respects_capacity(self):
        sizes = [6, 4, 3, 3]
        internal = [5, 5, 3, 3, 2, 2, 2, 1, 1, 1, 0, 0, 0, 0, 0, 0]
        p = assign_nodes(sizes, internal, np.random.default_rng(1))
        assert sorted(p.sizes().tolist()) == sorted(sizes)
        sizes_of = p.sizes()
        for node, need in enumerate(internal):
            assert sizes_of[p.community_of(node)] >= need + 1

    def test_assignment_places_heaviest_nodes(self):
        sizes = [171, 167, 50, 50, 12]
        rng = np.random.default_rng(0)
        internal = np.concatenate([[170, 169], np.full(100, 150), rng.integers(0, 10, 348)])
        assert assignment_feasible(sizes, internal)
        for seed in range(20):
            p = assign_nodes(sizes, internal, np.random.default_rng(seed))
            sizes_of = p.sizes()
            assert sorted(sizes_of.tolist()) == sorted(sizes)
            assert sizes_of[p.community_of(0)] == 171
            assert sizes_of[p.community_of(1)] == 171
            for node, need in enumerate(internal):
                assert sizes_of[p.community_of(node)] >= need + 1

    def test_assignment_is_seeded(self):
        sizes = [6, 4, 3, 3]
        internal = [5, 5, 3, 3, 2, 2, 2, 1, 1, 1, 0, 0, 0, 0, 0, 0]
        first = assign_nodes(sizes, internal, np.random.default_rng(4))
        assert assign_nodes(sizes, internal, np.random.default_rng(4)) == first

    def test_assignment_impossible(self):
        with pytest.raises(AssignmentError):
            assign_nodes([2, 2], [3, 0, 0, 0], np.random.default_rng(0))

    def test_even_targets_per_community(self):
        reference = Partition((0, 0, 0, 1, 1))
        targets = even_community_targets(
            np.array([1, 1, 1, 1, 1]),
            np.array([2, 2, 2, 1, 1]),
            reference,
            np.random.default_rng(0),
        )
        for group in reference.communities:
            assert targets[group].sum() % 2 == 0


class TestRewiring:
    """Test cases for rewire_to_mixing."""

    def test_preserves_degrees_and_reaches_targets(self, clique_ring, clique_ring_partition):
        # shuffle the ring, then rewire back toward its original internal degrees
        rng = np.random.default_rng(0)
        shuffled = configuration_model(clique_ring.degrees(), rng)
        targets = internal_degrees(clique_ring, clique_ring_partition)
        before = mixing_deviation(
            shuffled.degrees(),
            internal_degrees(shuffled, clique_ring_partition),
            targets,
            quantized=True,
        )
        result = rewire_to_mixing(
            shuffled, clique_ring_partition, np.zeros(40), rng, internal_targets=targets
        )
        assert result.graph.degrees().tolist() == clique_ring.degrees().tolist()
        assert result.internal_degrees.tolist() == internal_degrees(
            result.graph, clique_ring_partition
        ).tolist()
        assert result.deviation < 0.5 * before

    def test_already_satisfied(self, dumbbell, dumbbell_partition):
        targets = internal_degrees(dumbbell, dumbbell_partition)
        result = rewire_to_mixing(
            dumbbell, dumbbell_partition, np.zeros(6), np.random.default_rng(0),
            internal_targets=targets,
        )
        assert result.moves == 0
        assert result.deviation == 0.0
        assert result.converged

    def test_partition_mismatch(self, dumbbell):
        with pytest.raises(ParameterError):
            rewire_to_mixing(dumbbell, Partition((0, 0)), np.zeros(2), np.random.default_rng(0))


class TestGenerateLfr:
    """Test cases for the full pipeline."""

    def test_structure(self, small_network, small_params):
        g, reference = small_network.graph, small_network.reference
        assert g.node_count == small_params.n
        assert reference.node_count == small_params.n
        assert g.degrees().sum() == 2 * g.edge_count
        assert small_network.metadata["achieved_mean_degree"] == pytest.approx(10, rel=0.1)
        assert small_network.metadata["achieved_max_degree"] == 40

    def test_mixing_close_to_target(self, small_network):
        values = [node.e for node in embeddedness(small_network.graph, small_network.reference)]
        assert np.mean(values) == pytest.approx(0.8, abs=0.06)
        assert small_network.metadata["mixing_deviation"] < 0.1

    def test_communities_can_host_members(self, small_network):
        sizes = small_network.reference.sizes()
        reference = small_network.reference
        for node, target in enumerate(small_network.internal_targets):
            assert sizes[reference.community_of(node)] >= target + 1

    def test_records_assignment_feasibility(self, small_network):
        assert small_network.metadata["assignment_feasible"] is True
        assert small_network.metadata["smallest_community"] >= 2

    def test_deterministic(self, small_params):
        first = generate_lfr(small_params)
        second = generate_lfr(small_params)
        assert first.graph == second.graph
        assert first.reference == second.reference
        assert first.metadata == second.metadata

    def test_different_seeds_differ(self, small_params):
        other = LfrParams.from_dict({**small_params.to_dict(), "seed": 4})
        assert generate_lfr(small_params).graph != generate_lfr(other).graph

    def test_bimodal_half_fully_embedded(self):
        params = LfrParams(n=2000, avg_degree=10, max_degree=60, seed=7)
        network = generate_lfr(params)
        values = np.array([node.e for node in embeddedness(network.graph, network.reference)])
        assert 0.4 <= (values == 1.0).mean() <= 0.65


class TestLfrGenerator:
    """Test cases for the config-driven front end."""

    def test_settings_from_config(self, config_file):
        generator = LfrGenerator(config_file)
        assert generator.settings.rewire_tolerance == 0.05
        assert generator.default_mixing() == BimodalMixing(0.5, 0.2)

    def test_missing_config_uses_defaults(self, temp_dir):
        generator = LfrGenerator(os.path.join(temp_dir, "absent.yaml"))
        assert generator.settings.configuration_model_retries == 50

    def test_save_round_trip(self, config_file, temp_dir, small_params):
        generator = LfrGenerator(config_file)
        network = generator.generate(small_params)
        directory = os.path.join(temp_dir, "net")
        paths = generator.save(network, directory)
        assert set(paths) == {"edges", "reference", "metadata"}

        graph, reference, metadata = NetworkLoader(config_file).load_network(directory)
        assert graph == network.graph
        assert reference == network.reference
        assert metadata == read_json(paths["metadata"])
        assert metadata["params"]["mixing"] == {"kind": "constant", "mu": 0.2}

    def test_save_is_byte_stable(self, config_file, temp_dir, small_params):
        generator = LfrGenerator(config_file)
        for name in ("a", "b"):
            generator.save(generator.generate(small_params), os.path.join(temp_dir, name))
        for filename in ("network.edges", "reference.membership", "network.meta.json"):
            with open(os.path.join(temp_dir, "a", filename), "rb") as first:
                with open(os.path.join(temp_dir, "b", filename), "rb") as second:
                    assert first.read() == second.read()


DESK_SEEDS = [0, 1, 2, 3, 4]


def _occupied(series):
    keep = series.count > 0
    return series.mean[keep]


@pytest.fixture(scope="class")
def regime2_runs():
    """Five preset-2 networks with their reference profiles and size fits."""
    runs = []
    for seed in DESK_SEEDS:
        network = generate_lfr(preset_params(2, seed=seed))
        profiles = profile_communities(
            network.graph, network.reference, distance_source_cap=2000, seed=seed
        )
        fit = fit_power_law(community_sizes(network.reference), replicates=100, seed=seed)
        runs.append((network, profiles, fit))
    return runs


@pytest.mark.slow
class TestDeskScale:
    """Generator realism on the 7500- and 25000-node regimes."""

    @pytest.mark.parametrize("seed", DESK_SEEDS)
    def test_preset_regime1(self, seed):
        network = generate_lfr(preset_params(1, seed=seed))
        assert network.graph.node_count == 7500
        assert network.metadata["achieved_mean_degree"] == pytest.approx(10, rel=0.1)
        assert network.metadata["assignment_feasible"] is True

    def test_regime2_degrees_and_embeddedness(self, regime2_runs):
        for network, _, _ in regime2_runs:
            assert network.metadata["achieved_mean_degree"] == pytest.approx(11, rel=0.1)
            values = np.array(
                [node.e for node in embeddedness(network.graph, network.reference)]
            )
            assert 0.45 <= (values == 1.0).mean() <= 0.60

    def test_regime2_sizes_follow_power_law(self, regime2_runs):
        accepted = sum(fit.p_value > 0.05 for _, _, fit in regime2_runs)
        assert accepted >= 4

    def test_regime2_scaled_density_curve(self, regime2_runs):
        for _, profiles, _ in regime2_runs:
            means = _occupied(bin_by_size(profiles, "scaled_density"))
            assert 2.0 <= means[0] <= 4.0
            assert 6.0 <= means[-1] <= 20.0

    def test_regime2_average_distance_curve(self, regime2_runs):
        passing = 0
        for _, profiles, _ in regime2_runs:
            means = _occupied(bin_by_size(profiles, "average_distance"))
            middle = means[len(means) // 3 : max(2 * len(means) // 3, len(means) // 3 + 1)]
            in_range = bool(np.all((means >= 1.3) & (means <= 3.0)))
            plateau = means[-1] <= 1.15 * middle.mean()
            passing += in_range and plateau
        assert passing >= 4
