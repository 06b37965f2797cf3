"""
Pytest configuration and shared fixtures.
"""

import os
import sys
import tempfile

import pytest

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from graph_core import build_graph  # noqa: E402
from partition import Partition  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale runs (minutes)")
    config.addinivalue_line("markers", "integration: spans several modules")
    config.addinivalue_line("markers", "unit: fast, single-module test")


def pytest_collection_modifyitems(items):
    for item in items:
        if not any(item.iter_markers(name) for name in ("slow", "integration")):
            item.add_marker(pytest.mark.unit)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield tmp_dir


@pytest.fixture
def sample_config():
    """Sample configuration for testing."""
    return {
        "generator": {
            "bimodal_mean": 0.5,
            "bimodal_sd": 0.2,
            "pin_max_degree": True,
            "configuration_model_retries": 50,
            "size_draw_retries": 10,
            "rewire_move_factor": 200,
            "rewire_patience": 20,
            "rewire_tolerance": 0.05,
        },
        "detection": {"walktrap_steps": 4, "mcl_inflation": 2.0, "lpa_max_sweeps": 100},
        "topology": {
            "transitivity_mode": "zero",
            "bins_per_decade": 5,
            "distance_source_cap": 2000,
            "embeddedness_bins": 10,
        },
        "power_law": {"replicates": 10, "min_tail": 5, "rejection_threshold": 0.001},
        "experiment": {"output_dir": "data/runs", "workers": 1, "seed_regime_stride": 1000},
        "logging": {"level": "WARNING"},
    }


@pytest.fixture
def config_file(temp_dir, sample_config):
    """sample_config written to a YAML file."""
    import yaml

    path = os.path.join(temp_dir, "config.yaml")
    with open(path, "w") as file:
        yaml.safe_dump(sample_config, file)
    return path


@pytest.fixture
def path_graph():
    """0-1-2."""
    return build_graph([(0, 1), (1, 2)], 3)


@pytest.fixture
def dumbbell():
    """Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
    return build_graph(edges, 6)


@pytest.fixture
def dumbbell_partition():
    return Partition((0, 0, 0, 1, 1, 1))


@pytest.fixture
def cycle5():
    return build_graph([(i, (i + 1) % 5) for i in range(5)], 5)


@pytest.fixture
def k4():
    return build_graph([(i, j) for i in range(4) for j in range(i + 1, 4)], 4)


@pytest.fixture
def star():
    """Hub 0 with five leaves."""
    return build_graph([(0, i) for i in range(1, 6)], 6)


@pytest.fixture
def two_triangles():
    """Two disjoint triangles."""
    return build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 6)


@pytest.fixture
def clique_ring():
    """Eight 5-cliques in a ring, consecutive cliques joined by one edge."""
    cliques, size = 8, 5
    edges = []
    for c in range(cliques):
        base = c * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
        edges.append((base + size - 1, ((c + 1) % cliques) * size))
    return build_graph(edges, cliques * size)


@pytest.fixture
def clique_ring_partition():
    return Partition(tuple(i // 5 for i in range(40)))
