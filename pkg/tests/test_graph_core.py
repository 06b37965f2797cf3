"""
Tests for the graph core: construction, subgraphs, distances, components
and weighted aggregation.
"""

import os
import sys

import networkx as nx
import numpy as np
import pytest

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from graph_core import (
    UNREACHABLE,
    GraphError,
    WeightedAggregate,
    aggregate,
    bfs_distances,
    build_graph,
    connected_components,
    distance_rows,
    induced_subgraph,
)
from partition import Partition, PartitionError


class TestBuildGraph:
    """Test cases for build_graph."""

    def test_path_graph(self):
        g = build_graph([(0, 1), (1, 2)], 3)
        assert g.degrees().tolist() == [1, 2, 1]
        assert g.edge_count == 2

    def test_duplicates_collapse(self):
        g = build_graph([(0, 1), (1, 0)], 2)
        assert g.edge_count == 1

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError):
            build_graph([(0, 0)], 1)

    def test_id_out_of_range(self):
        with pytest.raises(GraphError):
            build_graph([(0, 3)], 3)

    def test_negative_node_count(self):
        with pytest.raises(GraphError):
            build_graph([], -1)

    def test_adjacency_is_symmetric_and_sorted(self, clique_ring):
        for u, nbrs in enumerate(clique_ring.adjacency):
            assert list(nbrs) == sorted(nbrs)
            for v in nbrs:
                assert clique_ring.has_edge(v, u)
        assert clique_ring.degrees().sum() == 2 * clique_ring.edge_count

    def test_edges_listed_once(self, dumbbell):
        edges = list(dumbbell.edges())
        assert len(edges) == dumbbell.edge_count
        assert all(u < v for u, v in edges)
        assert edges == sorted(edges)

    def test_csr_matches_adjacency(self, dumbbell):
        dense = dumbbell.to_csr().toarray()
        assert np.array_equal(dense, dense.T)
        assert dense.sum() == 2 * dumbbell.edge_count


class TestInducedSubgraph:
    """Test cases for induced_subgraph."""

    def test_triangle_with_pendant(self):
        g = build_graph([(0, 1), (1, 2), (0, 2), (2, 3)], 4)
        sub, mapping = induced_subgraph(g, {0, 1, 2})
        assert sub.edge_count == 3
        assert mapping.tolist() == [0, 1, 2]

    def test_singleton(self, dumbbell):
        sub, _ = induced_subgraph(dumbbell, [4])
        assert sub.node_count == 1
        assert sub.edge_count == 0

    def test_cycle_segment_is_path(self, cycle5):
        sub, mapping = induced_subgraph(cycle5, [1, 2, 3])
        assert sub.edge_count == 2
        assert sub.degrees().tolist() == [1, 2, 1]
        assert mapping.tolist() == [1, 2, 3]

    def test_empty_set(self, dumbbell):
        with pytest.raises(GraphError):
            induced_subgraph(dumbbell, [])

    def test_preserves_adjacency(self, clique_ring):
        nodes = [0, 1, 4, 5, 6, 12, 39]
        sub, mapping = induced_subgraph(clique_ring, nodes)
        for a in range(sub.node_count):
            for b in range(sub.node_count):
                if a != b:
                    assert sub.has_edge(a, b) == clique_ring.has_edge(mapping[a], mapping[b])


class TestDistances:
    """Test cases for BFS distances."""

    def test_path(self, path_graph):
        assert bfs_distances(path_graph, 0).tolist() == [0, 1, 2]

    def test_unreachable(self):
        g = build_graph([(0, 1), (2, 3)], 4)
        dist = bfs_distances(g, 0)
        assert dist[2] == UNREACHABLE and dist[3] == UNREACHABLE

    def test_cycle(self, cycle5):
        assert bfs_distances(cycle5, 0).tolist() == [0, 1, 2, 2, 1]

    def test_distance_rows_match_bfs(self, clique_ring):
        rows = distance_rows(clique_ring, [0, 7, 23])
        for row, source in zip(rows, [0, 7, 23]):
            assert row.tolist() == bfs_distances(clique_ring, source).tolist()

    def test_matches_networkx(self, clique_ring):
        nxg = nx.Graph(list(clique_ring.edges()))
        expected = nx.single_source_shortest_path_length(nxg, 3)
        dist = bfs_distances(clique_ring, 3)
        for node, d in expected.items():
            assert dist[node] == d

    def test_triangle_inequality(self, clique_ring):
        rows = distance_rows(clique_ring, range(clique_ring.node_count))
        rng = np.random.default_rng(0)
        for a, b, c in rng.integers(0, clique_ring.node_count, size=(200, 3)):
            assert rows[a, c] <= rows[a, b] + rows[b, c]


class TestConnectedComponents:
    """Test cases for connected_components."""

    def test_two_triangles(self, two_triangles):
        components = connected_components(two_triangles)
        assert components.community_count == 2
        assert sorted(components.sizes().tolist()) == [3, 3]

    def test_connected(self, dumbbell):
        assert connected_components(dumbbell).community_count == 1

    def test_isolated_nodes(self):
        assert connected_components(build_graph([], 5)).community_count == 5


class TestAggregate:
    """Test cases for the weighted aggregate view."""

    def test_dumbbell(self, dumbbell, dumbbell_partition):
        agg = aggregate(dumbbell, dumbbell_partition)
        assert agg.node_count == 2
        assert agg.neighbors[0] == {1: 1.0}
        # loop weight is twice the internal edge count
        assert agg.self_loops == (6.0, 6.0)
        assert agg.total_weight == dumbbell.edge_count

    def test_singletons_reproduce_graph(self, dumbbell):
        agg = aggregate(dumbbell, Partition.singletons(6))
        assert agg.node_count == 6
        for u, nbrs in enumerate(dumbbell.adjacency):
            assert agg.neighbors[u] == {v: 1.0 for v in nbrs}
        assert sum(agg.self_loops) == 0

    def test_single_community(self, clique_ring):
        agg = aggregate(clique_ring, Partition.single(clique_ring.node_count))
        assert agg.node_count == 1
        assert agg.intra_weight == clique_ring.edge_count
        assert agg.cross_weight == 0

    def test_repeated_aggregation_conserves_mass(self, clique_ring, clique_ring_partition):
        first = aggregate(clique_ring, clique_ring_partition)
        second = aggregate(first, Partition(tuple(i // 2 for i in range(8))))
        assert second.node_count == 4
        assert second.total_weight == pytest.approx(clique_ring.edge_count)
        assert second.weighted_degrees().sum() == pytest.approx(2 * clique_ring.edge_count)

    def test_from_graph(self, dumbbell):
        agg = WeightedAggregate.from_graph(dumbbell)
        assert agg.weighted_degrees().tolist() == dumbbell.degrees().tolist()


class TestPartition:
    """Test cases for the Partition type."""

    def test_canonical_labels(self):
        assert Partition.from_labels(["b", "a", "b"]).membership == (0, 1, 0)
        assert Partition((5, 5, 2)) == Partition((0, 0, 1))

    def test_from_communities(self):
        p = Partition.from_communities([[2, 3], [0, 1]])
        assert p.membership == (0, 0, 1, 1)
        assert p.communities == [[0, 1], [2, 3]]

    def test_overlap_rejected(self):
        with pytest.raises(PartitionError):
            Partition.from_communities([[0, 1], [1, 2]])

    def test_missing_node_rejected(self):
        with pytest.raises(PartitionError):
            Partition.from_communities([[0], [2]], node_count=3)

    def test_sizes(self):
        assert Partition((0, 1, 1, 2, 2, 2)).sizes().tolist() == [1, 2, 3]
