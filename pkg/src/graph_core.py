"""
Immutable undirected graph and the traversal / counting primitives used by
the generator, the measures and the detection algorithms.
"""

import logging
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from partition import Partition

logger = logging.getLogger(__name__)

UNREACHABLE = -1


class GraphError(ValueError):
    """Raised on invalid graph input (bad ids, self-loops, negative size)."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over dense node ids 0..n-1.

    Adjacency holds one sorted neighbor tuple per node; it is symmetric and
    free of self-loops and duplicates, so the degree sum is 2m.
    """

    node_count: int
    adjacency: Tuple[Tuple[int, ...], ...]
    edge_count: int

    @classmethod
    def from_neighbor_sets(cls, neighbor_sets: Sequence[Iterable[int]]) -> "Graph":
        """Freeze already-symmetric neighbor sets (trusted input)."""
        adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbor_sets)
        degree_sum = sum(len(nbrs) for nbrs in adjacency)
        return cls(len(adjacency), adjacency, degree_sum // 2)

    def neighbors(self, node: int) -> Tuple[int, ...]:
        return self.adjacency[node]

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def degrees(self) -> np.ndarray:
        return np.fromiter(
            (len(nbrs) for nbrs in self.adjacency), dtype=np.int64, count=self.node_count
        )

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        pos = bisect_left(nbrs, v)
        return pos < len(nbrs) and nbrs[pos] == v

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Each edge once, as (u, v) with u < v, in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs[bisect_left(nbrs, u + 1):]:
                yield u, v

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.degrees(), out=indptr[1:])
        indices = np.fromiter(
            (v for nbrs in self.adjacency for v in nbrs),
            dtype=np.int64,
            count=int(indptr[-1]),
        )
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.node_count,) * 2)

    def to_csr(self) -> sp.csr_matrix:
        return self.csr

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def build_graph(edges: Iterable[Sequence[int]], n: int) -> Graph:
    """Build a simple graph from node-id pairs.

    Duplicate pairs (in either orientation) collapse to one edge; self-loops
    and ids outside [0, n) are rejected.
    """
    if n < 0:
        raise GraphError(f"Node count must be non-negative, got {n}")
    neighbor_sets: List[set] = [set() for _ in range(n)]
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"Edge ({u}, {v}) has an id outside [0, {n})")
        if u == v:
            raise GraphError(f"Self-loop on node {u} is not allowed")
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    return Graph.from_neighbor_sets(neighbor_sets)


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Tuple[Graph, np.ndarray]:
    """Subgraph on `nodes`, relabelled 0..k-1.

    Returns the subgraph and the remapping table: entry i is the parent id of
    subgraph node i (parent ids sorted ascending).
    """
    members = np.unique(np.fromiter((int(i) for i in nodes), dtype=np.int64))
    if len(members) == 0:
        raise GraphError("Cannot induce a subgraph on an empty node set")
    if members[0] < 0 or members[-1] >= g.node_count:
        raise GraphError("Subgraph node set contains ids outside the graph")
    local = {int(old): new for new, old in enumerate(members)}
    adjacency = tuple(
        tuple(local[v] for v in g.adjacency[int(old)] if v in local) for old in members
    )
    degree_sum = sum(len(nbrs) for nbrs in adjacency)
    return Graph(len(members), adjacency, degree_sum // 2), members


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distance from `source` to every node; UNREACHABLE (-1) if none."""
    dist = [UNREACHABLE] * g.node_count
    dist[source] = 0
    queue = deque([source])
    adjacency = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adjacency[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue.append(v)
    return np.asarray(dist, dtype=np.int64)


def distance_rows(g: Graph, sources: Sequence[int]) -> np.ndarray:
    """Batched hop distances, one row per source, UNREACHABLE where infinite."""
    rows = csgraph.shortest_path(
        g.csr, method="D", directed=False, unweighted=True, indices=np.asarray(sources)
    )
    rows = np.atleast_2d(rows)
    out = np.full(rows.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(rows)
    out[finite] = rows[finite].astype(np.int64)
    return out


def connected_components(g: Graph) -> Partition:
    """Partition of the nodes into maximal connected sets."""
    if g.node_count == 0:
        return Partition(())
    _, labels = csgraph.connected_components(g.csr, directed=False)
    return Partition.from_labels(labels.tolist())


@dataclass(frozen=True)
class WeightedAggregate:
    """Community-level graph with weighted links and self-loops.

    Self-loop convention: the loop weight of a supernode is twice the weight
    of the links inside it, so a supernode's weighted degree (cross weights
    plus loop) equals the total degree of its members. `neighbors` holds the
    symmetric off-diagonal weights only.
    """

    node_count: int
    neighbors: Tuple[Dict[int, float], ...]
    self_loops: Tuple[float, ...]

    @classmethod
    def from_graph(cls, g: Graph) -> "WeightedAggregate":
        neighbors = tuple({v: 1.0 for v in nbrs} for nbrs in g.adjacency)
        return cls(g.node_count, neighbors, (0.0,) * g.node_count)

    def weighted_degrees(self) -> np.ndarray:
        return np.array(
            [sum(nbrs.values()) + loop for nbrs, loop in zip(self.neighbors, self.self_loops)],
            dtype=np.float64,
        )

    @property
    def cross_weight(self) -> float:
        return sum(sum(nbrs.values()) for nbrs in self.neighbors) / 2.0

    @property
    def intra_weight(self) -> float:
        return sum(self.self_loops) / 2.0

    @property
    def total_weight(self) -> float:
        return self.cross_weight + self.intra_weight


def aggregate(source: Union[Graph, WeightedAggregate], p: Partition) -> WeightedAggregate:
    """Collapse every community of `p` into one weighted supernode."""
    if isinstance(source, Graph):
        source = WeightedAggregate.from_graph(source)
    if p.node_count != source.node_count:
        raise GraphError(
            f"Partition covers {p.node_count} nodes, graph has {source.node_count}"
        )
    k = p.community_count
    membership = p.membership
    cross: List[Dict[int, float]] = [{} for _ in range(k)]
    loops = [0.0] * k
    for u, nbrs in enumerate(source.neighbors):
        cu = membership[u]
        loops[cu] += source.self_loops[u]
        row = cross[cu]
        for v, w in nbrs.items():
            cv = membership[v]
            if cv == cu:
                # visited from both endpoints, which yields the 2x convention
                loops[cu] += w
            else:
                row[cv] = row.get(cv, 0.0) + w
    return WeightedAggregate(k, tuple(cross), tuple(loops))
