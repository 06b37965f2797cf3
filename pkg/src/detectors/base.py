"""
Shared pieces of the detection algorithms: modularity, the merge dendrogram
of agglomerative methods and the common output record.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from graph_core import Graph
from partition import Partition

logger = logging.getLogger(__name__)


class DetectionError(ValueError):
    """Raised on unknown algorithms, invalid knobs or undefined quality scores."""


def modularity(g: Graph, p: Partition) -> float:
    """Q = sum over communities of m_c/m - (d_c/2m)^2."""
    if p.node_count != g.node_count:
        raise DetectionError(f"Partition covers {p.node_count} nodes, graph has {g.node_count}")
    if g.edge_count == 0:
        raise DetectionError("Modularity is undefined on a graph without edges")
    m = float(g.edge_count)
    labels = p.as_array()
    k = p.community_count
    coo = g.csr.tocoo()
    inside = labels[coo.row] == labels[coo.col]
    # each internal edge appears twice in the symmetric matrix
    internal = np.bincount(labels[coo.row][inside], minlength=k) / 2.0
    degree_sums = np.bincount(labels, weights=g.degrees().astype(np.float64), minlength=k)
    return float(np.sum(internal / m - (degree_sums / (2.0 * m)) ** 2))


@dataclass
class Dendrogram:
    """Merge history of an agglomerative method.

    Each merge is (a, b, q): community b joins community a, which keeps its id,
    and q is the modularity after the merge. Community ids start as node ids.
    """

    node_count: int
    initial_modularity: float
    merges: List[Tuple[int, int, float]] = field(default_factory=list)

    def record(self, a: int, b: int, q: float):
        self.merges.append((int(a), int(b), float(q)))

    def cut(self, k: int) -> Partition:
        """Partition after replaying the first k merges."""
        if not 0 <= k <= len(self.merges):
            raise DetectionError(f"Cut {k} outside 0..{len(self.merges)}")
        parent = list(range(self.node_count))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, _ in self.merges[:k]:
            parent[find(b)] = find(a)
        return Partition.from_labels([find(i) for i in range(self.node_count)])

    def modularity_path(self) -> np.ndarray:
        return np.array([self.initial_modularity] + [q for _, _, q in self.merges])

    def best_cut(self) -> Tuple[Partition, float]:
        """Cut with maximal modularity; the earliest one on exact ties."""
        path = self.modularity_path()
        k = int(np.argmax(path))
        return self.cut(k), float(path[k])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "node_count": self.node_count,
            "initial_modularity": self.initial_modularity,
            "merges": [list(merge) for merge in self.merges],
        }


@dataclass
class AlgorithmOutput:
    partition: Partition
    iterations: int
    converged: bool = True
    dendrogram: Optional[Dendrogram] = None
    details: Dict[str, Any] = field(default_factory=dict)
