"""
WalkTrap: agglomerative clustering on random-walk distances.

The distance between communities C1 and C2 is
    r^2 = sum_k (P^t_{C1 k} - P^t_{C2 k})^2 / d(k)
where P^t_C is the t-step distribution of a walk started uniformly in C.
Adjacent communities are merged by smallest increase of the Ward-style cost
    sigma = |C1||C2| / (|C1| + |C2|) * r^2 / n
and the dendrogram is cut at maximal modularity.
"""

import heapq
import logging
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from detectors.base import AlgorithmOutput, Dendrogram
from graph_core import Graph
from partition import Partition

logger = logging.getLogger(__name__)

_ROW_BATCH = 256


def _transition(g: Graph, self_loops: bool):
    """Row-stochastic walk matrix and walk degrees (isolated nodes get a loop)."""
    adjacency = g.csr.copy()
    degrees = g.degrees().astype(np.float64)
    loops = np.ones(g.node_count) if self_loops else (degrees == 0).astype(np.float64)
    adjacency = (adjacency + sp.diags(loops)).tocsr()
    walk_degrees = degrees + loops
    return sp.diags(1.0 / walk_degrees) @ adjacency, walk_degrees


def _propagate(start: np.ndarray, transition_t: sp.csr_matrix, steps: int) -> np.ndarray:
    """Distribution(s) after `steps` steps; `start` holds one distribution per column."""
    x = start
    for _ in range(steps):
        x = transition_t @ x
    return x


class _VectorCache:
    """LRU store of community distributions scaled by 1/sqrt(d)."""

    def __init__(self, capacity: int):
        self.capacity = max(capacity, 2)
        self._store: "OrderedDict[int, np.ndarray]" = OrderedDict()

    def get(self, cid: int) -> Optional[np.ndarray]:
        vec = self._store.get(cid)
        if vec is not None:
            self._store.move_to_end(cid)
        return vec

    def put(self, cid: int, vec: np.ndarray):
        self._store[cid] = vec
        self._store.move_to_end(cid)
        while len(self._store) > self.capacity:
            self._store.popitem(last=False)

    def drop(self, cid: int):
        self._store.pop(cid, None)


def node_distance(g: Graph, i: int, j: int, steps: int = 4, self_loops: bool = False) -> float:
    """Random-walk distance r between two nodes."""
    transition, walk_degrees = _transition(g, self_loops)
    start = np.zeros((g.node_count, 2))
    start[i, 0] = start[j, 1] = 1.0
    dist = _propagate(start, transition.T.tocsr(), steps)
    diff = (dist[:, 0] - dist[:, 1]) / np.sqrt(walk_degrees)
    return float(np.sqrt(np.dot(diff, diff)))


def _edge_distances(
    g: Graph, transition: sp.csr_matrix, walk_degrees: np.ndarray, steps: int
) -> Dict[int, Dict[int, float]]:
    """r^2 for every edge from rows of P^{2t}.

    By reversibility sum_k P^t_ik P^t_jk / d(k) = P^{2t}_ij / d(j).
    """
    n = g.node_count
    transition_t = transition.T.tocsr()
    rows: Dict[int, np.ndarray] = {}
    diag = np.zeros(n)
    for start in range(0, n, _ROW_BATCH):
        batch = np.arange(start, min(start + _ROW_BATCH, n))
        seeds = np.zeros((n, len(batch)))
        seeds[batch, np.arange(len(batch))] = 1.0
        block = _propagate(seeds, transition_t, 2 * steps)
        for col, i in enumerate(batch):
            diag[i] = block[i, col]
            nbrs = np.asarray(g.adjacency[i], dtype=np.int64)
            rows[int(i)] = block[nbrs, col] if len(nbrs) else np.zeros(0)

    distances: Dict[int, Dict[int, float]] = {i: {} for i in range(n)}
    for i in range(n):
        for pos, j in enumerate(g.adjacency[i]):
            if i < j:
                r2 = diag[i] / walk_degrees[i] + diag[j] / walk_degrees[j]
                r2 -= 2.0 * rows[i][pos] / walk_degrees[j]
                distances[i][j] = distances[j][i] = max(r2, 0.0)
    return distances


def walktrap(
    g: Graph, steps: int = 4, self_loops: bool = False, cache_mb: float = 512.0
) -> AlgorithmOutput:
    n = g.node_count
    if g.edge_count == 0:
        return AlgorithmOutput(Partition.singletons(n), iterations=0)

    transition, walk_degrees = _transition(g, self_loops)
    transition_t = transition.T.tocsr()
    scale = 1.0 / np.sqrt(walk_degrees)
    r2 = _edge_distances(g, transition, walk_degrees, steps)

    size = [1] * n
    members: List[List[int]] = [[i] for i in range(n)]
    alive = [True] * n
    version = [0] * n
    cache = _VectorCache(int(cache_mb * 1024 * 1024 // (8 * max(n, 1))))

    def vector(cid: int) -> np.ndarray:
        vec = cache.get(cid)
        if vec is None:
            start = np.zeros(n)
            start[members[cid]] = 1.0 / size[cid]
            vec = _propagate(start, transition_t, steps) * scale
            cache.put(cid, vec)
        return vec

    def cost(c1: int, c2: int, dist2: float) -> float:
        return size[c1] * size[c2] / (size[c1] + size[c2]) * dist2 / n

    # sigma[c][d]: merge cost of adjacent communities; links[c][d]: edge count between them
    sigma: List[Dict[int, float]] = [
        {j: cost(i, j, r2[i][j]) for j in g.adjacency[i]} for i in range(n)
    ]
    links: List[Dict[int, int]] = [{j: 1 for j in g.adjacency[i]} for i in range(n)]

    m = float(g.edge_count)
    degree_sum = g.degrees().astype(np.float64)
    q = -float(np.sum((degree_sum / (2.0 * m)) ** 2))
    dendrogram = Dendrogram(n, q)

    heap = [(sigma[i][j], i, j, 0, 0) for i in range(n) for j in sigma[i] if i < j]
    heapq.heapify(heap)

    while heap:
        _, i, j, vi, vj = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or version[i] != vi or version[j] != vj:
            continue
        keep, drop = (i, j) if size[i] >= size[j] else (j, i)

        q += links[keep][drop] / m - 2.0 * degree_sum[keep] * degree_sum[drop] / (4.0 * m * m)
        delta_merge = sigma[keep][drop]
        old_keep, old_drop = size[keep], size[drop]
        merged_size = old_keep + old_drop

        keep_vec, drop_vec = cache.get(keep), cache.get(drop)
        new_vec = None
        if keep_vec is not None and drop_vec is not None:
            new_vec = (old_keep * keep_vec + old_drop * drop_vec) / merged_size

        neighbours = (set(sigma[keep]) | set(sigma[drop])) - {keep, drop}
        updated: Dict[int, float] = {}
        for c in sorted(neighbours):
            if c in sigma[keep] and c in sigma[drop]:
                updated[c] = (
                    (old_keep + size[c]) * sigma[keep][c]
                    + (old_drop + size[c]) * sigma[drop][c]
                    - size[c] * delta_merge
                ) / (merged_size + size[c])
        pending = [c for c in sorted(neighbours) if c not in updated]

        # merge bookkeeping
        members[keep].extend(members[drop])
        members[drop] = []
        size[keep] = merged_size
        degree_sum[keep] += degree_sum[drop]
        alive[drop] = False
        version[keep] += 1
        cache.drop(drop)
        cache.drop(keep)
        if new_vec is not None:
            cache.put(keep, new_vec)

        for c in pending:
            diff = vector(keep) - vector(c)
            updated[c] = cost(keep, c, float(np.dot(diff, diff)))

        for c in neighbours:
            w = links[keep].get(c, 0) + links[drop].get(c, 0)
            sigma[c].pop(drop, None)
            links[c].pop(drop, None)
            sigma[c][keep] = updated[c]
            links[c][keep] = w
        sigma[keep] = {c: updated[c] for c in neighbours}
        links[keep] = {c: links[c][keep] for c in neighbours}
        sigma[drop] = {}
        links[drop] = {}

        dendrogram.record(keep, drop, q)
        for c in neighbours:
            lo, hi = (keep, c) if keep < c else (c, keep)
            heapq.heappush(heap, (updated[c], lo, hi, version[lo], version[hi]))

    partition, best_q = dendrogram.best_cut()
    logger.debug(f"WalkTrap: {len(dendrogram.merges)} merges, best Q={best_q:.4f}")
    return AlgorithmOutput(
        partition,
        iterations=len(dendrogram.merges),
        dendrogram=dendrogram,
        details={
            "best_modularity": best_q,
            "walktrap_steps": steps,
            "walktrap_self_loops": self_loops,
            "merge_criterion": "ward_random_walk",
        },
    )


def community_vectors(
    g: Graph, communities: Sequence[Sequence[int]], steps: int = 4, self_loops: bool = False
) -> np.ndarray:
    """Scaled t-step distributions, one row per community (used for inspection and tests)."""
    transition, walk_degrees = _transition(g, self_loops)
    start = np.zeros((g.node_count, len(communities)))
    for col, group in enumerate(communities):
        start[list(group), col] = 1.0 / len(group)
    dist = _propagate(start, transition.T.tocsr(), steps)
    return (dist / np.sqrt(walk_degrees)[:, None]).T
