"""
Greedy modularity agglomeration (Clauset-Newman-Moore).

Starting from singletons, repeatedly merge the pair of adjacent communities
with the largest modularity increase (or smallest decrease) until no
adjacent pair remains, then cut the dendrogram at maximal modularity.
"""

import heapq
import logging
from typing import Dict, List

from detectors.base import AlgorithmOutput, Dendrogram
from graph_core import Graph
from partition import Partition

logger = logging.getLogger(__name__)


def fast_greedy(g: Graph) -> AlgorithmOutput:
    n = g.node_count
    if g.edge_count == 0:
        return AlgorithmOutput(Partition.singletons(n), iterations=0)

    two_m = 2.0 * g.edge_count
    # e[i][j]: fraction of edge ends joining i and j (counted from each side)
    e: List[Dict[int, float]] = [{v: 1.0 / two_m for v in nbrs} for nbrs in g.adjacency]
    a = [g.degree(i) / two_m for i in range(n)]
    alive = [True] * n
    version = [0] * n

    q = -sum(x * x for x in a)
    dendrogram = Dendrogram(n, q)

    heap = []
    for i in range(n):
        for j, eij in e[i].items():
            if i < j:
                heap.append((-2.0 * (eij - a[i] * a[j]), i, j, 0, 0))
    heapq.heapify(heap)

    while heap:
        neg_dq, i, j, vi, vj = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or version[i] != vi or version[j] != vj:
            continue
        # keep the community with the larger neighbour row
        keep, drop = (i, j) if len(e[i]) >= len(e[j]) else (j, i)
        for k, ejk in e[drop].items():
            if k == keep:
                continue
            e[keep][k] = e[keep].get(k, 0.0) + ejk
            e[k][keep] = e[k].get(keep, 0.0) + ejk
            del e[k][drop]
        e[keep].pop(drop, None)
        e[drop] = {}
        a[keep] += a[drop]
        alive[drop] = False
        version[keep] += 1
        q -= neg_dq
        dendrogram.record(keep, drop, q)

        for k, eik in e[keep].items():
            lo, hi = (keep, k) if keep < k else (k, keep)
            heapq.heappush(
                heap, (-2.0 * (eik - a[keep] * a[k]), lo, hi, version[lo], version[hi])
            )

    partition, best_q = dendrogram.best_cut()
    logger.debug(f"FastGreedy: {len(dendrogram.merges)} merges, best Q={best_q:.4f}")
    return AlgorithmOutput(
        partition,
        iterations=len(dendrogram.merges),
        dendrogram=dendrogram,
        details={"best_modularity": best_q},
    )
