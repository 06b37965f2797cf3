"""
Louvain modularity optimisation: local moves to a fixed point, then
aggregation of communities into weighted supernodes, repeated while the
partition keeps changing.
"""

import logging
import random
from typing import Dict, List, Tuple

import numpy as np

from detectors.base import AlgorithmOutput
from graph_core import Graph, WeightedAggregate, aggregate
from partition import Partition

logger = logging.getLogger(__name__)

_MIN_GAIN = 1e-12


def _local_moves(agg: WeightedAggregate, py_rng: random.Random) -> Tuple[List[int], bool, int]:
    """One level of node moves; returns (labels, any move made, sweeps)."""
    n = agg.node_count
    k = agg.weighted_degrees()
    two_m = float(k.sum())
    labels = list(range(n))
    totals = k.copy()
    moved_any = False
    sweeps = 0
    order = list(range(n))

    while True:
        sweeps += 1
        moved = False
        py_rng.shuffle(order)
        for i in order:
            ki = k[i]
            home = labels[i]
            links: Dict[int, float] = {}
            for j, w in agg.neighbors[i].items():
                links[labels[j]] = links.get(labels[j], 0.0) + w

            totals[home] -= ki
            best = home
            best_gain = links.get(home, 0.0) - totals[home] * ki / two_m
            for c, w in links.items():
                gain = w - totals[c] * ki / two_m
                if gain > best_gain + _MIN_GAIN:
                    best, best_gain = c, gain
            totals[best] += ki
            if best != home:
                labels[i] = best
                moved = True
        if not moved:
            break
        moved_any = True
    return labels, moved_any, sweeps


def louvain(g: Graph, seed: int = 0) -> AlgorithmOutput:
    n = g.node_count
    if g.edge_count == 0:
        return AlgorithmOutput(Partition.singletons(n), iterations=0)

    py_rng = random.Random(seed)
    agg = WeightedAggregate.from_graph(g)
    overall = np.arange(n)
    levels = 0
    sweeps = 0
    while True:
        labels, moved, level_sweeps = _local_moves(agg, py_rng)
        sweeps += level_sweeps
        if not moved:
            break
        levels += 1
        level = Partition.from_labels(labels)
        overall = level.as_array()[overall]
        agg = aggregate(agg, level)
        if agg.node_count == 1:
            break

    partition = Partition.from_labels(overall.tolist())
    logger.debug(f"Louvain: {levels} levels, {partition.community_count} communities")
    return AlgorithmOutput(partition, iterations=levels, details={"sweeps": sweeps})
