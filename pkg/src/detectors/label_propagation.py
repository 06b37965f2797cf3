"""
Asynchronous label propagation: every node adopts the label most frequent
among its neighbours, ties broken at random, until no label changes.
"""

import logging
import random
from collections import Counter

from detectors.base import AlgorithmOutput
from graph_core import Graph
from partition import Partition

logger = logging.getLogger(__name__)


def label_propagation(g: Graph, seed: int = 0, max_sweeps: int = 100) -> AlgorithmOutput:
    n = g.node_count
    py_rng = random.Random(seed)
    labels = list(range(n))
    order = list(range(n))
    converged = False
    sweeps = 0

    while sweeps < max_sweeps:
        sweeps += 1
        changed = False
        py_rng.shuffle(order)
        for i in order:
            nbrs = g.adjacency[i]
            if not nbrs:
                continue
            counts = Counter(labels[j] for j in nbrs)
            top = max(counts.values())
            best = sorted(label for label, c in counts.items() if c == top)
            # a current label among the majority is kept
            if labels[i] in best:
                continue
            labels[i] = py_rng.choice(best)
            changed = True
        if not changed:
            converged = True
            break

    if not converged:
        logger.warning(f"Label propagation stopped at the sweep cap ({max_sweeps})")
    partition = Partition.from_labels(labels)
    logger.debug(f"Label propagation: {sweeps} sweeps, {partition.community_count} communities")
    return AlgorithmOutput(partition, iterations=sweeps, converged=converged)
