"""
Traditional partition-comparison measures: FCC, Rand index, adjusted Rand
index and normalized mutual information, all computed from the contingency
table of a reference and an estimated partition.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import scipy.sparse as sp

from partition import Partition

logger = logging.getLogger(__name__)

MEASURES = ("fcc", "ri", "ari", "nmi")
MEASURE_RANGES: Dict[str, Tuple[float, float]] = {
    "fcc": (0.0, 1.0),
    "ri": (0.0, 1.0),
    "ari": (-1.0, 1.0),
    "nmi": (0.0, 1.0),
}


class MeasureError(ValueError):
    """Raised when a measure is undefined for its inputs."""


class PartitionMismatchError(MeasureError):
    """Raised when the two partitions do not cover the same node set."""


def _pairs(x: int) -> int:
    return x * (x - 1) // 2


@dataclass(frozen=True)
class ContingencyTable:
    """n_ij = |reference community i ∩ estimated community j|."""

    counts: sp.csr_matrix
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: int

    def pair_counts(self) -> Tuple[int, int, int, int]:
        """(pairs together in both, sum of row pairs, sum of column pairs, all pairs).

        Exact Python integers.
        """
        together = sum(_pairs(int(c)) for c in self.counts.data)
        row_pairs = sum(_pairs(int(c)) for c in self.row_sums)
        col_pairs = sum(_pairs(int(c)) for c in self.col_sums)
        return together, row_pairs, col_pairs, _pairs(self.total)

    def to_dense(self) -> np.ndarray:
        return self.counts.toarray()


def contingency(reference: Partition, estimated: Partition) -> ContingencyTable:
    if reference.node_count != estimated.node_count:
        raise PartitionMismatchError(
            f"Reference covers {reference.node_count} nodes, "
            f"estimated covers {estimated.node_count}"
        )
    rows = reference.as_array()
    cols = estimated.as_array()
    shape = (reference.community_count, estimated.community_count)
    counts = sp.coo_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=shape
    ).tocsr()
    counts.sum_duplicates()
    return ContingencyTable(
        counts=counts,
        row_sums=np.asarray(counts.sum(axis=1)).ravel().astype(np.int64),
        col_sums=np.asarray(counts.sum(axis=0)).ravel().astype(np.int64),
        total=reference.node_count,
    )


def _require_pairs(table: ContingencyTable):
    if table.total < 2:
        raise MeasureError(f"Pair-counting measures need at least 2 nodes, got {table.total}")


def rand_index(reference: Partition, estimated: Partition) -> float:
    """Share of node pairs on which both partitions agree (together or apart)."""
    table = contingency(reference, estimated)
    _require_pairs(table)
    together, row_pairs, col_pairs, total = table.pair_counts()
    return (total + 2 * together - row_pairs - col_pairs) / total


def adjusted_rand_index(reference: Partition, estimated: Partition) -> float:
    """Hubert-Arabie chance-corrected Rand index.

    Returns 1 when the normalisation vanishes (both partitions all singletons,
    or both a single community).
    """
    table = contingency(reference, estimated)
    _require_pairs(table)
    together, row_pairs, col_pairs, total = table.pair_counts()
    expected = row_pairs * col_pairs / total
    maximum = (row_pairs + col_pairs) / 2
    if maximum == expected:
        return 1.0
    return (together - expected) / (maximum - expected)


def _entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(reference: Partition, estimated: Partition) -> float:
    """2 I(R;E) / (H(R) + H(E)); 1 when both entropies vanish."""
    table = contingency(reference, estimated)
    n = table.total
    if n == 0:
        return 1.0
    h_ref = _entropy(table.row_sums, n)
    h_est = _entropy(table.col_sums, n)
    if h_ref + h_est == 0.0:
        return 1.0

    coo = table.counts.tocoo()
    joint = coo.data / n
    outer = table.row_sums[coo.row] * table.col_sums[coo.col] / (n * n)
    mutual = float(np.sum(joint * np.log(joint / outer)))
    return min(1.0, max(0.0, 2.0 * mutual / (h_ref + h_est)))


def fcc(reference: Partition, estimated: Partition) -> float:
    """Fraction of correctly classified nodes.

    Each reference community is matched to the estimated community holding the
    plurality of its members (ties go to the lower id). Nodes in that match are
    correct, except when one estimated community is the match of two or more
    reference communities: such a merge misclassifies all of them.
    """
    table = contingency(reference, estimated)
    if table.total == 0:
        return 1.0
    counts = table.counts
    best_cols = []
    best_counts = []
    for i in range(counts.shape[0]):
        start, end = counts.indptr[i], counts.indptr[i + 1]
        cols = counts.indices[start:end]
        data = counts.data[start:end]
        top = data.max()
        best_cols.append(int(cols[data == top].min()))
        best_counts.append(int(top))

    owners = Counter(best_cols)
    correct = sum(
        count for col, count in zip(best_cols, best_counts) if owners[col] == 1
    )
    return correct / table.total


def score_all(reference: Partition, estimated: Partition) -> Dict[str, float]:
    """The four measures keyed by name, in a fixed order."""
    return {
        "fcc": fcc(reference, estimated),
        "ri": rand_index(reference, estimated),
        "ari": adjusted_rand_index(reference, estimated),
        "nmi": nmi(reference, estimated),
    }
