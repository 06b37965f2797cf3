"""
Partition of a node set into mutually exclusive communities.
Used for reference structures, algorithm outputs and connected components alike.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class PartitionError(ValueError):
    """Raised when a membership vector does not describe a valid partition."""


def _canonical_labels(labels: Sequence[Hashable]) -> tuple:
    """Relabel communities 0..k-1 in order of first appearance."""
    mapping: Dict[Hashable, int] = {}
    dense = []
    for label in labels:
        if label not in mapping:
            mapping[label] = len(mapping)
        dense.append(mapping[label])
    return tuple(dense)


@dataclass(frozen=True)
class Partition:
    """Assignment of every node 0..n-1 to exactly one community.

    Community ids are dense and canonical: community 0 holds node 0, and ids
    grow in order of the smallest node of each community. Two partitions that
    group nodes the same way therefore compare equal.
    """

    membership: tuple

    def __post_init__(self):
        labels = tuple(int(c) for c in self.membership)
        if any(c < 0 for c in labels):
            raise PartitionError("Community ids must be non-negative")
        object.__setattr__(self, "membership", _canonical_labels(labels))

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "Partition":
        """Build a partition from arbitrary hashable labels, one per node."""
        return cls(_canonical_labels(labels))

    @classmethod
    def from_communities(
        cls, communities: Iterable[Iterable[int]], node_count: Optional[int] = None
    ) -> "Partition":
        """Build a partition from an explicit list of node groups."""
        assignment: Dict[int, int] = {}
        for cid, members in enumerate(communities):
            for node in members:
                node = int(node)
                if node in assignment:
                    raise PartitionError(f"Node {node} appears in two communities")
                assignment[node] = cid
        n = node_count if node_count is not None else len(assignment)
        missing = [i for i in range(n) if i not in assignment]
        if missing or len(assignment) != n:
            raise PartitionError(
                f"Communities do not cover nodes 0..{n - 1} (missing: {missing[:5]})"
            )
        return cls(tuple(assignment[i] for i in range(n)))

    @classmethod
    def singletons(cls, node_count: int) -> "Partition":
        return cls(tuple(range(node_count)))

    @classmethod
    def single(cls, node_count: int) -> "Partition":
        return cls((0,) * node_count)

    @property
    def node_count(self) -> int:
        return len(self.membership)

    @property
    def community_count(self) -> int:
        return max(self.membership) + 1 if self.membership else 0

    def community_of(self, node: int) -> int:
        return self.membership[node]

    @cached_property
    def communities(self) -> List[List[int]]:
        """Node lists per community id, each sorted ascending."""
        groups: List[List[int]] = [[] for _ in range(self.community_count)]
        for node, cid in enumerate(self.membership):
            groups[cid].append(node)
        return groups

    def sizes(self) -> np.ndarray:
        return np.bincount(self.as_array(), minlength=self.community_count)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.membership, dtype=np.int64)

    def __len__(self) -> int:
        return self.node_count
