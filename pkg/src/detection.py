"""
Community detection front end: configuration, dispatch to the native
algorithms, external partitions and a brute-force modularity oracle.
"""

import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import yaml

from data_loader import read_membership
from detectors.base import AlgorithmOutput, Dendrogram, DetectionError, modularity
from detectors.fast_greedy import fast_greedy
from detectors.label_propagation import label_propagation
from detectors.louvain import louvain
from detectors.markov_cluster import markov_cluster
from detectors.walktrap import walktrap
from graph_core import Graph
from partition import Partition

logger = logging.getLogger(__name__)

__all__ = [
    "ALGORITHMS",
    "CommunityDetector",
    "Dendrogram",
    "DetectionConfig",
    "DetectionError",
    "DetectionResult",
    "exhaustive_best_partition",
    "load_external_partition",
    "modularity",
]

ALGORITHMS = ("fast_greedy", "louvain", "walktrap", "label_propagation", "markov_cluster")
EXHAUSTIVE_LIMIT = 10


@dataclass
class DetectionConfig:
    algorithm: str
    seed: int = 0
    walktrap_steps: int = 4
    walktrap_self_loops: bool = False
    walktrap_cache_mb: float = 512.0
    mcl_expansion: int = 2
    mcl_inflation: float = 2.0
    mcl_prune_threshold: float = 1e-5
    mcl_max_iterations: int = 100
    mcl_self_loops: bool = True
    lpa_max_sweeps: int = 100

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise DetectionError(
                f"Unknown algorithm '{self.algorithm}'; choose one of {', '.join(ALGORITHMS)}"
            )
        if self.walktrap_steps < 1:
            raise DetectionError(f"walktrap_steps must be >= 1, got {self.walktrap_steps}")
        if int(self.mcl_expansion) != self.mcl_expansion or self.mcl_expansion < 2:
            raise DetectionError(f"mcl_expansion must be an integer >= 2, got {self.mcl_expansion}")
        if self.mcl_inflation <= 1:
            raise DetectionError(f"mcl_inflation must exceed 1, got {self.mcl_inflation}")
        if not 0 <= self.mcl_prune_threshold <= 0.01:
            raise DetectionError(
                f"mcl_prune_threshold must lie in [0, 0.01], got {self.mcl_prune_threshold}"
            )
        if self.lpa_max_sweeps < 1:
            raise DetectionError(f"lpa_max_sweeps must be >= 1, got {self.lpa_max_sweeps}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class DetectionResult:
    algorithm: str
    partition: Partition
    modularity: Optional[float]
    iterations: int
    converged: bool
    dendrogram: Optional[Dendrogram] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_metadata(self) -> Dict[str, Any]:
        """Deterministic record for the JSON sidecar; runtime is kept elsewhere."""
        return {
            "algorithm": self.algorithm,
            "modularity": self.modularity,
            "iterations": self.iterations,
            "converged": self.converged,
            "community_count": self.partition.community_count,
            "node_count": self.partition.node_count,
            "merges": len(self.dendrogram.merges) if self.dendrogram else None,
            "details": self.details,
        }


def _run_fast_greedy(g: Graph, cfg: DetectionConfig) -> AlgorithmOutput:
    return fast_greedy(g)


def _run_louvain(g: Graph, cfg: DetectionConfig) -> AlgorithmOutput:
    return louvain(g, seed=cfg.seed)


def _run_walktrap(g: Graph, cfg: DetectionConfig) -> AlgorithmOutput:
    return walktrap(
        g,
        steps=cfg.walktrap_steps,
        self_loops=cfg.walktrap_self_loops,
        cache_mb=cfg.walktrap_cache_mb,
    )


def _run_label_propagation(g: Graph, cfg: DetectionConfig) -> AlgorithmOutput:
    return label_propagation(g, seed=cfg.seed, max_sweeps=cfg.lpa_max_sweeps)


def _run_markov_cluster(g: Graph, cfg: DetectionConfig) -> AlgorithmOutput:
    return markov_cluster(
        g,
        expansion=int(cfg.mcl_expansion),
        inflation=cfg.mcl_inflation,
        prune_threshold=cfg.mcl_prune_threshold,
        max_iterations=cfg.mcl_max_iterations,
        self_loops=cfg.mcl_self_loops,
    )


_DISPATCH: Dict[str, Callable[[Graph, DetectionConfig], AlgorithmOutput]] = {
    "fast_greedy": _run_fast_greedy,
    "louvain": _run_louvain,
    "walktrap": _run_walktrap,
    "label_propagation": _run_label_propagation,
    "markov_cluster": _run_markov_cluster,
}


def load_external_partition(path: str, node_count: Optional[int] = None) -> Partition:
    """Membership file produced by an external tool."""
    logger.info(f"Loading external partition from: {path}")
    return read_membership(path, node_count)


def _set_partitions(n: int) -> Iterator[List[int]]:
    """Restricted growth strings: every set partition of n elements once."""
    labels = [0] * n

    def extend(i: int, top: int) -> Iterator[List[int]]:
        if i == n:
            yield labels
            return
        for label in range(top + 2):
            labels[i] = label
            yield from extend(i + 1, max(top, label))

    if n == 0:
        yield []
        return
    yield from extend(1, 0)


def exhaustive_best_partition(g: Graph) -> Tuple[Partition, float]:
    """Modularity optimum by enumerating every set partition (small graphs only).

    The first partition in enumeration order wins exact ties.
    """
    if g.node_count > EXHAUSTIVE_LIMIT:
        raise DetectionError(
            f"Exhaustive search is limited to {EXHAUSTIVE_LIMIT} nodes, got {g.node_count}"
        )
    best: Optional[Partition] = None
    best_q = float("-inf")
    for labels in _set_partitions(g.node_count):
        candidate = Partition(tuple(labels))
        q = modularity(g, candidate)
        if q > best_q:
            best, best_q = candidate, q
    return best, best_q


class CommunityDetector:
    """Runs a configured algorithm and wraps its output."""

    def __init__(self, config_path: str = "config.yaml"):
        """Initialize detector with configuration."""
        self.config = self._load_config(config_path)

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Load the detection section of the YAML configuration."""
        if not os.path.exists(config_path):
            logger.warning(f"Config file {config_path} not found, using defaults")
            return {}
        with open(config_path, "r") as file:
            return (yaml.safe_load(file) or {}).get("detection", {}) or {}

    def make_config(self, algorithm: str, seed: int = 0, **overrides: Any) -> DetectionConfig:
        """DetectionConfig from the YAML defaults, with explicit overrides on top."""
        known = set(DetectionConfig.__dataclass_fields__) - {"algorithm", "seed"}
        values = {key: value for key, value in self.config.items() if key in known}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return DetectionConfig(algorithm=algorithm, seed=seed, **values)

    def detect(self, g: Graph, config: DetectionConfig) -> DetectionResult:
        logger.info(f"Running {config.algorithm} on {g}")
        try:
            output = _DISPATCH[config.algorithm](g, config)
        except Exception as e:
            logger.error(f"Error running {config.algorithm}: {e}")
            raise

        q = modularity(g, output.partition) if g.edge_count else None
        result = DetectionResult(
            algorithm=config.algorithm,
            partition=output.partition,
            modularity=q,
            iterations=output.iterations,
            converged=output.converged,
            dendrogram=output.dendrogram,
            details=output.details,
        )
        q_text = f"{q:.4f}" if q is not None else "n/a"
        logger.info(
            f"{config.algorithm} found {output.partition.community_count} communities (Q={q_text})"
        )
        return result
