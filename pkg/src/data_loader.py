"""
Data loader module for benchmark networks.
Handles the edge-list, membership and JSON metadata file formats.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from graph_core import Graph, build_graph
from partition import Partition

logger = logging.getLogger(__name__)

EDGES_FILE = "network.edges"
REFERENCE_FILE = "reference.membership"
METADATA_FILE = "network.meta.json"


class FileFormatError(ValueError):
    """Raised on malformed edge-list or membership files."""


def _data_lines(path: str):
    """Yield (line number, fields) for non-empty, non-comment lines."""
    with open(path, "r") as file:
        for lineno, line in enumerate(file, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, stripped.split()


def read_edge_list(path: str, n: Optional[int] = None) -> Graph:
    """Read one edge per line.

    Node count is `n` if given, else the '# nodes N' header written by
    `write_edge_list`, else max id + 1.
    """
    if n is None:
        n = _header_node_count(path)
    edges: List[Tuple[int, int]] = []
    max_id = -1
    for lineno, fields in _data_lines(path):
        if len(fields) < 2:
            raise FileFormatError(f"{path}:{lineno}: expected two node ids")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: node ids must be integers")
        if u == v:
            logger.warning(f"{path}:{lineno}: dropping self-loop on node {u}")
            continue
        edges.append((u, v))
        max_id = max(max_id, u, v)
    node_count = n if n is not None else max_id + 1
    graph = build_graph(edges, node_count)
    logger.info(f"Loaded {graph} from {path}")
    return graph


def _header_node_count(path: str) -> Optional[int]:
    with open(path, "r") as file:
        first = file.readline().split()
    if len(first) >= 3 and first[0] == "#" and first[1] == "nodes":
        try:
            return int(first[2])
        except ValueError:
            return None
    return None


def write_edge_list(graph: Graph, path: str):
    """Write each edge once as 'u v' (u < v), sorted, so files are byte-stable."""
    _ensure_parent(path)
    with open(path, "w") as file:
        file.write(f"# nodes {graph.node_count} edges {graph.edge_count}\n")
        for u, v in graph.edges():
            file.write(f"{u} {v}\n")


def read_membership(path: str, node_count: Optional[int] = None) -> Partition:
    """Read 'node_id community_id' lines into a Partition.

    Every node 0..n-1 must appear exactly once (n = node_count, or max id + 1).
    Community ids may be any token; they are relabelled densely.
    """
    labels: Dict[int, str] = {}
    for lineno, fields in _data_lines(path):
        if len(fields) != 2:
            raise FileFormatError(
                f"{path}:{lineno}: expected 'node_id community_id', got {len(fields)} fields"
            )
        try:
            node = int(fields[0])
        except ValueError:
            raise FileFormatError(f"{path}:{lineno}: node id '{fields[0]}' is not an integer")
        if node < 0:
            raise FileFormatError(f"{path}:{lineno}: negative node id {node}")
        if node in labels:
            raise FileFormatError(f"{path}:{lineno}: duplicate line for node {node}")
        labels[node] = fields[1]

    n = node_count if node_count is not None else (max(labels) + 1 if labels else 0)
    extra = [node for node in labels if node >= n]
    if extra:
        raise FileFormatError(f"{path}: node {min(extra)} is outside 0..{n - 1}")
    for node in range(n):
        if node not in labels:
            raise FileFormatError(f"{path}: missing membership for node {node}")
    return Partition.from_labels([labels[i] for i in range(n)])


def write_membership(partition: Partition, path: str):
    _ensure_parent(path)
    with open(path, "w") as file:
        for node, cid in enumerate(partition.membership):
            file.write(f"{node} {cid}\n")


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_json(data: Dict[str, Any], path: str):
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    _ensure_parent(path)
    with open(path, "w") as file:
        json.dump(to_builtin(data), file, indent=2, sort_keys=True)
        file.write("\n")


def read_json(path: str) -> Dict[str, Any]:
    with open(path, "r") as file:
        return json.load(file)


def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


class NetworkLoader:
    """Load and save network directories (edges + reference + metadata)."""

    def __init__(self, config_path: str = "config.yaml"):
        """Initialize loader with configuration."""
        self.config = self._load_config(config_path)
        data_config = self.config.get("data", {})
        self.edges_file = data_config.get("edges_file", EDGES_FILE)
        self.reference_file = data_config.get("reference_file", REFERENCE_FILE)
        self.metadata_file = data_config.get("metadata_file", METADATA_FILE)

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        if not os.path.exists(config_path):
            logger.warning(f"Config file {config_path} not found, using defaults")
            return {}
        with open(config_path, "r") as file:
            return yaml.safe_load(file) or {}

    def save_network(
        self,
        directory: str,
        graph: Graph,
        reference: Optional[Partition] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, str]:
        """Persist a network directory and return the written paths."""
        logger.info(f"Saving network to: {directory}")
        os.makedirs(directory, exist_ok=True)

        paths = {"edges": os.path.join(directory, self.edges_file)}
        write_edge_list(graph, paths["edges"])

        if reference is not None:
            paths["reference"] = os.path.join(directory, self.reference_file)
            write_membership(reference, paths["reference"])

        if metadata is not None:
            paths["metadata"] = os.path.join(directory, self.metadata_file)
            write_json(metadata, paths["metadata"])

        return paths

    def load_network(
        self, directory: str
    ) -> Tuple[Graph, Optional[Partition], Dict[str, Any]]:
        """Load a network directory written by `save_network`."""
        logger.info(f"Loading network from: {directory}")

        metadata_path = os.path.join(directory, self.metadata_file)
        metadata = read_json(metadata_path) if os.path.exists(metadata_path) else {}

        node_count = metadata.get("node_count")
        graph = read_edge_list(os.path.join(directory, self.edges_file), node_count)

        reference_path = os.path.join(directory, self.reference_file)
        reference = None
        if os.path.exists(reference_path):
            reference = read_membership(reference_path, graph.node_count)

        return graph, reference, metadata
