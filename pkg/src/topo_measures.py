"""
Community-oriented topological measures.

Per node: embeddedness. Per community: size, scaled density, internal
transitivity, average distance and hub dominance. Profiles are turned into
comparable curves by averaging over logarithmic bins of community size.
"""

import logging
import math
import os
from dataclasses import asdict, dataclass
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import pandas as pd
import yaml

from graph_core import Graph, connected_components, distance_rows, induced_subgraph
from partition import Partition
from power_law import PowerLawFit, PowerLawFitError, fit_power_law

logger = logging.getLogger(__name__)

CURVE_PROPERTIES = (
    "size",
    "scaled_density",
    "internal_transitivity",
    "average_distance",
    "hub_dominance",
)
TRANSITIVITY_MODES = ("zero", "exclude")
_BIN_EPS = 1e-9
_DISTANCE_CHUNK = 256


class TopologyError(ValueError):
    """Raised when a per-community measure is undefined (e.g. singletons)."""


@dataclass(frozen=True)
class NodeEmbeddedness:
    node: int
    k_int: int
    k_ext: int
    e: float


@dataclass
class CommunityProfile:
    community_id: int
    size: int
    internal_edges: int
    scaled_density: float
    internal_transitivity: float
    average_distance: float
    hub_dominance: float
    disconnected: bool
    distance_sampled: bool = False

    @property
    def singleton(self) -> bool:
        return self.size < 2

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class BinnedSeries:
    property: str
    source: str
    bin_low: np.ndarray
    bin_high: np.ndarray
    mean: np.ndarray
    count: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        return self.count == 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "bin_low": self.bin_low,
                "bin_high": self.bin_high,
                "mean": self.mean,
                "count": self.count,
                "property": self.property,
                "source": self.source,
            }
        )


class AverageDistance(NamedTuple):
    value: float
    disconnected: bool
    sampled: bool


def internal_degrees(g: Graph, p: Partition) -> np.ndarray:
    membership = p.membership
    return np.fromiter(
        (
            sum(1 for v in nbrs if membership[v] == membership[u])
            for u, nbrs in enumerate(g.adjacency)
        ),
        dtype=np.int64,
        count=g.node_count,
    )


def embeddedness(g: Graph, p: Partition) -> List[NodeEmbeddedness]:
    """e = k_int / k per node; isolated nodes are left out."""
    if p.node_count != g.node_count:
        raise TopologyError(f"Partition covers {p.node_count} nodes, graph has {g.node_count}")
    k_int = internal_degrees(g, p)
    degrees = g.degrees()
    return [
        NodeEmbeddedness(
            node,
            int(k_int[node]),
            int(degrees[node] - k_int[node]),
            k_int[node] / degrees[node],
        )
        for node in range(g.node_count)
        if degrees[node] > 0
    ]


def embeddedness_histogram(
    values: Iterable[float], bins: int = 10
) -> Tuple[np.ndarray, np.ndarray]:
    """(counts, edges) over [0, 1]; e = 1 falls in the last bin."""
    samples = np.fromiter(values, dtype=np.float64)
    counts, edges = np.histogram(samples, bins=bins, range=(0.0, 1.0))
    return counts, edges


def community_sizes(p: Partition) -> List[int]:
    return sorted(int(s) for s in p.sizes())


def scaled_density(community_size: int, internal_edges: int) -> float:
    """2 m_C / (n_C - 1): 2 for a tree, n_C for a clique."""
    if community_size < 2:
        raise TopologyError("Scaled density is undefined for singleton communities")
    return 2.0 * internal_edges / (community_size - 1)


def _transitivity_of(sub: Graph, mode: str) -> float:
    if mode not in TRANSITIVITY_MODES:
        raise TopologyError(f"Unknown transitivity mode '{mode}', use one of {TRANSITIVITY_MODES}")
    adjacency = sub.csr
    closed = np.asarray((adjacency @ adjacency).multiply(adjacency).sum(axis=1)).ravel() / 2.0
    k = sub.degrees().astype(np.float64)
    defined = k >= 2
    local = np.zeros(sub.node_count)
    local[defined] = 2.0 * closed[defined] / (k[defined] * (k[defined] - 1.0))
    if mode == "exclude":
        return float(local[defined].mean()) if defined.any() else 0.0
    return float(local.mean())


def internal_transitivity(g: Graph, community: Iterable[int], mode: str = "zero") -> float:
    """Mean local clustering inside the community.

    Members with fewer than two internal neighbors count as 0 ("zero") or are
    left out of the mean ("exclude").
    """
    sub, _ = induced_subgraph(g, community)
    return _transitivity_of(sub, mode)


def _average_distance_of(
    sub: Graph, source_cap: Optional[int], rng: np.random.Generator
) -> AverageDistance:
    n = sub.node_count
    if n < 2:
        raise TopologyError("Average distance needs at least two nodes")
    disconnected = connected_components(sub).community_count > 1
    sampled = source_cap is not None and n > source_cap
    sources = np.sort(rng.choice(n, size=source_cap, replace=False)) if sampled else np.arange(n)

    total = 0.0
    pairs = 0
    for start in range(0, len(sources), _DISTANCE_CHUNK):
        rows = distance_rows(sub, sources[start:start + _DISTANCE_CHUNK])
        reachable = rows > 0
        total += float(rows[reachable].sum())
        pairs += int(reachable.sum())
    value = total / pairs if pairs else math.nan
    return AverageDistance(value, disconnected, sampled)


def average_distance(
    g: Graph,
    community: Iterable[int],
    source_cap: Optional[int] = None,
    seed: int = 0,
) -> AverageDistance:
    """Mean hop distance over connected member pairs of the induced subgraph.

    `disconnected` is set when some pair is unreachable. Above `source_cap`
    members, distances are averaged from a seeded sample of sources.
    """
    sub, _ = induced_subgraph(g, community)
    return _average_distance_of(sub, source_cap, np.random.default_rng(seed))


def _hub_dominance_of(sub: Graph) -> float:
    if sub.node_count < 2:
        raise TopologyError("Hub dominance is undefined for singleton communities")
    return float(sub.degrees().max()) / (sub.node_count - 1)


def hub_dominance(g: Graph, community: Iterable[int]) -> float:
    """Largest internal degree over n_C - 1."""
    sub, _ = induced_subgraph(g, community)
    return _hub_dominance_of(sub)


def profile_communities(
    g: Graph,
    p: Partition,
    transitivity_mode: str = "zero",
    distance_source_cap: Optional[int] = None,
    seed: int = 0,
) -> List[CommunityProfile]:
    """One profile per community; singletons get NaN properties."""
    if p.node_count != g.node_count:
        raise TopologyError(f"Partition covers {p.node_count} nodes, graph has {g.node_count}")
    rng = np.random.default_rng(seed)
    profiles = []
    for cid, members in enumerate(p.communities):
        if len(members) < 2:
            profiles.append(
                CommunityProfile(
                    cid, len(members), 0, math.nan, math.nan, math.nan, math.nan, False
                )
            )
            continue
        sub, _ = induced_subgraph(g, members)
        distance = _average_distance_of(sub, distance_source_cap, rng)
        profiles.append(
            CommunityProfile(
                community_id=cid,
                size=sub.node_count,
                internal_edges=sub.edge_count,
                scaled_density=scaled_density(sub.node_count, sub.edge_count),
                internal_transitivity=_transitivity_of(sub, transitivity_mode),
                average_distance=distance.value,
                hub_dominance=_hub_dominance_of(sub),
                disconnected=distance.disconnected,
                distance_sampled=distance.sampled,
            )
        )
    logger.debug(f"Profiled {len(profiles)} communities")
    return profiles


def _log_bin(size: float, bins_per_decade: int) -> int:
    return math.floor(math.log10(size) * bins_per_decade + _BIN_EPS)


def bin_by_size(
    profiles: Sequence[CommunityProfile],
    selector: Union[str, Callable[[CommunityProfile], float]],
    bins_per_decade: int = 5,
    source: str = "reference",
    include_singletons: bool = False,
) -> BinnedSeries:
    """Per-bin mean of a property over logarithmic bins of community size.

    Bins span the smallest to the largest size; empty bins stay in the series
    with count 0 and a NaN mean. NaN property values are skipped.
    """
    if bins_per_decade < 1:
        raise TopologyError(f"bins_per_decade must be >= 1, got {bins_per_decade}")
    name = selector if isinstance(selector, str) else getattr(selector, "__name__", "property")
    getter = (lambda prof: getattr(prof, selector)) if isinstance(selector, str) else selector

    kept = [prof for prof in profiles if include_singletons or not prof.singleton]
    if not kept:
        raise TopologyError("No non-singleton community to bin")

    first = _log_bin(min(prof.size for prof in kept), bins_per_decade)
    last = _log_bin(max(prof.size for prof in kept), bins_per_decade)
    bin_count = last - first + 1
    sums = np.zeros(bin_count)
    counts = np.zeros(bin_count, dtype=np.int64)
    for prof in kept:
        value = float(getter(prof))
        if math.isnan(value):
            continue
        idx = _log_bin(prof.size, bins_per_decade) - first
        sums[idx] += value
        counts[idx] += 1

    exponents = np.arange(first, last + 2) / bins_per_decade
    edges = np.power(10.0, exponents)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return BinnedSeries(name, source, edges[:-1], edges[1:], means, counts)


class TopologyProfiler:
    """Config-driven profiling, binning, curve export and size-distribution fits."""

    def __init__(self, config_path: str = "config.yaml"):
        """Initialize profiler with configuration."""
        config = self._load_config(config_path)
        topology = config.get("topology", {}) or {}
        power_law = config.get("power_law", {}) or {}
        self.transitivity_mode = topology.get("transitivity_mode", "zero")
        self.bins_per_decade = int(topology.get("bins_per_decade", 5))
        self.distance_source_cap = topology.get("distance_source_cap", 2000)
        self.embeddedness_bins = int(topology.get("embeddedness_bins", 10))
        self.replicates = int(power_law.get("replicates", 100))
        self.min_tail = int(power_law.get("min_tail", 20))
        self.rejection_threshold = float(power_law.get("rejection_threshold", 0.001))

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        if not os.path.exists(config_path):
            logger.warning(f"Config file {config_path} not found, using defaults")
            return {}
        with open(config_path, "r") as file:
            return yaml.safe_load(file) or {}

    def profile(self, g: Graph, p: Partition, seed: int = 0) -> List[CommunityProfile]:
        return profile_communities(
            g,
            p,
            transitivity_mode=self.transitivity_mode,
            distance_source_cap=self.distance_source_cap,
            seed=seed,
        )

    def curves(self, profiles: Sequence[CommunityProfile], source: str) -> Dict[str, BinnedSeries]:
        """One binned series per property; empty when every community is a singleton."""
        if all(prof.singleton for prof in profiles):
            logger.warning(f"All communities of '{source}' are singletons; no curves")
            return {}
        series = {}
        for name in CURVE_PROPERTIES:
            series[name] = bin_by_size(
                profiles,
                name,
                self.bins_per_decade,
                source=source,
                include_singletons=(name == "size"),
            )
        return series

    def embeddedness_summary(self, g: Graph, p: Partition, source: str) -> pd.DataFrame:
        counts, edges = embeddedness_histogram(
            (node.e for node in embeddedness(g, p)), self.embeddedness_bins
        )
        return pd.DataFrame(
            {"bin_low": edges[:-1], "bin_high": edges[1:], "count": counts, "source": source}
        )

    def fit_sizes(self, p: Partition, seed: int = 0) -> Dict[str, Any]:
        """Power-law fit of the community sizes as a flat record.

        Fits that cannot be computed are reported with reliable=False.
        """
        sizes = community_sizes(p)
        record: Dict[str, Any] = {"community_count": len(sizes), "largest": max(sizes, default=0)}
        try:
            fit: PowerLawFit = fit_power_law(
                sizes, replicates=self.replicates, min_tail=self.min_tail, seed=seed
            )
        except PowerLawFitError as e:
            logger.warning(f"Community-size power-law fit unreliable: {e}")
            record.update(
                exponent=None, x_min=None, ks_distance=None, p_value=None,
                tail_count=None, reliable=False, rejected=None,
            )
            return record
        record.update(
            exponent=fit.exponent,
            x_min=fit.x_min,
            ks_distance=fit.ks_distance,
            p_value=fit.p_value,
            tail_count=fit.tail_count,
            reliable=True,
            rejected=fit.rejected(self.rejection_threshold),
        )
        return record

    def write_curves(self, series: Iterable[BinnedSeries], directory: str) -> List[str]:
        return write_curves(series, directory)


def write_curves(series: Iterable[BinnedSeries], directory: str) -> List[str]:
    """One CSV per (property, source), named '{property}__{source}.csv'."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for item in series:
        path = os.path.join(directory, f"{item.property}__{item.source}.csv")
        item.to_frame().to_csv(path, index=False, float_format="%.12g")
        paths.append(path)
    logger.info(f"Wrote {len(paths)} curve files to {directory}")
    return paths
