"""
LFR-style benchmark generator.

Pipeline: power-law degree sequence, configuration-model backbone, per-node
mixing targets (constant or bimodal), power-law community sizes, random
node-to-community assignment, then degree-preserving rewiring toward the
internal-degree targets.
"""

import logging
import os
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from data_loader import NetworkLoader
from graph_core import Graph
from partition import Partition
from power_law import DiscretePowerLaw

logger = logging.getLogger(__name__)


class ParameterError(ValueError):
    """Raised on invalid generator parameters."""


class DegreeSequenceError(ParameterError):
    """Raised when no degree sequence can reach the requested average."""


class CommunitySizeError(ParameterError):
    """Raised when community sizes cannot sum to n within their bounds."""


class ConfigurationModelError(RuntimeError):
    """Raised when stub matching cannot be repaired into a simple graph."""


class AssignmentError(RuntimeError):
    """Raised when nodes cannot be placed into communities large enough."""


@dataclass(frozen=True)
class ConstantMixing:
    """Classic LFR: every node wants the same fraction of external links."""

    mu: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError(f"Constant mixing must lie in [0, 1], got {self.mu}")

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "constant", "mu": self.mu}


@dataclass(frozen=True)
class BimodalMixing:
    """Half the nodes get mixing 0, the other half a normal draw truncated to [0, 1]."""

    mean: float = 0.5
    sd: float = 0.2

    def __post_init__(self):
        if self.sd < 0:
            raise ParameterError(f"Bimodal sd must be non-negative, got {self.sd}")

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "bimodal", "mean": self.mean, "sd": self.sd}


MixingMode = Union[ConstantMixing, BimodalMixing]


def mixing_from_dict(data: Dict[str, Any]) -> MixingMode:
    kind = data.get("kind", "bimodal")
    if kind == "constant":
        return ConstantMixing(float(data["mu"]))
    if kind == "bimodal":
        return BimodalMixing(float(data.get("mean", 0.5)), float(data.get("sd", 0.2)))
    raise ParameterError(f"Unknown mixing kind: {kind}")


@dataclass(frozen=True)
class LfrParams:
    n: int
    avg_degree: float
    max_degree: int
    gamma: float = 3.0
    beta: float = 2.0
    mixing: MixingMode = field(default_factory=BimodalMixing)
    seed: int = 0

    def __post_init__(self):
        if self.n < 10:
            raise ParameterError(f"n must be at least 10, got {self.n}")
        if self.gamma <= 2:
            raise ParameterError(f"Degree exponent gamma must exceed 2, got {self.gamma}")
        if not 1 <= self.beta <= 2:
            raise ParameterError(f"Size exponent beta must lie in [1, 2], got {self.beta}")
        if not 1 <= self.avg_degree <= self.max_degree < self.n:
            raise ParameterError(
                "Degrees must satisfy 1 <= avg_degree <= max_degree < n, got "
                f"avg_degree={self.avg_degree}, max_degree={self.max_degree}, n={self.n}"
            )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mixing"] = self.mixing.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LfrParams":
        data = dict(data)
        mixing = data.pop("mixing", None)
        if isinstance(mixing, dict):
            data["mixing"] = mixing_from_dict(mixing)
        elif mixing is not None:
            data["mixing"] = mixing
        return cls(**data)


REGIME_PRESETS: Dict[int, Tuple[int, float, int]] = {
    1: (7500, 10.0, 180),
    2: (25000, 11.0, 2850),
    3: (250000, 5.0, 7275),
}


def preset_params(
    row: int, seed: int = 0, mixing: Optional[MixingMode] = None
) -> LfrParams:
    """Generated regimes with gamma=3, beta=2 and bimodal mixing."""
    if row not in REGIME_PRESETS:
        raise ParameterError(f"Unknown preset row {row}; choose one of {sorted(REGIME_PRESETS)}")
    n, avg_degree, max_degree = REGIME_PRESETS[row]
    return LfrParams(
        n=n,
        avg_degree=avg_degree,
        max_degree=max_degree,
        gamma=3.0,
        beta=2.0,
        mixing=mixing if mixing is not None else BimodalMixing(),
        seed=seed,
    )


@dataclass
class GeneratorSettings:
    pin_max_degree: bool = True
    configuration_model_retries: int = 50
    size_draw_retries: int = 10
    rewire_move_factor: int = 200
    rewire_patience: int = 20
    rewire_tolerance: float = 0.05


@dataclass
class RewireResult:
    graph: Graph
    internal_degrees: np.ndarray
    deviation: float
    raw_deviation: float
    moves: int
    proposals: int
    unresolved_nodes: int
    converged: bool


@dataclass
class GeneratedNetwork:
    graph: Graph
    reference: Partition
    mixing_targets: np.ndarray
    internal_targets: np.ndarray
    realized_internal_degrees: np.ndarray
    metadata: Dict[str, Any]


def _python_rng(rng: np.random.Generator) -> random.Random:
    """Scalar-heavy loops run on a stdlib RNG seeded from the numpy stream."""
    return random.Random(int(rng.integers(0, 2**63 - 1)))


def _fix_parity(degrees: np.ndarray, k_min: int, k_max: int, rng: np.random.Generator):
    """Make the degree sum even by moving one degree by one, staying in range."""
    if int(degrees.sum()) % 2 == 0:
        return
    can_raise = np.flatnonzero(degrees < k_max)
    if len(can_raise):
        degrees[can_raise[rng.integers(len(can_raise))]] += 1
        return
    can_lower = np.flatnonzero(degrees > max(k_min, 1))
    if len(can_lower):
        degrees[can_lower[rng.integers(len(can_lower))]] -= 1
        return
    raise DegreeSequenceError("Cannot make the degree sum even within [k_min, k_max]")


def sample_powerlaw_degrees(
    params: LfrParams, rng: np.random.Generator, pin_max_degree: bool = True
) -> np.ndarray:
    """Draw n degrees from a discrete power law with exponent gamma.

    The lower cutoff is a mixture of two adjacent integers k_lo, k_lo+1 found by
    binary search, weighted so the expected degree equals avg_degree exactly.
    """
    n, target, k_max = params.n, float(params.avg_degree), int(params.max_degree)

    if np.isclose(target, k_max):
        degrees = np.full(n, k_max, dtype=np.int64)
        _fix_parity(degrees, k_max, k_max, rng)
        return degrees
    if target > k_max:
        raise DegreeSequenceError(f"avg_degree {target} exceeds max_degree {k_max}")

    laws: Dict[int, DiscretePowerLaw] = {}

    def law(k: int) -> DiscretePowerLaw:
        if k not in laws:
            laws[k] = DiscretePowerLaw(params.gamma, k, k_max)
        return laws[k]

    if law(1).mean > target:
        raise DegreeSequenceError(
            f"avg_degree {target} is below the smallest reachable mean {law(1).mean:.3f}"
        )

    lo, hi = 1, k_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if law(mid).mean <= target:
            lo = mid
        else:
            hi = mid
    low_mean, high_mean = law(lo).mean, law(hi).mean
    weight = 1.0 if high_mean == low_mean else (high_mean - target) / (high_mean - low_mean)

    use_low = rng.random(n) < weight
    degrees = np.empty(n, dtype=np.int64)
    degrees[use_low] = law(lo).draw(rng, int(use_low.sum()))
    degrees[~use_low] = law(hi).draw(rng, int((~use_low).sum()))

    if pin_max_degree:
        degrees[int(np.argmax(degrees))] = k_max
    _fix_parity(degrees, lo, k_max, rng)

    logger.debug(
        f"Degree cutoffs {lo}/{hi} with weight {weight:.3f}: "
        f"mean={degrees.mean():.3f} max={degrees.max()}"
    )
    return degrees


def _edge_key(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _repair_matching(
    edges: List[List[int]], n: int, py_rng: random.Random
) -> Optional[List[set]]:
    """Swap self-loops and duplicate edges away; None if the budget runs out."""
    multiplicity: Dict[Tuple[int, int], int] = {}
    bad: List[int] = []
    for idx, (u, v) in enumerate(edges):
        key = _edge_key(u, v)
        multiplicity[key] = multiplicity.get(key, 0) + 1
        if u == v or multiplicity[key] > 1:
            bad.append(idx)

    bad_set = set(bad)
    m = len(edges)
    budget = 100 * len(bad) + 1000
    while bad and budget > 0:
        budget -= 1
        i = bad[-1]
        j = py_rng.randrange(m)
        if j in bad_set:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if py_rng.random() < 0.5:
            c, d = d, c
        if a == c or b == d:
            continue
        first, second = _edge_key(a, c), _edge_key(b, d)
        if first == second or multiplicity.get(first) or multiplicity.get(second):
            continue
        multiplicity[_edge_key(a, b)] -= 1
        multiplicity[_edge_key(c, d)] -= 1
        multiplicity[first] = 1
        multiplicity[second] = 1
        edges[i] = [a, c]
        edges[j] = [b, d]
        bad.pop()
        bad_set.discard(i)

    if bad:
        return None
    return _edges_to_sets(edges, n)


def _edges_to_sets(edges: List[List[int]], n: int) -> List[set]:
    neighbor_sets: List[set] = [set() for _ in range(n)]
    for u, v in edges:
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    return neighbor_sets


def configuration_model(
    degrees: Sequence[int], rng: np.random.Generator, max_retries: int = 50
) -> Graph:
    """Random simple graph with exactly the given degree sequence.

    Stubs are paired at random; self-loops and multi-edges are removed by
    degree-preserving swaps with valid edges. A matching that cannot be
    repaired is redrawn, up to `max_retries` times.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    n = len(degrees)
    if np.any(degrees < 0):
        raise DegreeSequenceError("Degrees must be non-negative")
    if int(degrees.sum()) % 2:
        raise DegreeSequenceError("Degree sum must be even")
    if n and degrees.max() > n - 1:
        raise DegreeSequenceError(f"Degree {degrees.max()} cannot fit in {n} nodes")

    py_rng = _python_rng(rng)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    for attempt in range(1, max_retries + 1):
        edges = rng.permutation(stubs).reshape(-1, 2).tolist()
        neighbor_sets = _repair_matching(edges, n, py_rng)
        if neighbor_sets is not None:
            graph = Graph.from_neighbor_sets(neighbor_sets)
            logger.debug(f"Configuration model built {graph} on attempt {attempt}")
            return graph
        logger.debug(f"Stub matching attempt {attempt} could not be repaired")

    raise ConfigurationModelError(
        f"Could not realize a simple graph after {max_retries} stub matchings"
    )


def sample_mixing_coefficients(
    n: int, mode: MixingMode, rng: np.random.Generator
) -> np.ndarray:
    """Per-node mixing targets mu_i."""
    if isinstance(mode, ConstantMixing):
        return np.full(n, float(mode.mu))

    mixing = np.zeros(n, dtype=np.float64)
    zero_nodes = rng.choice(n, size=n // 2, replace=False)
    drawn = np.ones(n, dtype=bool)
    drawn[zero_nodes] = False
    idx = np.flatnonzero(drawn)

    values = rng.normal(mode.mean, mode.sd, size=len(idx))
    for _ in range(1000):
        outside = (values < 0.0) | (values > 1.0)
        if not outside.any():
            break
        values[outside] = rng.normal(mode.mean, mode.sd, size=int(outside.sum()))
    mixing[idx] = np.clip(values, 0.0, 1.0)
    return mixing


def internal_degree_targets(degrees: np.ndarray, mixing: np.ndarray) -> np.ndarray:
    """k_int = round((1 - mu) k), halves rounded up, clamped to [0, k]."""
    degrees = np.asarray(degrees, dtype=np.int64)
    raw = np.floor((1.0 - np.asarray(mixing)) * degrees + 0.5).astype(np.int64)
    return np.clip(raw, 0, degrees)


def assignment_feasible(sizes: Sequence[int], internal_degrees: Sequence[int]) -> bool:
    """True when every node can get a seat in a community of size >= k_int + 1.

    Checked per threshold r: nodes needing >= r never outnumber the seats in
    communities of size >= r.
    """
    sizes_sorted = np.sort(np.asarray(sizes, dtype=np.int64))
    seats_from = np.concatenate([np.cumsum(sizes_sorted[::-1])[::-1], [0]])
    requirements = np.sort(np.asarray(internal_degrees, dtype=np.int64) + 1)
    for r in np.unique(requirements):
        needing = len(requirements) - np.searchsorted(requirements, r, side="left")
        seats = seats_from[np.searchsorted(sizes_sorted, r, side="left")]
        if needing > seats:
            return False
    return True


def _draw_sizes(
    n: int,
    law: DiscretePowerLaw,
    rng: np.random.Generator,
    fixed: Sequence[int] = (),
    max_attempts: int = 1000,
) -> Optional[List[int]]:
    """Draw sizes until they cover n, then fit the last one to the residual.

    A residual below the lower bound drops the last two draws and continues.
    """
    sizes = list(fixed)
    total = sum(sizes)
    if total > n:
        return None
    for _ in range(max_attempts):
        while total < n:
            size = law.draw_one(rng)
            sizes.append(size)
            total += size
        residual = n - (total - sizes[-1])
        if len(sizes) > len(fixed) and residual >= law.x_min:
            sizes[-1] = residual
            return sizes
        if len(sizes) == len(fixed) and total == n:
            return sizes
        for _ in range(2):
            if len(sizes) > len(fixed):
                total -= sizes.pop()
    return None


def community_size_bounds(
    params: LfrParams, internal_degrees: Optional[np.ndarray] = None
) -> Tuple[int, int]:
    """Initial (s_min, s_max): s_min = max(2, min k_int + 1), s_max = max(k_max, max k_int + 1)."""
    s_min, s_max = 2, int(params.max_degree)
    if internal_degrees is not None and len(internal_degrees):
        s_min = max(2, int(np.min(internal_degrees)) + 1)
        s_max = max(s_max, int(np.max(internal_degrees)) + 1)
    return s_min, min(s_max, params.n)


def sample_community_sizes(
    params: LfrParams,
    rng: np.random.Generator,
    internal_degrees: Optional[np.ndarray] = None,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    draw_retries: int = 10,
) -> Tuple[List[int], Tuple[int, int]]:
    """Power-law community sizes (exponent beta) summing to exactly n.

    With `internal_degrees`, the lower bound is raised until the sizes can host
    every node (see `assignment_feasible`), and the largest community is made
    big enough for the highest internal degree. Returns (sizes, (s_min, s_max)).
    """
    n = params.n
    default_min, default_max = community_size_bounds(params, internal_degrees)
    s_min = default_min if s_min is None else int(s_min)
    s_max = default_max if s_max is None else int(s_max)
    if s_min > n:
        raise CommunitySizeError(f"Minimum community size {s_min} exceeds n={n}")
    if s_max < s_min:
        raise CommunitySizeError(f"Size bounds are empty: [{s_min}, {s_max}]")
    if (n + s_max - 1) // s_max > n // s_min:
        raise CommunitySizeError(f"No count of sizes in [{s_min}, {s_max}] sums to {n}")

    largest_needed = 0
    if internal_degrees is not None and len(internal_degrees):
        largest_needed = int(np.max(internal_degrees)) + 1

    for lower in range(s_min, s_max + 1):
        law = DiscretePowerLaw(params.beta, lower, s_max)
        for _ in range(draw_retries):
            sizes = _draw_sizes(n, law, rng)
            if sizes is not None and max(sizes) < largest_needed:
                sizes = _draw_sizes(n, law, rng, fixed=[largest_needed])
            if sizes is None:
                continue
            if internal_degrees is None or assignment_feasible(sizes, internal_degrees):
                logger.debug(
                    f"Drew {len(sizes)} communities in [{lower}, {s_max}], "
                    f"largest {max(sizes)}"
                )
                return sizes, (lower, s_max)
        if internal_degrees is None:
            break
        logger.debug(f"Sizes with lower bound {lower} cannot host the internal degrees")

    raise CommunitySizeError(
        f"Could not draw community sizes for n={n} within [{s_min}, {s_max}]"
    )


class _SeatTree:
    """Fenwick tree of free seats over communities sorted by decreasing size."""

    def __init__(self, seats: Sequence[int]):
        self.size = len(seats)
        self.tree = [0] * (self.size + 1)
        for index, count in enumerate(seats):
            self.add(index, int(count))

    def add(self, index: int, delta: int):
        index += 1
        while index <= self.size:
            self.tree[index] += delta
            index += index & -index

    def prefix(self, count: int) -> int:
        """Free seats in the first `count` communities."""
        total = 0
        while count > 0:
            total += self.tree[count]
            count -= count & -count
        return total

    def find(self, seat: int) -> int:
        """Index of the community holding the seat-th free seat (0-based)."""
        index, step = 0, 1 << self.size.bit_length()
        while step:
            nxt = index + step
            if nxt <= self.size and self.tree[nxt] <= seat:
                index = nxt
                seat -= self.tree[nxt]
            step >>= 1
        return index


def assign_nodes(
    sizes: Sequence[int],
    internal_degrees: Sequence[int],
    rng: np.random.Generator,
) -> Partition:
    """Place nodes into communities of size >= k_int + 1.

    Nodes go in decreasing k_int order (random among equal k_int), each to a
    uniformly drawn free seat among the communities large enough for it.
    Every node placed earlier needs at least as much, so a free seat exists
    whenever `assignment_feasible(sizes, internal_degrees)` holds.
    """
    sizes = [int(s) for s in sizes]
    requirements = np.asarray(internal_degrees, dtype=np.int64) + 1
    n = len(requirements)
    if sum(sizes) != n:
        raise ParameterError(f"Community sizes sum to {sum(sizes)}, expected {n}")
    if n == 0:
        return Partition(())
    if requirements.max() > max(sizes):
        raise AssignmentError(
            f"A node needs a community of size {requirements.max()}, largest is {max(sizes)}"
        )

    order = sorted(range(len(sizes)), key=lambda c: -sizes[c])
    sorted_sizes = np.asarray([sizes[c] for c in order], dtype=np.int64)
    reach_of = {
        int(r): int(np.searchsorted(-sorted_sizes, -r, side="right"))
        for r in np.unique(requirements)
    }
    seats = _SeatTree(sorted_sizes)

    shuffled = rng.permutation(n)
    queue = shuffled[np.argsort(-requirements[shuffled], kind="stable")]
    membership = [0] * n
    for node in queue.tolist():
        reach = reach_of[int(requirements[node])]
        free = seats.prefix(reach)
        if free == 0:
            raise AssignmentError(
                f"No free seat for node {node} needing a community of size "
                f"{int(requirements[node])}"
            )
        slot = seats.find(int(rng.integers(free)))
        seats.add(slot, -1)
        membership[node] = order[slot]

    logger.debug(f"Assigned {n} nodes to {len(sizes)} communities")
    return Partition(tuple(membership))


def even_community_targets(
    internal_targets: np.ndarray,
    degrees: np.ndarray,
    reference: Partition,
    rng: np.random.Generator,
) -> np.ndarray:
    """Make each community's target sum even by moving one member by one.

    A member with room (target below both its degree and the community size
    minus one) is raised; otherwise a member with a positive target is lowered.
    """
    targets = np.asarray(internal_targets, dtype=np.int64).copy()
    py_rng = _python_rng(rng)
    for group in reference.communities:
        if int(targets[group].sum()) % 2 == 0:
            continue
        cap = len(group) - 1
        raisable = [i for i in group if targets[i] < min(degrees[i], cap)]
        if raisable:
            targets[py_rng.choice(raisable)] += 1
            continue
        lowerable = [i for i in group if targets[i] > 0]
        targets[py_rng.choice(lowerable)] -= 1
    return targets


class _IndexedSet:
    """Set with O(1) insert, delete and uniform random choice."""

    def __init__(self):
        self._items: List[int] = []
        self._pos: Dict[int, int] = {}

    def add(self, item: int):
        if item not in self._pos:
            self._pos[item] = len(self._items)
            self._items.append(item)

    def discard(self, item: int):
        pos = self._pos.pop(item, None)
        if pos is None:
            return
        last = self._items.pop()
        if pos < len(self._items):
            self._items[pos] = last
            self._pos[last] = pos

    def choice(self, py_rng: random.Random) -> int:
        return self._items[py_rng.randrange(len(self._items))]

    def __len__(self) -> int:
        return len(self._items)


class _Rewirer:
    """Mutable adjacency state for targeted double-edge swaps."""

    def __init__(
        self,
        g: Graph,
        membership: Sequence[int],
        targets: np.ndarray,
        py_rng: random.Random,
    ):
        self.rng = py_rng
        self.membership = list(membership)
        self.nbr_list: List[List[int]] = [list(nbrs) for nbrs in g.adjacency]
        self.nbr_pos: List[Dict[int, int]] = [
            {v: i for i, v in enumerate(nbrs)} for nbrs in self.nbr_list
        ]
        self.targets = [int(t) for t in targets]
        self.kint = [
            sum(1 for v in nbrs if self.membership[v] == self.membership[u])
            for u, nbrs in enumerate(self.nbr_list)
        ]
        self.communities: Dict[int, List[int]] = {}
        for node, community in enumerate(self.membership):
            self.communities.setdefault(community, []).append(node)
        self.n = g.node_count
        self.unhappy = _IndexedSet()
        for node in range(self.n):
            if self.kint[node] != self.targets[node]:
                self.unhappy.add(node)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbr_pos[u]

    def _remove(self, u: int, v: int):
        for x, y in ((u, v), (v, u)):
            pos = self.nbr_pos[x].pop(y)
            last = self.nbr_list[x].pop()
            if pos < len(self.nbr_list[x]):
                self.nbr_list[x][pos] = last
                self.nbr_pos[x][last] = pos

    def _add(self, u: int, v: int):
        for x, y in ((u, v), (v, u)):
            self.nbr_pos[x][y] = len(self.nbr_list[x])
            self.nbr_list[x].append(y)

    def _random_neighbor(self, u: int, internal: bool, tries: int = 8) -> Optional[int]:
        nbrs = self.nbr_list[u]
        if not nbrs:
            return None
        home = self.membership[u]
        for _ in range(tries):
            v = nbrs[self.rng.randrange(len(nbrs))]
            if (self.membership[v] == home) == internal:
                return v
        return None

    def _propose(self, a: int) -> Optional[Tuple[int, int, int, int]]:
        """Swap (a,b),(c,d) -> (a,c),(b,d) aimed at a's internal-degree gap."""
        home = self.membership[a]
        if self.kint[a] < self.targets[a]:
            b = self._random_neighbor(a, internal=False)
            group = self.communities[home]
            c = group[self.rng.randrange(len(group))]
        else:
            b = self._random_neighbor(a, internal=True)
            c = self.rng.randrange(self.n)
            if self.membership[c] == home:
                return None
        if b is None or c == a or c == b or self.has_edge(a, c):
            return None
        c_nbrs = self.nbr_list[c]
        if not c_nbrs:
            return None
        d = c_nbrs[self.rng.randrange(len(c_nbrs))]
        if d in (a, b) or self.has_edge(b, d):
            return None
        return a, b, c, d

    def _delta(self, a: int, b: int, c: int, d: int) -> Tuple[int, Dict[int, int]]:
        memb = self.membership
        change: Dict[int, int] = {}
        for (x, y), sign in (((a, b), -1), ((c, d), -1), ((a, c), 1), ((b, d), 1)):
            if memb[x] == memb[y]:
                change[x] = change.get(x, 0) + sign
                change[y] = change.get(y, 0) + sign
        delta = 0
        for node, shift in change.items():
            gap = self.kint[node] - self.targets[node]
            delta += abs(gap + shift) - abs(gap)
        return delta, change

    def _apply(self, a: int, b: int, c: int, d: int, change: Dict[int, int]):
        self._remove(a, b)
        self._remove(c, d)
        self._add(a, c)
        self._add(b, d)
        for node, shift in change.items():
            self.kint[node] += shift
            if self.kint[node] == self.targets[node]:
                self.unhappy.discard(node)
            else:
                self.unhappy.add(node)

    def run(self, max_proposals: int, patience: int) -> Tuple[int, int]:
        moves = proposals = stale = 0
        while len(self.unhappy) and proposals < max_proposals and stale < patience:
            proposals += 1
            a = self.unhappy.choice(self.rng)
            swap = self._propose(a)
            if swap is None:
                stale += 1
                continue
            delta, change = self._delta(*swap)
            if delta < 0:
                self._apply(*swap, change)
                moves += 1
                stale = 0
            else:
                stale += 1
        return moves, proposals

    def graph(self) -> Graph:
        return Graph.from_neighbor_sets(self.nbr_list)


def mixing_deviation(
    degrees: np.ndarray, realized_internal: np.ndarray, target: np.ndarray, quantized: bool
) -> float:
    """Mean |realized - target| mixing over nodes with positive degree.

    `quantized=True` compares internal degrees with integer targets (scaled by
    k); otherwise `target` holds the continuous mu_i.
    """
    degrees = np.asarray(degrees, dtype=np.float64)
    mask = degrees > 0
    if not mask.any():
        return 0.0
    realized = np.asarray(realized_internal, dtype=np.float64)[mask]
    k = degrees[mask]
    if quantized:
        gap = np.abs(realized - np.asarray(target, dtype=np.float64)[mask]) / k
    else:
        gap = np.abs((k - realized) / k - np.asarray(target, dtype=np.float64)[mask])
    return float(gap.mean())


def rewire_to_mixing(
    g: Graph,
    p: Partition,
    mixing_targets: np.ndarray,
    rng: np.random.Generator,
    internal_targets: Optional[np.ndarray] = None,
    move_factor: int = 200,
    patience_factor: int = 20,
    tolerance: float = 0.05,
) -> RewireResult:
    """Degree-preserving swaps that move each node's internal degree toward its target.

    A swap is kept only when the total |k_int - target| strictly drops and the
    graph stays simple. Stops when every node is satisfied, after
    move_factor * m proposals, or after patience_factor * m proposals in a row
    without improvement.
    """
    if p.node_count != g.node_count:
        raise ParameterError(
            f"Partition covers {p.node_count} nodes, graph has {g.node_count}"
        )
    degrees = g.degrees()
    if internal_targets is None:
        internal_targets = internal_degree_targets(degrees, mixing_targets)

    rewirer = _Rewirer(g, p.membership, internal_targets, _python_rng(rng))
    m = max(g.edge_count, 1)
    moves, proposals = rewirer.run(move_factor * m, patience_factor * m)

    graph = rewirer.graph() if moves else g
    realized = np.asarray(rewirer.kint, dtype=np.int64)
    deviation = mixing_deviation(degrees, realized, internal_targets, quantized=True)
    raw_deviation = mixing_deviation(degrees, realized, mixing_targets, quantized=False)
    converged = deviation <= tolerance
    if not converged:
        logger.warning(
            f"Rewiring stopped at mixing deviation {deviation:.4f} "
            f"(tolerance {tolerance}) with {len(rewirer.unhappy)} nodes off target"
        )
    logger.info(
        f"Rewiring: {moves} swaps over {proposals} proposals, deviation {deviation:.4f}"
    )
    return RewireResult(
        graph=graph,
        internal_degrees=realized,
        deviation=deviation,
        raw_deviation=raw_deviation,
        moves=moves,
        proposals=proposals,
        unresolved_nodes=len(rewirer.unhappy),
        converged=converged,
    )


def generate_lfr(
    params: LfrParams, settings: Optional[GeneratorSettings] = None
) -> GeneratedNetwork:
    """Run the whole pipeline; the same params (seed included) give the same network."""
    settings = settings or GeneratorSettings()
    rng = np.random.default_rng(params.seed)
    logger.info(f"Generating LFR network: n={params.n}, seed={params.seed}")

    try:
        degrees = sample_powerlaw_degrees(params, rng, settings.pin_max_degree)
        backbone = configuration_model(degrees, rng, settings.configuration_model_retries)
        mixing = sample_mixing_coefficients(params.n, params.mixing, rng)
        internal = internal_degree_targets(degrees, mixing)

        reference, bounds, feasible = _place_nodes(params, internal, rng, settings)
        targets = even_community_targets(internal, degrees, reference, rng)
        rewired = rewire_to_mixing(
            backbone,
            reference,
            mixing,
            rng,
            internal_targets=targets,
            move_factor=settings.rewire_move_factor,
            patience_factor=settings.rewire_patience,
            tolerance=settings.rewire_tolerance,
        )
    except Exception as e:
        logger.error(f"Error generating network (seed={params.seed}): {e}")
        raise

    graph = rewired.graph
    realized_degrees = graph.degrees()
    sizes = reference.sizes()
    metadata = {
        "params": params.to_dict(),
        "seed": params.seed,
        "node_count": graph.node_count,
        "edge_count": graph.edge_count,
        "achieved_mean_degree": float(realized_degrees.mean()),
        "achieved_max_degree": int(realized_degrees.max()),
        "mixing_deviation": rewired.deviation,
        "raw_mixing_deviation": rewired.raw_deviation,
        "rewire_moves": rewired.moves,
        "rewire_proposals": rewired.proposals,
        "unresolved_nodes": rewired.unresolved_nodes,
        "converged": rewired.converged,
        "community_count": reference.community_count,
        "community_size_bounds": list(bounds),
        "smallest_community": int(sizes.min()),
        "largest_community": int(sizes.max()),
        "assignment_feasible": feasible,
    }
    logger.info(
        f"Generated {graph} with {reference.community_count} communities "
        f"(mean degree {metadata['achieved_mean_degree']:.2f})"
    )
    return GeneratedNetwork(
        graph=graph,
        reference=reference,
        mixing_targets=mixing,
        internal_targets=targets,
        realized_internal_degrees=rewired.internal_degrees,
        metadata=metadata,
    )


def _place_nodes(
    params: LfrParams,
    internal: np.ndarray,
    rng: np.random.Generator,
    settings: GeneratorSettings,
) -> Tuple[Partition, Tuple[int, int], bool]:
    """Draw sizes and assign nodes; a failed assignment redraws the sizes.

    Returns (reference, size bounds, whether the drawn sizes passed
    `assignment_feasible`).
    """
    for draw in range(1, settings.size_draw_retries + 1):
        sizes, bounds = sample_community_sizes(
            params, rng, internal_degrees=internal, draw_retries=settings.size_draw_retries
        )
        feasible = assignment_feasible(sizes, internal)
        try:
            return assign_nodes(sizes, internal, rng), bounds, feasible
        except AssignmentError as e:
            logger.warning(f"Redrawing community sizes after failed assignment (draw {draw}): {e}")
    raise AssignmentError(
        f"No feasible assignment after {settings.size_draw_retries} size draws"
    )


class LfrGenerator:
    """Config-driven front end over `generate_lfr`."""

    def __init__(self, config_path: str = "config.yaml"):
        """Initialize generator with configuration."""
        self.config_path = config_path
        self.config = self._load_config(config_path)
        self.settings = GeneratorSettings(
            pin_max_degree=bool(self.config.get("pin_max_degree", True)),
            configuration_model_retries=int(self.config.get("configuration_model_retries", 50)),
            size_draw_retries=int(self.config.get("size_draw_retries", 10)),
            rewire_move_factor=int(self.config.get("rewire_move_factor", 200)),
            rewire_patience=int(self.config.get("rewire_patience", 20)),
            rewire_tolerance=float(self.config.get("rewire_tolerance", 0.05)),
        )

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Load the generator section of the YAML configuration."""
        if not os.path.exists(config_path):
            logger.warning(f"Config file {config_path} not found, using defaults")
            return {}
        with open(config_path, "r") as file:
            return (yaml.safe_load(file) or {}).get("generator", {}) or {}

    def default_mixing(self) -> BimodalMixing:
        return BimodalMixing(
            float(self.config.get("bimodal_mean", 0.5)),
            float(self.config.get("bimodal_sd", 0.2)),
        )

    def generate(self, params: LfrParams) -> GeneratedNetwork:
        return generate_lfr(params, self.settings)

    def save(self, network: GeneratedNetwork, directory: str) -> Dict[str, str]:
        """Write network.edges, reference.membership and network.meta.json."""
        loader = NetworkLoader(self.config_path)
        return loader.save_network(
            directory, network.graph, network.reference, network.metadata
        )
