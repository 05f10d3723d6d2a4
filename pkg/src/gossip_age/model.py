"""Domain types for clustered gossip networks.

A single source holds a versioned piece of information and pushes updates,
via dedicated cluster heads, into ``m`` clusters of ``k`` gossiping nodes
each (``n = m*k``).  Everything here is immutable after construction and
safe to share across threads.

Node labeling convention: nodes within a cluster are indexed ``0..k-1``
and ring neighbors of node ``i`` are ``(i +/- 1) mod k``.  Globally,
cluster ``c`` owns node indices ``c*k .. (c+1)*k - 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration: bad rates, layout, topology, or file schema."""


class PreconditionError(ValueError):
    """A numerical precondition was violated (degenerate or out-of-range input)."""


class Topology(Enum):
    """Intra-cluster connectivity pattern."""

    DISCONNECTED = "disconnected"
    UNI_RING = "uniring"
    BI_RING = "biring"
    FULLY_CONNECTED = "full"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name: str) -> "Topology":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise ConfigError(f"topology: unknown value {name!r} (expected one of: {valid})") from None


class Method(Enum):
    """Provenance tag attached to an evaluated age."""

    EXACT = "exact"
    CLOSED_FORM = "closed_form"
    APPROXIMATION = "approximation"
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"
    SIMULATED = "simulated"


_BOUND_METHODS = frozenset({Method.LOWER_BOUND, Method.UPPER_BOUND})


@dataclass(frozen=True)
class RateConfig:
    """The four Poisson rates driving the system.

    lambda_e -- source self-update rate (new versions per unit time)
    lambda_s -- total source -> cluster-heads injection rate (lambda_s/m each)
    lambda_c -- total head -> cluster injection rate, per cluster (lambda_c/k per node)
    lambda_  -- total gossip budget of one node, split uniformly over its neighbors
    """

    lambda_e: float
    lambda_s: float
    lambda_c: float
    lambda_: float

    def __post_init__(self) -> None:
        for name in ("lambda_e", "lambda_s", "lambda_c"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name}: must be > 0, got {value!r}")
        if not self.lambda_ >= 0:
            raise ConfigError(f"lambda: must be >= 0, got {self.lambda_!r}")

    def scaled(self, factor: float) -> "RateConfig":
        """All four rates multiplied by a common positive factor."""
        if not factor > 0:
            raise ConfigError(f"scale factor must be > 0, got {factor!r}")
        return RateConfig(self.lambda_e * factor, self.lambda_s * factor,
                          self.lambda_c * factor, self.lambda_ * factor)


@dataclass(frozen=True, eq=False)
class ClusterGraph:
    """Directed gossip-rate matrix of one cluster.

    ``rate[i, j]`` is the Poisson rate at which node ``i`` pushes its current
    version to node ``j``.  The diagonal is zero (no self-updates).
    """

    size: int
    rate: np.ndarray

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ConfigError(f"graph size: must be >= 1, got {self.size}")
        rate = np.asarray(self.rate, dtype=float)
        if rate.shape != (self.size, self.size):
            raise ConfigError(f"rate matrix: expected shape {(self.size, self.size)}, got {rate.shape}")
        if np.any(rate < 0) or not np.all(np.isfinite(rate)):
            raise ConfigError("rate matrix: entries must be finite and nonnegative")
        if np.any(np.diagonal(rate) != 0):
            raise ConfigError("rate matrix: diagonal must be zero (no self-updates)")
        rate = rate.copy()
        rate.flags.writeable = False
        object.__setattr__(self, "rate", rate)

    def out_rates(self) -> np.ndarray:
        """Total outgoing gossip rate of each node (row sums)."""
        return self.rate.sum(axis=1)

    def total_rate(self) -> float:
        """Sum of all edge rates in the cluster."""
        return float(self.rate.sum())

    def rate_into_set(self, i: int, members: Iterable[int]) -> float:
        """Total rate at which node ``i`` updates the given set of nodes."""
        return float(sum(self.rate[i, j] for j in members if j != i))

    def updating_neighbors(self, members: Iterable[int]) -> set[int]:
        """Nodes outside the set with positive total rate into it."""
        member_set = set(members)
        return {i for i in range(self.size)
                if i not in member_set and self.rate_into_set(i, member_set) > 0}


def build_topology(kind: Topology, k: int, lambda_: float) -> ClusterGraph:
    """Construct the gossip-rate matrix of one cluster for a named topology.

    Each node's total outgoing rate is ``lambda_``: a uni-directional ring
    puts it all on one successor, a bi-directional ring splits it in half
    over both ring neighbors, and a fully connected cluster spreads it
    uniformly over the other ``k - 1`` nodes.
    """
    if k < 1:
        raise ConfigError(f"k: must be >= 1, got {k}")
    if lambda_ < 0:
        raise ConfigError(f"lambda: must be >= 0, got {lambda_!r}")
    if kind is Topology.CUSTOM:
        raise ConfigError("custom topology requires an explicit rate matrix")
    if kind is Topology.DISCONNECTED:
        return ClusterGraph(k, np.zeros((k, k)))
    if lambda_ == 0:
        raise ConfigError(f"{kind.value}: lambda = 0 is degenerate (only disconnected clusters may have no gossip)")
    if k == 1:
        raise ConfigError(f"{kind.value}: k = 1 leaves no neighbor to receive the gossip rate")
    rate = np.zeros((k, k))
    if kind is Topology.UNI_RING:
        for i in range(k):
            rate[i, (i + 1) % k] = lambda_
    elif kind is Topology.BI_RING:
        for i in range(k):
            rate[i, (i + 1) % k] += lambda_ / 2
            rate[i, (i - 1) % k] += lambda_ / 2
    elif kind is Topology.FULLY_CONNECTED:
        rate[:] = lambda_ / (k - 1)
        np.fill_diagonal(rate, 0.0)
    else:  # pragma: no cover - enum is exhaustive
        raise ConfigError(f"unsupported topology {kind!r}")
    return ClusterGraph(k, rate)


@dataclass(frozen=True)
class ClusterLayout:
    """Network shape: ``n`` nodes split into ``m`` clusters of ``k`` nodes."""

    n: int
    m: int
    k: int
    topology: Topology
    graph: Optional[ClusterGraph] = None

    def __post_init__(self) -> None:
        for name in ("n", "m", "k"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ConfigError(f"{name}: must be a positive integer, got {value!r}")
        if self.m * self.k != self.n:
            raise ConfigError(f"layout: m*k must equal n exactly (got {self.m}*{self.k} != {self.n})")
        if self.topology is Topology.CUSTOM:
            if self.graph is None:
                raise ConfigError("custom topology requires a cluster graph")
            if self.graph.size != self.k:
                raise ConfigError(f"custom graph size {self.graph.size} does not match k = {self.k}")
        elif self.graph is not None:
            raise ConfigError("cluster graph may only be supplied with the custom topology")

    def build_graph(self, lambda_: float) -> ClusterGraph:
        """The per-cluster gossip graph; for named topologies built from ``lambda_``."""
        if self.topology is Topology.CUSTOM:
            assert self.graph is not None
            return self.graph
        return build_topology(self.topology, self.k, lambda_)

    def cluster_of(self, node: int) -> int:
        """Cluster index owning global node index ``node``."""
        if not 0 <= node < self.n:
            raise ConfigError(f"node index {node} out of range 0..{self.n - 1}")
        return node // self.k


def ensure_compatible(layout: ClusterLayout, rates: RateConfig) -> None:
    """Reject degenerate layout/rate pairings.

    A zero gossip budget is only meaningful for disconnected clusters; any
    connected topology with ``lambda_ = 0`` would make the per-subset
    recursions divide by zero.
    """
    if layout.topology in (Topology.UNI_RING, Topology.BI_RING, Topology.FULLY_CONNECTED):
        if rates.lambda_ == 0:
            raise ConfigError(f"{layout.topology.value}: lambda = 0 is degenerate "
                              "(only disconnected clusters may have no gossip)")


@dataclass(frozen=True)
class AgeReport:
    """Average version ages of a cluster head and of a single node.

    ``node_age >= head_age`` always: versions enter a cluster only through
    its head, so a node can never be fresher than the head serving it.
    """

    head_age: float
    node_age: float
    method: Method
    ci_halfwidth: Optional[float] = None

    def __post_init__(self) -> None:
        if self.head_age < 0 or self.node_age < 0:
            raise ConfigError("ages must be nonnegative")
        if self.ci_halfwidth is not None:
            if self.method is not Method.SIMULATED:
                raise ConfigError("ci_halfwidth is only meaningful for simulated reports")
            if self.ci_halfwidth < 0:
                raise ConfigError("ci_halfwidth must be nonnegative")
        if self.method not in _BOUND_METHODS:
            tol = 1e-9 * max(1.0, self.head_age)
            if self.node_age < self.head_age - tol:
                raise ConfigError(f"node_age {self.node_age} below head_age {self.head_age}")


# JSON config schema: required keys and their validators.
_REQUIRED_KEYS = ("n", "m", "k", "topology", "lambda_e", "lambda_s", "lambda_c", "lambda")
_OPTIONAL_KEYS = ("custom_graph", "horizon", "warmup_fraction", "replications", "seed")


@dataclass(frozen=True)
class SystemConfig:
    """A parsed configuration file: layout + rates, plus optional simulation knobs."""

    layout: ClusterLayout
    rates: RateConfig
    horizon: Optional[float] = None
    warmup_fraction: Optional[float] = None
    replications: Optional[int] = None
    seed: Optional[int] = None


def _require_number(data: dict, key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _require_int(data: dict, key: str) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def parse_config(data: dict) -> SystemConfig:
    """Validate a configuration mapping; every error names the offending field."""
    if not isinstance(data, dict):
        raise ConfigError(f"config: expected a JSON object, got {type(data).__name__}")
    unknown = set(data) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS)
    if unknown:
        raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
    missing = [key for key in _REQUIRED_KEYS if key not in data]
    if missing:
        raise ConfigError(f"config: missing required field(s) {missing}")

    n = _require_int(data, "n")
    m = _require_int(data, "m")
    k = _require_int(data, "k")
    topology = Topology.parse(data["topology"])
    rates = RateConfig(lambda_e=_require_number(data, "lambda_e"),
                       lambda_s=_require_number(data, "lambda_s"),
                       lambda_c=_require_number(data, "lambda_c"),
                       lambda_=_require_number(data, "lambda"))

    graph = None
    if topology is Topology.CUSTOM:
        if "custom_graph" not in data:
            raise ConfigError("custom_graph: required when topology is custom")
        matrix = data["custom_graph"]
        try:
            graph = ClusterGraph(k, np.asarray(matrix, dtype=float))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"custom_graph: {exc}") from None
    elif "custom_graph" in data:
        raise ConfigError("custom_graph: only allowed with the custom topology")

    layout = ClusterLayout(n=n, m=m, k=k, topology=topology, graph=graph)
    ensure_compatible(layout, rates)

    horizon = _require_number(data, "horizon") if "horizon" in data else None
    warmup = _require_number(data, "warmup_fraction") if "warmup_fraction" in data else None
    replications = _require_int(data, "replications") if "replications" in data else None
    seed = _require_int(data, "seed") if "seed" in data else None
    return SystemConfig(layout=layout, rates=rates, horizon=horizon,
                        warmup_fraction=warmup, replications=replications, seed=seed)


def load_config(path: str | Path) -> SystemConfig:
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from None
    return parse_config(data)
