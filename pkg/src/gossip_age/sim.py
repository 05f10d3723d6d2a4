"""Discrete-event Monte-Carlo simulation of the clustered gossip system.

Every update process is Poisson, so the whole system is driven by one
exponential clock at the total rate, with each event assigned to a
category (source self-update, source -> head, head -> node, node -> node)
proportionally to its rate share.  Replications are independent:
replication r seeds its generator with ``seed XOR r``, so identical
configurations reproduce identical event streams byte for byte.

Two execution paths share one random stream layout: :func:`step` applies a
single decoded event to an explicit state (the reference semantics used by
tests), while :func:`run` keeps lazy per-entity accumulators for speed.
Both integrate version counters over time; the age of an entity over a
window is (integral of source version - integral of its version) / window.
"""

from __future__ import annotations

import math
from bisect import bisect
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional

import numpy as np

from .model import (AgeReport, ClusterLayout, ConfigError, Method,
                    RateConfig, ensure_compatible)

_BATCH = 1 << 14
_SEED_MASK = (1 << 64) - 1
_Z95 = 1.959963984540054  # two-sided 95% normal quantile


class EventKind(IntEnum):
    SOURCE_UPDATE = 0     # the source produces a new version
    HEAD_FROM_SOURCE = 1  # a cluster head receives the source's version
    NODE_FROM_HEAD = 2    # a node receives its head's version
    NODE_FROM_NODE = 3    # a node receives a neighbor's version


@dataclass(frozen=True)
class Event:
    """One sampled transition: ``dt`` since the previous event, then the update.

    ``target`` is a head index for HEAD_FROM_SOURCE, else a global node
    index; ``origin`` is the sending node for NODE_FROM_NODE.
    """

    kind: EventKind
    dt: float
    target: int = -1
    origin: int = -1


@dataclass(eq=False)
class SimState:
    """Versions held by every entity plus running age integrals."""

    source_version: int
    head_version: list[int]
    node_version: list[int]
    clock: float
    age_integral: np.ndarray       # per node: integral of (source - node) version
    head_age_integral: np.ndarray  # per head: integral of (source - head) version

    @classmethod
    def initial(cls, layout: ClusterLayout) -> "SimState":
        return cls(source_version=0, head_version=[0] * layout.m,
                   node_version=[0] * layout.n, clock=0.0,
                   age_integral=np.zeros(layout.n), head_age_integral=np.zeros(layout.m))

    def node_ages(self) -> np.ndarray:
        return self.source_version - np.asarray(self.node_version)

    def head_ages(self) -> np.ndarray:
        return self.source_version - np.asarray(self.head_version)


def step(state: SimState, event: Event) -> SimState:
    """Apply one event: accumulate ages over ``dt``, then deliver the update.

    Deliveries keep the fresher version (a stale sender changes nothing);
    a source self-update raises every age by one.  Returns a new state and
    asserts the dominance invariant node <= head <= source afterwards.
    """
    n = len(state.node_version)
    m = len(state.head_version)
    k = n // m
    src = state.source_version
    heads = list(state.head_version)
    nodes = list(state.node_version)

    age_integral = state.age_integral + (src - np.asarray(nodes)) * event.dt
    head_age_integral = state.head_age_integral + (src - np.asarray(heads)) * event.dt

    if event.kind is EventKind.SOURCE_UPDATE:
        src += 1
    elif event.kind is EventKind.HEAD_FROM_SOURCE:
        heads[event.target] = src
    elif event.kind is EventKind.NODE_FROM_HEAD:
        nodes[event.target] = max(nodes[event.target], heads[event.target // k])
    elif event.kind is EventKind.NODE_FROM_NODE:
        nodes[event.target] = max(nodes[event.target], nodes[event.origin])
    else:  # pragma: no cover - enum is exhaustive
        raise ConfigError(f"unknown event kind {event.kind!r}")

    assert all(heads[c] <= src for c in range(m)), "head version exceeds source"
    assert all(nodes[i] <= heads[i // k] for i in range(n)), "node version exceeds its head"

    return SimState(source_version=src, head_version=heads, node_version=nodes,
                    clock=state.clock + event.dt, age_integral=age_integral,
                    head_age_integral=head_age_integral)


@dataclass(frozen=True)
class SimConfig:
    """One simulation experiment: system, horizon, and replication plan."""

    layout: ClusterLayout
    rates: RateConfig
    horizon: float
    warmup_fraction: float = 0.1
    replications: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        ensure_compatible(self.layout, self.rates)
        if not self.horizon > 0:
            raise ConfigError(f"horizon: must be > 0, got {self.horizon!r}")
        if not 0 <= self.warmup_fraction < 1:
            raise ConfigError(f"warmup_fraction: must be in [0, 1), got {self.warmup_fraction!r}")
        if self.horizon * (1.0 - self.warmup_fraction) <= 0:
            raise ConfigError("horizon too short to leave the warmup window")
        if self.replications < 1:
            raise ConfigError(f"replications: must be >= 1, got {self.replications!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed: must be an integer, got {self.seed!r}")


class EventSampler:
    """Superposition sampler: one exponential clock, categorical selection.

    Categories are weighted by total rates (lambda_e, lambda_s, m*lambda_c,
    m * sum of edge rates); members within a category are uniform except
    gossip edges, which are weighted by their individual rates.  Three
    uniforms are consumed per event regardless of category so that decoded
    streams are identical across consumers.
    """

    def __init__(self, layout: ClusterLayout, rates: RateConfig) -> None:
        ensure_compatible(layout, rates)
        self.layout = layout
        self.rates = rates
        self.m, self.k, self.n = layout.m, layout.k, layout.n
        graph = layout.build_graph(rates.lambda_)
        src_idx, dst_idx = np.nonzero(graph.rate)
        self.edge_src = [int(i) for i in src_idx]
        self.edge_dst = [int(j) for j in dst_idx]
        weights = graph.rate[src_idx, dst_idx]
        gossip_total = float(weights.sum()) * layout.m
        if len(weights):
            cum = np.cumsum(weights) / weights.sum()
            cum[-1] = 1.0
            self.edge_cum = cum.tolist()
        else:
            self.edge_cum = [1.0]
            self.edge_src = [0]
            self.edge_dst = [0]
        self.total_rate = rates.lambda_e + rates.lambda_s + layout.m * rates.lambda_c + gossip_total
        self.cut_source = rates.lambda_e / self.total_rate
        self.cut_head = (rates.lambda_e + rates.lambda_s) / self.total_rate
        self.cut_node = (rates.lambda_e + rates.lambda_s + layout.m * rates.lambda_c) / self.total_rate

    def decode(self, u_cat: float, u_member: float, u_edge: float) -> tuple[int, int, int]:
        """Map three uniforms to (kind, target, origin)."""
        if u_cat < self.cut_source:
            return (EventKind.SOURCE_UPDATE, -1, -1)
        if u_cat < self.cut_head:
            return (EventKind.HEAD_FROM_SOURCE, int(u_member * self.m), -1)
        if u_cat < self.cut_node:
            return (EventKind.NODE_FROM_HEAD, int(u_member * self.n), -1)
        cluster = int(u_member * self.m)
        edge = bisect(self.edge_cum, u_edge)
        base = cluster * self.k
        return (EventKind.NODE_FROM_NODE, base + self.edge_dst[edge], base + self.edge_src[edge])

    def draw_batches(self, rng: np.random.Generator) -> Iterator[tuple[list, list, list, list]]:
        """Endless batches of (dt, category, member, edge) draws, in a fixed order."""
        scale = 1.0 / self.total_rate
        while True:
            yield (rng.exponential(scale, _BATCH).tolist(), rng.random(_BATCH).tolist(),
                   rng.random(_BATCH).tolist(), rng.random(_BATCH).tolist())

    def events(self, rng: np.random.Generator, horizon: float) -> Iterator[Event]:
        """Decoded event stream up to the horizon (reference path)."""
        clock = 0.0
        for dts, u_cats, u_members, u_edges in self.draw_batches(rng):
            for i in range(_BATCH):
                clock += dts[i]
                if clock > horizon:
                    return
                kind, target, origin = self.decode(u_cats[i], u_members[i], u_edges[i])
                yield Event(kind=EventKind(kind), dt=dts[i], target=target, origin=origin)


@dataclass(frozen=True, eq=False)
class ReplicationResult:
    """Post-warmup time-averaged ages of one replication."""

    seed: int
    node_age: np.ndarray
    head_age: np.ndarray
    event_counts: tuple[int, int, int, int]


def _replication_worker(args: tuple[SimConfig, int]) -> ReplicationResult:
    """Run one replication with lazy version-integral accumulators.

    A version counter is piecewise constant, so its integral only needs
    attention when the counter changes: each entity carries the time of its
    last change and contributes value * elapsed on change and at the end.
    Contributions are clipped to the post-warmup window.
    """
    config, rep = args
    sampler = EventSampler(config.layout, config.rates)
    rep_seed = (config.seed ^ rep) & _SEED_MASK
    rng = np.random.default_rng(rep_seed)

    m, k, n = sampler.m, sampler.k, sampler.n
    horizon = config.horizon
    warm = config.warmup_fraction * horizon
    cut_source, cut_head, cut_node = sampler.cut_source, sampler.cut_head, sampler.cut_node
    edge_cum, edge_src, edge_dst = sampler.edge_cum, sampler.edge_src, sampler.edge_dst

    src_v = 0
    head_v = [0] * m
    node_v = [0] * n
    src_last = 0.0
    src_int = 0.0
    head_last = [0.0] * m
    head_int = [0.0] * m
    node_last = [0.0] * n
    node_int = [0.0] * n
    counts = [0, 0, 0, 0]

    clock = 0.0
    done = False
    for dts, u_cats, u_members, u_edges in sampler.draw_batches(rng):
        if done:
            break
        # inline decode of the sampler's stream; EventSampler.decode is the
        # reference and the two are pinned together by tests
        for i in range(_BATCH):
            clock += dts[i]
            if clock > horizon:
                done = True
                break
            u = u_cats[i]
            if u < cut_source:
                low = src_last if src_last > warm else warm
                if clock > low:
                    src_int += src_v * (clock - low)
                src_last = clock
                src_v += 1
                counts[0] += 1
            elif u < cut_head:
                h = int(u_members[i] * m)
                if head_v[h] != src_v:
                    low = head_last[h] if head_last[h] > warm else warm
                    if clock > low:
                        head_int[h] += head_v[h] * (clock - low)
                    head_last[h] = clock
                    head_v[h] = src_v
                counts[1] += 1
            elif u < cut_node:
                x = int(u_members[i] * n)
                fresh = head_v[x // k]
                if node_v[x] < fresh:
                    low = node_last[x] if node_last[x] > warm else warm
                    if clock > low:
                        node_int[x] += node_v[x] * (clock - low)
                    node_last[x] = clock
                    node_v[x] = fresh
                counts[2] += 1
            else:
                base = int(u_members[i] * m) * k
                edge = bisect(edge_cum, u_edges[i])
                fresh = node_v[base + edge_src[edge]]
                x = base + edge_dst[edge]
                if node_v[x] < fresh:
                    low = node_last[x] if node_last[x] > warm else warm
                    if clock > low:
                        node_int[x] += node_v[x] * (clock - low)
                    node_last[x] = clock
                    node_v[x] = fresh
                counts[3] += 1

    low = src_last if src_last > warm else warm
    src_int += src_v * (horizon - low)
    for h in range(m):
        low = head_last[h] if head_last[h] > warm else warm
        head_int[h] += head_v[h] * (horizon - low)
    for x in range(n):
        low = node_last[x] if node_last[x] > warm else warm
        node_int[x] += node_v[x] * (horizon - low)

    window = horizon - warm
    node_age = (src_int - np.asarray(node_int)) / window
    head_age = (src_int - np.asarray(head_int)) / window
    return ReplicationResult(seed=rep_seed, node_age=node_age, head_age=head_age,
                             event_counts=(counts[0], counts[1], counts[2], counts[3]))


@dataclass(frozen=True, eq=False)
class SimResult:
    """Aggregated simulation output: replication means and 95% intervals."""

    config: SimConfig
    replications: tuple[ReplicationResult, ...]
    node_age: float
    head_age: float
    node_ci_halfwidth: Optional[float]
    head_ci_halfwidth: Optional[float]
    per_node_age: np.ndarray
    per_head_age: np.ndarray

    def report(self) -> AgeReport:
        return AgeReport(head_age=self.head_age, node_age=self.node_age,
                         method=Method.SIMULATED, ci_halfwidth=self.node_ci_halfwidth)

    def csv_rows(self) -> list[list[str]]:
        """Per-replication rows followed by the aggregate row (nonempty CI)."""
        layout, rates = self.config.layout, self.config.rates
        prefix = [layout.topology.value, str(layout.n), str(layout.m), str(layout.k),
                  _fmt(rates.lambda_e), _fmt(rates.lambda_s), _fmt(rates.lambda_c),
                  _fmt(rates.lambda_)]
        rows = []
        for rep in self.replications:
            rows.append(prefix + [str(rep.seed), _fmt(rep.node_age.mean()),
                                  _fmt(rep.head_age.mean()), ""])
        ci = "" if self.node_ci_halfwidth is None else _fmt(self.node_ci_halfwidth)
        rows.append(prefix + [str(self.config.seed), _fmt(self.node_age),
                              _fmt(self.head_age), ci])
        return rows


CSV_HEADER = ["topology", "n", "m", "k", "lambda_e", "lambda_s", "lambda_c",
              "lambda", "seed", "node_age", "head_age", "ci_halfwidth"]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _ci_halfwidth(values: np.ndarray) -> Optional[float]:
    if len(values) < 2:
        return None
    return _Z95 * float(values.std(ddof=1)) / math.sqrt(len(values))


def run(config: SimConfig, workers: int = 1) -> SimResult:
    """Run all replications and aggregate post-warmup time-averaged ages.

    The node and head ages are averaged over entities within a replication,
    then over replications; the 95% half-width comes from the replication
    variance (normal quantile).  Results are identical for any ``workers``.
    """
    jobs = [(config, rep) for rep in range(config.replications)]
    if workers > 1 and config.replications > 1:
        with ProcessPoolExecutor(max_workers=min(workers, config.replications)) as pool:
            reps = list(pool.map(_replication_worker, jobs))
    else:
        reps = [_replication_worker(job) for job in jobs]

    node_means = np.asarray([rep.node_age.mean() for rep in reps])
    head_means = np.asarray([rep.head_age.mean() for rep in reps])
    per_node = np.mean([rep.node_age for rep in reps], axis=0)
    per_head = np.mean([rep.head_age for rep in reps], axis=0)
    return SimResult(config=config, replications=tuple(reps),
                     node_age=float(node_means.mean()), head_age=float(head_means.mean()),
                     node_ci_halfwidth=_ci_halfwidth(node_means),
                     head_ci_halfwidth=_ci_halfwidth(head_means),
                     per_node_age=per_node, per_head_age=per_head)


def estimate_head_age(config: SimConfig, workers: int = 1) -> float:
    """Simulated average head age; converges to m * lambda_e / lambda_s."""
    return run(config, workers=workers).head_age
