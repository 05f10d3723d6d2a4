"""Cluster-size sweeps, argmin extraction, and scaling-exponent fits.

Sweeps always use the exact analytic engines, never simulation or the
large-k approximations: the reported optima include exact ties (for
example {10, 12} for disconnected clusters of 120 nodes at unit rates)
that noise or dropped boundary terms would split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import node_age_exact
from .model import PreconditionError, RateConfig, Topology

# Two sweep points within this absolute distance of the minimum tie.
ARGMIN_TOL = 1e-9


@dataclass(frozen=True)
class SweepPoint:
    m: int
    k: int
    node_age: float


@dataclass(frozen=True)
class SweepResult:
    """Node age across every divisor split m*k = n, with the minimizing k's."""

    n: int
    topology: Topology
    points: tuple[SweepPoint, ...]
    argmin_set: frozenset[int]
    min_age: float

    def __post_init__(self) -> None:
        if any(p.m * p.k != self.n for p in self.points):
            raise PreconditionError("every sweep point must satisfy m*k = n")
        if not self.argmin_set:
            raise PreconditionError("argmin set must be nonempty")


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares growth fit over (n, age) samples.

    model "power": exponent is the slope of log age against log n.
    model "log":   exponent is the slope of age against log n (the fit used
    for logarithmic growth, where a power law would be degenerate).
    """

    samples: tuple[tuple[float, float], ...]
    exponent: float
    r_squared: float
    model: str = "power"


def divisors(n: int) -> list[int]:
    """All positive divisors of n in increasing order."""
    if n < 1:
        raise PreconditionError(f"n: must be >= 1, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def sweep_cluster_sizes(n: int, rates: RateConfig, topology: Topology) -> SweepResult:
    """Evaluate the exact node age at every divisor pair m*k = n.

    The argmin set collects all cluster sizes within ARGMIN_TOL of the
    minimum, so exact ties survive floating point.
    """
    if topology is Topology.CUSTOM:
        raise PreconditionError("sweeps need a resizable topology; custom graphs have fixed k")
    points = []
    for k in divisors(n):
        m = n // k
        points.append(SweepPoint(m=m, k=k, node_age=node_age_exact(rates, m, k, topology)))
    min_age = min(p.node_age for p in points)
    argmin = frozenset(p.k for p in points if p.node_age <= min_age + ARGMIN_TOL)
    return SweepResult(n=n, topology=topology, points=tuple(points),
                       argmin_set=argmin, min_age=min_age)


def _snap_to_divisor(n: int, m_target: float) -> tuple[int, int]:
    # nearest divisor pair in log space preserves the intended exponent
    log_target = math.log(m_target)
    best = min(divisors(n), key=lambda d: abs(math.log(d) - log_target))
    return best, n // best


def scaling_schedule(topology: Topology, n: int) -> tuple[int, int]:
    """The (m, k) split achieving each topology's best scaling order.

    Disconnected targets m = k = sqrt(n); rings target m = n^(1/3); fully
    connected targets m = ln n clusters.  Targets are snapped to the divisor
    pair of n nearest in log space.
    """
    if n < 2:
        raise PreconditionError(f"n: must be >= 2 for a scaling schedule, got {n}")
    if topology is Topology.DISCONNECTED:
        target = math.sqrt(n)
    elif topology in (Topology.UNI_RING, Topology.BI_RING):
        target = n ** (1.0 / 3.0)
    elif topology is Topology.FULLY_CONNECTED:
        target = max(math.log(n), 1.0)
    else:
        raise PreconditionError("custom topologies have no scaling schedule")
    return _snap_to_divisor(n, target)


def scaling_samples(topology: Topology, rates: RateConfig,
                    n_values: list[int]) -> list[tuple[int, float]]:
    """Exact node ages along the scaling schedule, one sample per network size."""
    samples = []
    for n in n_values:
        m, k = scaling_schedule(topology, n)
        samples.append((n, node_age_exact(rates, m, k, topology)))
    return samples


def fit_scaling_exponent(samples: list[tuple[float, float]], model: str = "power") -> ScalingFit:
    """Least-squares growth fit; deterministic given samples.

    Requires at least 4 samples with positive n and age, spanning at least
    two decades of n.  With model "log" the ordinate stays linear (the
    auxiliary fit for logarithmic growth) and ages of exactly zero are
    allowed; r_squared is 1.0 for perfectly flat data.
    """
    if model not in ("power", "log"):
        raise PreconditionError(f"model: expected 'power' or 'log', got {model!r}")
    if len(samples) < 4:
        raise PreconditionError(f"need >= 4 samples, got {len(samples)}")
    ns = np.asarray([s[0] for s in samples], dtype=float)
    ages = np.asarray([s[1] for s in samples], dtype=float)
    if np.any(ns <= 0):
        raise PreconditionError("sample sizes must be positive")
    if np.any(ages <= 0) if model == "power" else np.any(ages < 0):
        raise PreconditionError("sample ages must be positive")
    if ns.max() / ns.min() < 100:
        raise PreconditionError("samples must span at least two decades of n")

    x = np.log(ns)
    y = np.log(ages) if model == "power" else ages
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 if total == 0 else 1.0 - float(np.sum(residual**2)) / float(total)
    return ScalingFit(samples=tuple((float(a), float(b)) for a, b in samples),
                      exponent=float(slope), r_squared=float(r_squared), model=model)
