"""Exact, closed-form, approximate, and bounding version-age evaluations.

All engines evaluate the same stationary recursion on subset ages: for a
set S of nodes inside one cluster, the expected minimum age over S obeys

    age(S) = (lambda_e + head_rate(S) * head_age
              + sum_i gossip_rate(i, S) * age(S + {i}))
             / (head_rate(S) + sum_i gossip_rate(i, S))

where the sum runs over outside nodes with positive rate into S, the head
receives the source at rate lambda_s/m (so its own age is m*lambda_e/lambda_s),
and the full cluster's age is head_age + lambda_e/lambda_c.  Symmetric
topologies collapse the recursion to a chain over subset sizes, solved here
by back-substitution from the full cluster down to a single node; the
general solver runs the full dynamic program over all 2^k subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (AgeReport, ClusterGraph, Method, PreconditionError,
                    RateConfig, Topology)

# Largest cluster the exact subset solver accepts: the table has 2^k entries.
MAX_SUBSET_NODES = 20

# Running coefficient products below this are exact zeros at double precision.
_UNDERFLOW = 1e-300

# Direct harmonic summation up to here; the asymptotic expansion beyond.
_HARMONIC_DIRECT_LIMIT = 10**6

_EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class ChainRecursionTrace:
    """Ages of the symmetric subset chain, from a single node up to the full cluster.

    ``values[j-1]`` is the average version age of the minimum over j nodes;
    the sequence is nonincreasing because enlarging a set can only lower its
    minimum.  ``values[0]`` is the per-node age.
    """

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise PreconditionError("chain trace must contain at least one value")
        for j in range(len(self.values) - 1):
            tol = 1e-12 * max(1.0, abs(self.values[j]))
            if self.values[j + 1] > self.values[j] + tol:
                raise PreconditionError(f"chain trace must be nonincreasing, violated at position {j}")

    @property
    def node_age(self) -> float:
        return self.values[0]

    @property
    def full_cluster_age(self) -> float:
        return self.values[-1]


@dataclass(frozen=True)
class CoefficientVector:
    """Running products of chain-recursion propagation factors.

    Entries are strictly decreasing in (0, 1].  The list is truncated once
    the running product underflows below double precision; omitted entries
    are exact zeros and contribute nothing to any sum they appear in.
    """

    entries: tuple[float, ...]

    def __post_init__(self) -> None:
        previous = 1.0
        for i, entry in enumerate(self.entries):
            if not 0 < entry <= 1:
                raise PreconditionError(f"coefficient {i} out of (0, 1]: {entry!r}")
            # ties only arise as ulp collapse of mathematically distinct products
            if entry > previous:
                raise PreconditionError(f"coefficients must be decreasing, violated at {i}")
            previous = entry

    def sum(self) -> float:
        return math.fsum(self.entries)

    def last(self) -> float:
        """Final coefficient of the full-length vector; 0.0 if truncated away."""
        return self.entries[-1]


def head_age(rates: RateConfig, m: int) -> float:
    """Average version age at any cluster head: m * lambda_e / lambda_s."""
    if m < 1:
        raise PreconditionError(f"m: must be >= 1, got {m}")
    return m * rates.lambda_e / rates.lambda_s


def _boundary_age(rates: RateConfig, m: int) -> float:
    # Full-cluster age: the head is the only updater of the whole cluster.
    return head_age(rates, m) + rates.lambda_e / rates.lambda_c


def disconnected_node_age(rates: RateConfig, m: int, k: int) -> AgeReport:
    """Exact node age without gossip: two independent hops, exactly additive.

    node_age = m*lambda_e/lambda_s + k*lambda_e/lambda_c.
    """
    if k < 1:
        raise PreconditionError(f"k: must be >= 1, got {k}")
    hd = head_age(rates, m)
    return AgeReport(head_age=hd, node_age=hd + k * rates.lambda_e / rates.lambda_c,
                     method=Method.EXACT)


def _require_gossip(rates: RateConfig, k: int) -> None:
    if k >= 2 and rates.lambda_ == 0:
        raise PreconditionError("lambda = 0 is degenerate for a connected cluster; "
                                "use disconnected_node_age instead")


def ring_node_age_exact(rates: RateConfig, m: int, k: int) -> ChainRecursionTrace:
    """Exact subset-chain ages for a ring cluster (uni- or bi-directional).

    Any j adjacent nodes receive the head at total rate j*lambda_c/k and
    gossip from outside at total rate lambda, so the chain is solved by
    back-substitution from the full cluster down to a single node.  Both
    ring orientations induce the same chain for equal per-node budgets.
    """
    if k < 1:
        raise PreconditionError(f"k: must be >= 1, got {k}")
    _require_gossip(rates, k)
    le, lc, lam = rates.lambda_e, rates.lambda_c, rates.lambda_
    dc = head_age(rates, m)
    age = _boundary_age(rates, m)
    values = [age]
    for j in range(k - 1, 0, -1):
        into = j * lc / k
        age = (le + into * dc + lam * age) / (into + lam)
        values.append(age)
    values.reverse()
    return ChainRecursionTrace(tuple(values))


def ring_coefficients(k: int, lambda_c: float, lambda_: float) -> CoefficientVector:
    """Propagation products for the clustered ring chain.

    Entry i is the product over j = 1..i of k / (k + j*lambda_c/lambda_),
    computed incrementally; the running product is dropped once it
    underflows, since the tail is identically zero at double precision.
    """
    if k < 2:
        raise PreconditionError(f"k: must be >= 2, got {k}")
    if not lambda_c > 0 or not lambda_ > 0:
        raise PreconditionError("lambda_c and lambda must be > 0")
    ratio = lambda_c / lambda_
    entries = []
    product = 1.0
    for j in range(1, k):
        product *= k / (k + j * ratio)
        if product < _UNDERFLOW:
            break
        entries.append(product)
    return CoefficientVector(tuple(entries))


def ring_node_age_closed_form(rates: RateConfig, m: int, k: int) -> AgeReport:
    """Closed-form ring node age; algebraically identical to the chain recursion.

    node_age = (lambda_e/lambda) * sum_i b_i + head_age * (1 - b_last)
               + full_cluster_age * b_last,
    with b_i the ring propagation products.
    """
    if k < 2:
        raise PreconditionError(f"k: must be >= 2, got {k}")
    _require_gossip(rates, k)
    coeffs = ring_coefficients(k, rates.lambda_c, rates.lambda_)
    b_last = coeffs.last() if len(coeffs.entries) == k - 1 else 0.0
    dc = head_age(rates, m)
    node = (rates.lambda_e / rates.lambda_ * coeffs.sum()
            + dc * (1.0 - b_last) + _boundary_age(rates, m) * b_last)
    return AgeReport(head_age=dc, node_age=node, method=Method.CLOSED_FORM)


def ring_node_age_approx(rates: RateConfig, m: int, k: int) -> AgeReport:
    """Large-cluster ring approximation.

    node_age ~ sqrt(pi/2) * lambda_e / sqrt(lambda * lambda_c) * sqrt(k)
               + m * lambda_e / lambda_s,
    from replacing the propagation products with a Gaussian and the sum
    with the integral of exp(-t^2/2).  The gossip term scales as sqrt(k),
    the head term as m.
    """
    if k < 2:
        raise PreconditionError(f"k: must be >= 2, got {k}")
    _require_gossip(rates, k)
    dc = head_age(rates, m)
    gossip = math.sqrt(math.pi / 2) * rates.lambda_e / math.sqrt(rates.lambda_ * rates.lambda_c) * math.sqrt(k)
    return AgeReport(head_age=dc, node_age=dc + gossip, method=Method.APPROXIMATION)


def flat_ring_age_exact(n: int, lambda_e: float, lambda_: float) -> float:
    """Exact node age of a flat (head-less) ring of n nodes.

    This is the single-cluster benchmark where the source feeds every node
    directly: node_age = (lambda_e/lambda) * (sum_i a_i + a_{n-1}) with
    a_i the products of n/(n+j) for j = 1..i, accumulated as running
    products so nothing overflows.
    """
    if n < 2:
        raise PreconditionError(f"n: must be >= 2, got {n}")
    if not lambda_e > 0 or not lambda_ > 0:
        raise PreconditionError("lambda_e and lambda must be > 0")
    total = 0.0
    product = 1.0
    last = 0.0
    for j in range(1, n):
        product *= n / (n + j)
        if product < _UNDERFLOW:
            last = 0.0
            break
        total += product
        last = product
    return lambda_e / lambda_ * (total + last)


def flat_ring_age_approx(n: int, lambda_e: float, lambda_: float) -> float:
    """Flat-ring scaling law: node_age ~ sqrt(pi/2) * (lambda_e/lambda) * sqrt(n).

    Derivation note: the propagation products behave like exp(-i^2/(2n)), so
    (1/sqrt(n)) * sum_i exp(-i^2/(2n)) is a Riemann sum (step 1/sqrt(n)) of
    the Gaussian integral over [0, inf), which equals sqrt(pi/2) = 1.2533.
    """
    if n < 1:
        raise PreconditionError(f"n: must be >= 1, got {n}")
    if not lambda_e > 0 or not lambda_ > 0:
        raise PreconditionError("lambda_e and lambda must be > 0")
    return math.sqrt(math.pi / 2) * lambda_e / lambda_ * math.sqrt(n)


def fully_connected_node_age_exact(rates: RateConfig, m: int, k: int) -> ChainRecursionTrace:
    """Exact subset-chain ages for a fully connected cluster.

    A set of j nodes receives gossip from each of the k-j outside nodes at
    rate j*lambda/(k-1), giving total inflow j*(k-j)*lambda/(k-1) on top of
    the head's j*lambda_c/k; back-substitution runs from the full cluster
    down to a single node.
    """
    if k < 1:
        raise PreconditionError(f"k: must be >= 1, got {k}")
    _require_gossip(rates, k)
    le, lc, lam = rates.lambda_e, rates.lambda_c, rates.lambda_
    dc = head_age(rates, m)
    age = _boundary_age(rates, m)
    values = [age]
    for j in range(k - 1, 0, -1):
        into = j * lc / k
        gossip = j * (k - j) * lam / (k - 1)
        age = (le + into * dc + gossip * age) / (into + gossip)
        values.append(age)
    values.reverse()
    return ChainRecursionTrace(tuple(values))


def harmonic_number(k: int) -> float:
    """H_k = sum of 1/l for l = 1..k; asymptotic expansion past 10^6 terms."""
    if k < 0:
        raise PreconditionError(f"k: must be >= 0, got {k}")
    if k <= _HARMONIC_DIRECT_LIMIT:
        return math.fsum(1.0 / l for l in range(1, k + 1))
    return math.log(k) + _EULER_GAMMA + 1.0 / (2 * k)


def fully_connected_bounds(rates: RateConfig, m: int, k: int) -> tuple[float, float]:
    """Harmonic-number bracket on the fully connected node age.

    Valid only when the head budget equals the gossip budget
    (lambda_c = lambda):

        lower = ((k-1)^2 + k)/k^2 * head_age
                + (lambda_e/lambda) * ((k-1)/k * H_{k-1} + 1/k)
        upper = head_age + (lambda_e/lambda) * H_k
    """
    if k < 1:
        raise PreconditionError(f"k: must be >= 1, got {k}")
    if rates.lambda_c != rates.lambda_:
        raise PreconditionError("the harmonic bounds require lambda_c = lambda "
                                f"(got lambda_c={rates.lambda_c}, lambda={rates.lambda_})")
    dc = head_age(rates, m)
    ratio = rates.lambda_e / rates.lambda_
    h_prev = harmonic_number(k - 1)
    lower = ((k - 1) ** 2 + k) / k**2 * dc + ratio * ((k - 1) / k * h_prev + 1.0 / k)
    upper = dc + ratio * (h_prev + 1.0 / k)
    return lower, upper


def fully_connected_age_approx(rates: RateConfig, m: int, k: int) -> AgeReport:
    """Large-cluster fully connected approximation (natural logarithm).

    node_age ~ m*lambda_e/lambda_s + (lambda_e/lambda) * ln k.  This is the
    leading asymptotic of the harmonic bracket; it omits the Euler constant,
    so it approaches the exact value from below by about 0.5772*lambda_e/lambda.
    """
    if k < 2:
        raise PreconditionError(f"k: must be >= 2, got {k}")
    _require_gossip(rates, k)
    dc = head_age(rates, m)
    return AgeReport(head_age=dc, node_age=dc + rates.lambda_e / rates.lambda_ * math.log(k),
                     method=Method.APPROXIMATION)


def subset_age_table(graph: ClusterGraph, rates: RateConfig, m: int) -> np.ndarray:
    """Subset ages for an arbitrary cluster graph, indexed by node bitmask.

    Solves the subset recursion by dynamic programming over all nonempty
    subsets in decreasing cardinality order (strictly larger sets are always
    known first).  Entry 0 of the returned table is NaN; every other index
    holds the age of the subset whose member bits are set.  Subsets spanning
    multiple clusters are not representable: the recursion is stated within
    one cluster only, and the graph is a single cluster's.

    Rejects k > 20: the table has 2^k entries and the cost grows as k^2 * 2^k.
    """
    k = graph.size
    if k > MAX_SUBSET_NODES:
        raise PreconditionError(f"subset solver limited to k <= {MAX_SUBSET_NODES} "
                                f"(2^k table; got k = {k})")
    if m < 1:
        raise PreconditionError(f"m: must be >= 1, got {m}")
    le, lc = rates.lambda_e, rates.lambda_c
    dc = head_age(rates, m)

    size = 1 << k
    bits = np.arange(k)
    table = np.full(size, np.nan)
    table[size - 1] = dc + le / lc

    popcount = np.zeros(size, dtype=np.int64)
    indices = np.arange(size, dtype=np.int64)
    for b in range(k):
        popcount += (indices >> b) & 1

    for j in range(k - 1, 0, -1):
        masks = indices[popcount == j]
        member = ((masks[:, None] >> bits) & 1).astype(bool)
        # inflow[s, i] = total rate of node i into subset s (meaningful for i outside s)
        inflow = member.astype(float) @ graph.rate.T
        superset = masks[:, None] | (1 << bits)
        contribution = np.where(member, 0.0, inflow * table[superset])
        inflow_sum = np.where(member, 0.0, inflow).sum(axis=1)
        head_rate = j * lc / k
        table[masks] = (le + head_rate * dc + contribution.sum(axis=1)) / (head_rate + inflow_sum)
    return table


def general_subset_age(graph: ClusterGraph, rates: RateConfig, m: int) -> np.ndarray:
    """Per-node average version ages for an arbitrary cluster graph."""
    table = subset_age_table(graph, rates, m)
    return table[1 << np.arange(graph.size)]


def node_age_exact(rates: RateConfig, m: int, k: int, topology: Topology) -> float:
    """Exact per-node age for a named topology (chain engines; k = 1 collapses
    to the two-hop boundary value for every topology)."""
    if topology is Topology.DISCONNECTED:
        return disconnected_node_age(rates, m, k).node_age
    if topology in (Topology.UNI_RING, Topology.BI_RING):
        return ring_node_age_exact(rates, m, k).node_age
    if topology is Topology.FULLY_CONNECTED:
        return fully_connected_node_age_exact(rates, m, k).node_age
    raise PreconditionError("custom topologies have no chain engine; use general_subset_age")
