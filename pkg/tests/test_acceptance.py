"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines; every tolerance is fixed here, nothing is calibrated at runtime.
"""

import math
import time

import numpy as np

from gossip_age import (ClusterLayout, RateConfig, SimConfig, Topology,
                        build_topology, disconnected_node_age,
                        flat_ring_age_exact, fully_connected_bounds,
                        fully_connected_node_age_exact, general_subset_age,
                        head_age, fit_scaling_exponent, node_age_exact,
                        ring_node_age_exact, run, scaling_samples,
                        sweep_cluster_sizes)
from gossip_age.cli import fig3_panel, main

UNIT = RateConfig(1, 1, 1, 1)
SQRT_HALF_PI = math.sqrt(math.pi / 2)


def _criterion(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {number}: {detail}"


def _argmins(rates: RateConfig) -> dict[Topology, frozenset]:
    return {topo: sweep_cluster_sizes(120, rates, topo).argmin_set
            for topo in (Topology.FULLY_CONNECTED, Topology.BI_RING, Topology.DISCONNECTED)}


def test_criterion_01_panel_a_argmins():
    start = time.perf_counter()
    optima = _argmins(UNIT)
    elapsed = time.perf_counter() - start
    ok = (optima[Topology.FULLY_CONNECTED] == {120}
          and optima[Topology.BI_RING] == {30}
          and optima[Topology.DISCONNECTED] == {10, 12}
          and elapsed < 1.0)
    _criterion(1, ok, f"n=120 unit rates: k* full={sorted(optima[Topology.FULLY_CONNECTED])} "
                      f"ring={sorted(optima[Topology.BI_RING])} "
                      f"disc={sorted(optima[Topology.DISCONNECTED])} ({elapsed:.3f}s)")


def test_criterion_02_panel_b_argmins():
    optima = _argmins(RateConfig(1, 10, 1, 1))
    ok = (optima[Topology.FULLY_CONNECTED] == {12}
          and optima[Topology.BI_RING] == {8}
          and optima[Topology.DISCONNECTED] == {3, 4})
    _criterion(2, ok, f"lambda_s=10: k* full={sorted(optima[Topology.FULLY_CONNECTED])} "
                      f"ring={sorted(optima[Topology.BI_RING])} "
                      f"disc={sorted(optima[Topology.DISCONNECTED])}")


def test_criterion_03_panel_c_argmins():
    optima = _argmins(RateConfig(1, 10, 10, 1))
    ok = (optima[Topology.FULLY_CONNECTED] == {20}
          and optima[Topology.BI_RING] == {15}
          and optima[Topology.DISCONNECTED] == {10, 12})
    _criterion(3, ok, f"lambda_s=10, lambda_c=10: k* full={sorted(optima[Topology.FULLY_CONNECTED])} "
                      f"ring={sorted(optima[Topology.BI_RING])} "
                      f"disc={sorted(optima[Topology.DISCONNECTED])}")


def test_criterion_04_panel_d_disputed_rates():
    # panel d is documented with two conflicting rate sets; exactly one must
    # reproduce k* = {24} fully connected, {10} ring, {3, 4} disconnected
    matches = {}
    for label, rates, sweeps in fig3_panel("d"):
        by_topology = {s.topology: s.argmin_set for s in sweeps}
        matches[label] = (by_topology[Topology.FULLY_CONNECTED] == {24}
                          and by_topology[Topology.BI_RING] == {10}
                          and by_topology[Topology.DISCONNECTED] == {3, 4})
    winners = [label for label, hit in matches.items() if hit]
    ok = len(winners) == 1
    detail = f"matching rate set: {winners} (of {sorted(matches)})"
    if winners:
        rates = {label: r for label, r, _ in fig3_panel("d")}[winners[0]]
        detail += (f"; recorded rates lambda_e={rates.lambda_e} lambda_s={rates.lambda_s} "
                   f"lambda_c={rates.lambda_c} lambda={rates.lambda_}")
    _criterion(4, ok, detail)


def test_criterion_05_flat_ring_coefficient():
    start = time.perf_counter()
    ratios = [flat_ring_age_exact(n, 1.0, 1.0) / math.sqrt(n)
              for n in (10**2, 10**3, 10**4, 10**5)]
    elapsed = time.perf_counter() - start
    at_1e4 = ratios[2]
    monotone = all(a < b for a, b in zip(ratios, ratios[1:]))
    approaching = all(r < SQRT_HALF_PI for r in ratios)
    ok = 1.228 <= at_1e4 <= 1.278 and monotone and approaching and elapsed < 1.0
    _criterion(5, ok, f"ratio(1e4)={at_1e4:.4f} in [1.228, 1.278]; "
                      f"monotone rise toward {SQRT_HALF_PI:.4f} over 1e2..1e5 ({elapsed:.3f}s)")


def test_criterion_06_scaling_exponents():
    disc = fit_scaling_exponent(
        scaling_samples(Topology.DISCONNECTED, UNIT, [10**2, 10**3, 10**4, 10**5, 10**6]))
    ring = fit_scaling_exponent(
        scaling_samples(Topology.BI_RING, UNIT,
                        [10**3, 10**4, 10**5, 10**6, 10**7, 10**8, 10**9]))
    m = 4
    gossip_part = [(k, fully_connected_node_age_exact(UNIT, m, k).node_age - head_age(UNIT, m))
                   for k in (2**p for p in range(4, 21))]
    full = fit_scaling_exponent(gossip_part, model="log")
    ok = (abs(disc.exponent - 0.5) <= 0.005
          and 0.30 <= ring.exponent <= 0.36
          and full.r_squared >= 0.999)
    _criterion(6, ok, f"slopes: disconnected={disc.exponent:.4f} (0.500+/-0.005), "
                      f"ring={ring.exponent:.4f} in [0.30, 0.36]; "
                      f"fully connected age-vs-log-k r^2={full.r_squared:.6f} >= 0.999")


def test_criterion_07_oracle_equivalence():
    rate_grid = (0.5, 1.0, 2.0)
    worst_chain = 0.0
    worst_ring_pair = 0.0
    checked = 0
    for k in range(1, 11):
        graphs = {}
        for topology in (Topology.UNI_RING, Topology.BI_RING, Topology.FULLY_CONNECTED):
            graphs[topology] = None  # built per lambda below
        zero_graph = build_topology(Topology.DISCONNECTED, k, 1.0)
        for m in (1, 2, 4):
            for le in rate_grid:
                for ls in rate_grid:
                    for lc in rate_grid:
                        # disconnected: gossip budget is inert, test once
                        rates0 = RateConfig(le, ls, lc, rate_grid[0])
                        expected = disconnected_node_age(rates0, m, k).node_age
                        got = general_subset_age(zero_graph, rates0, m)
                        diff = float(np.max(np.abs(got - expected))) / expected
                        worst_chain = max(worst_chain, diff)
                        checked += 1
                        for lam in rate_grid:
                            rates = RateConfig(le, ls, lc, lam)
                            ring_chain = ring_node_age_exact(rates, m, k).node_age
                            full_chain = fully_connected_node_age_exact(rates, m, k).node_age
                            if k == 1:
                                dp = general_subset_age(zero_graph, rates, m)
                                for chain in (ring_chain, full_chain):
                                    worst_chain = max(worst_chain, abs(dp[0] - chain) / chain)
                                checked += 2
                                continue
                            uni = general_subset_age(build_topology(Topology.UNI_RING, k, lam), rates, m)
                            bi = general_subset_age(build_topology(Topology.BI_RING, k, lam), rates, m)
                            full = general_subset_age(build_topology(Topology.FULLY_CONNECTED, k, lam), rates, m)
                            worst_chain = max(worst_chain,
                                              float(np.max(np.abs(uni - ring_chain))) / ring_chain,
                                              float(np.max(np.abs(bi - ring_chain))) / ring_chain,
                                              float(np.max(np.abs(full - full_chain))) / full_chain)
                            worst_ring_pair = max(worst_ring_pair,
                                                  float(np.max(np.abs(uni - bi))) / ring_chain)
                            checked += 3
    ok = worst_chain <= 1e-9 and worst_ring_pair <= 1e-12
    _criterion(7, ok, f"{checked} chain-vs-subset-solver comparisons: worst rel diff "
                      f"{worst_chain:.2e} <= 1e-9; uni/bi ring split {worst_ring_pair:.2e} <= 1e-12")


def test_criterion_08_harmonic_bracket_containment():
    rates = RateConfig(1, 1, 1, 1)  # lambda_c = lambda
    violations = 0
    worst_margin = float("inf")
    for m in (1, 8, 64):
        for k in range(1, 2**10 + 1):
            value = fully_connected_node_age_exact(rates, m, k).node_age
            lower, upper = fully_connected_bounds(rates, m, k)
            if not (lower - 1e-12 <= value <= upper + 1e-12):
                violations += 1
            worst_margin = min(worst_margin, value - lower, upper - value)
    ok = violations == 0
    _criterion(8, ok, f"exact fully connected age inside harmonic bracket for all "
                      f"k <= 1024, m in {{1, 8, 64}} (violations: {violations}, "
                      f"tightest margin {worst_margin:.2e})")


def test_criterion_09_simulation_validation():
    configs = [
        (Topology.DISCONNECTED, 2, 2),
        (Topology.UNI_RING, 2, 3),
        (Topology.BI_RING, 1, 4),
        (Topology.FULLY_CONNECTED, 1, 4),
    ]
    start = time.perf_counter()
    details = []
    ok = True
    for topology, m, k in configs:
        layout = ClusterLayout(m * k, m, k, topology)
        sim = run(SimConfig(layout, UNIT, horizon=1e5, replications=20, seed=20_260_809))
        exact_node = node_age_exact(UNIT, m, k, topology)
        exact_head = head_age(UNIT, m)
        node_tol = max(0.03 * exact_node, 2 * sim.node_ci_halfwidth)
        head_tol = max(0.03 * exact_head, 2 * sim.head_ci_halfwidth)
        node_ok = abs(sim.node_age - exact_node) <= node_tol
        head_ok = abs(sim.head_age - exact_head) <= head_tol
        head_two_pct = abs(sim.head_age - exact_head) / exact_head <= 0.02
        ok = ok and node_ok and head_ok and head_two_pct
        details.append(f"{topology.value}(m={m},k={k}): node {sim.node_age:.4f} vs {exact_node:.4f}, "
                       f"head {sim.head_age:.4f} vs {exact_head:.4f}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    _criterion(9, ok, "; ".join(details) + f" ({elapsed:.1f}s < 120s)")


def test_criterion_10_byte_identical_output(tmp_path):
    config = tmp_path / "config.json"
    config.write_text('{"n": 4, "m": 1, "k": 4, "topology": "biring", "lambda_e": 1, '
                      '"lambda_s": 1, "lambda_c": 1, "lambda": 1, '
                      '"horizon": 2000.0, "replications": 3, "seed": 99}')
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        code = main(["simulate", "--config", str(config), "--out", str(out), "--threads", "2"])
        assert code == 0
        outputs.append(out.read_bytes())
    sweeps = []
    for name in ("sweep1.csv", "sweep2.csv"):
        out = tmp_path / name
        code = main(["sweep", "--config", str(config), "--out", str(out), "--no-figure"])
        assert code == 0
        sweeps.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and sweeps[0] == sweeps[1]
    _criterion(10, ok, f"simulate CSV ({len(outputs[0])} bytes) and sweep CSV "
                       f"({len(sweeps[0])} bytes) byte-identical across reruns")
