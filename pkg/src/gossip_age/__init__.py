"""Version age of information in clustered gossip networks.

A single source pushes versioned updates through per-cluster heads into
gossiping clusters.  This package evaluates the stationary average version
age of every node exactly (subset recursions and a general subset solver),
approximately (square-root and logarithmic growth laws with harmonic-number
bounds), and by discrete-event Monte-Carlo simulation, and optimizes the
cluster size for a fixed network size.
"""

from .analytic import (ChainRecursionTrace, CoefficientVector,
                       disconnected_node_age, flat_ring_age_approx,
                       flat_ring_age_exact, fully_connected_age_approx,
                       fully_connected_bounds, fully_connected_node_age_exact,
                       general_subset_age, harmonic_number, head_age,
                       node_age_exact, ring_coefficients,
                       ring_node_age_approx, ring_node_age_closed_form,
                       ring_node_age_exact, subset_age_table)
from .model import (AgeReport, ClusterGraph, ClusterLayout, ConfigError,
                    Method, PreconditionError, RateConfig, SystemConfig,
                    Topology, build_topology, ensure_compatible, load_config,
                    parse_config)
from .optimize import (ScalingFit, SweepPoint, SweepResult, divisors,
                       fit_scaling_exponent, scaling_samples,
                       scaling_schedule, sweep_cluster_sizes)
from .sim import (Event, EventKind, EventSampler, ReplicationResult,
                  SimConfig, SimResult, SimState, estimate_head_age, run,
                  step)

__version__ = "0.1.0"

__all__ = [
    "AgeReport", "ChainRecursionTrace", "ClusterGraph", "ClusterLayout",
    "CoefficientVector", "ConfigError", "Event", "EventKind", "EventSampler",
    "Method", "PreconditionError", "RateConfig", "ReplicationResult",
    "ScalingFit", "SimConfig", "SimResult", "SimState", "SweepPoint",
    "SweepResult", "SystemConfig", "Topology", "build_topology",
    "disconnected_node_age", "divisors", "ensure_compatible",
    "estimate_head_age", "fit_scaling_exponent", "flat_ring_age_approx",
    "flat_ring_age_exact", "fully_connected_age_approx",
    "fully_connected_bounds", "fully_connected_node_age_exact",
    "general_subset_age", "harmonic_number", "head_age", "load_config",
    "node_age_exact", "parse_config", "ring_coefficients",
    "ring_node_age_approx", "ring_node_age_closed_form",
    "ring_node_age_exact", "run", "scaling_samples", "scaling_schedule",
    "step", "subset_age_table", "sweep_cluster_sizes",
]
