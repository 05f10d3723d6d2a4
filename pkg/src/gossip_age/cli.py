"""Command-line interface: analytic evaluation, simulation, sweeps, scaling
fits, and the canonical n=120 cluster-size reproduction.

Output format is inferred from the --out extension (.csv or .json); the
reproduce-fig3 command writes a set of files into a directory instead.
Report commands (sweep, scaling, reproduce-fig3) also render a .png figure
next to the delimited output unless --no-figure is given.

Exit codes: 0 success, 2 configuration error, 3 numerical precondition
violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import analytic
from .analytic import node_age_exact
from .model import (ConfigError, PreconditionError, RateConfig, SystemConfig,
                    Topology, load_config)
from .optimize import SweepResult, fit_scaling_exponent, sweep_cluster_sizes
from .sim import CSV_HEADER, SimConfig, run

FIG3_N = 120

# Panel rate sets (lambda_e, lambda_s, lambda_c, lambda).  Panel d is
# documented with two conflicting parameter sets; both are emitted, labeled
# by the rates that differ.
_PANEL_RATES = {
    "a": [("", RateConfig(1, 1, 1, 1))],
    "b": [("", RateConfig(1, 10, 1, 1))],
    "c": [("", RateConfig(1, 10, 10, 1))],
    "d": [("ls10-lc1", RateConfig(1, 10, 1, 2)),
          ("ls1-lc10", RateConfig(1, 1, 10, 2))],
}

_FIG3_TOPOLOGIES = (Topology.FULLY_CONNECTED, Topology.BI_RING, Topology.DISCONNECTED)

# Default network-size grids for the scaling command.
_SCALING_GRID = {
    Topology.DISCONNECTED: [10**2, 10**3, 10**4, 10**5, 10**6],
    Topology.UNI_RING: [10**3, 10**4, 10**5, 10**6, 10**7, 10**8, 10**9],
    Topology.BI_RING: [10**3, 10**4, 10**5, 10**6, 10**7, 10**8, 10**9],
    Topology.FULLY_CONNECTED: [2**10, 2**12, 2**14, 2**16, 2**18, 2**20],
}


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _out_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix not in (".csv", ".json"):
        raise ConfigError(f"--out: unknown extension {suffix!r} (expected .csv or .json)")
    return suffix


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _parse_topology(name: str) -> Topology:
    return Topology.parse(name)


# ---------------------------------------------------------------------------
# analytic


def _analytic_entries(config: SystemConfig) -> tuple[float, list[tuple[str, str, float, Optional[float]]]]:
    """(head_age, rows of (method, detail, node_age, gap_vs_exact))."""
    layout, rates = config.layout, config.rates
    m, k = layout.m, layout.k
    hd = analytic.head_age(rates, m)
    rows: list[tuple[str, str, float, Optional[float]]] = []

    if layout.topology is Topology.CUSTOM:
        ages = analytic.general_subset_age(layout.graph, rates, m)
        for i, age in enumerate(ages):
            rows.append(("exact", f"node={i}", float(age), None))
        return hd, rows

    exact = analytic.node_age_exact(rates, m, k, layout.topology)
    rows.append(("exact", "", exact, None))
    if layout.topology in (Topology.UNI_RING, Topology.BI_RING) and k >= 2:
        closed = analytic.ring_node_age_closed_form(rates, m, k).node_age
        rows.append(("closed_form", "", closed, closed - exact))
        approx = analytic.ring_node_age_approx(rates, m, k).node_age
        rows.append(("approximation", "", approx, approx - exact))
    elif layout.topology is Topology.FULLY_CONNECTED:
        if k >= 2:
            approx = analytic.fully_connected_age_approx(rates, m, k).node_age
            rows.append(("approximation", "", approx, approx - exact))
        if rates.lambda_c == rates.lambda_:
            lower, upper = analytic.fully_connected_bounds(rates, m, k)
            rows.append(("lower_bound", "", lower, lower - exact))
            rows.append(("upper_bound", "", upper, upper - exact))
    return hd, rows


def cmd_analytic(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    layout = config.layout
    hd, rows = _analytic_entries(config)

    print(f"topology={layout.topology.value} n={layout.n} m={layout.m} k={layout.k}")
    print(f"head age: {_fmt(hd)}")
    for method, detail, age, gap in rows:
        suffix = f"  (gap vs exact: {_fmt(gap)})" if gap is not None else ""
        tag = f" {detail}" if detail else ""
        print(f"{method}{tag}: {_fmt(age)}{suffix}")

    if args.out:
        out = Path(args.out)
        fmt = _out_format(out)
        if fmt == ".csv":
            header = ["topology", "n", "m", "k", "method", "detail",
                      "node_age", "head_age", "gap_vs_exact"]
            csv_rows = [[layout.topology.value, str(layout.n), str(layout.m), str(layout.k),
                         method, detail, _fmt(age), _fmt(hd),
                         "" if gap is None else _fmt(gap)]
                        for method, detail, age, gap in rows]
            _write_csv(out, header, csv_rows)
        else:
            _write_json(out, {
                "topology": layout.topology.value, "n": layout.n, "m": layout.m,
                "k": layout.k, "head_age": hd,
                "entries": [{"method": method, "detail": detail, "node_age": age,
                             "gap_vs_exact": gap}
                            for method, detail, age, gap in rows],
            })
    return 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    horizon = args.horizon if args.horizon is not None else config.horizon
    if horizon is None:
        raise ConfigError("horizon: required (config field or --horizon)")
    replications = args.replications if args.replications is not None else (config.replications or 1)
    seed = args.seed if args.seed is not None else (config.seed or 0)
    warmup = config.warmup_fraction if config.warmup_fraction is not None else 0.1

    sim_config = SimConfig(layout=config.layout, rates=config.rates, horizon=horizon,
                           warmup_fraction=warmup, replications=replications, seed=seed)
    result = run(sim_config, workers=args.threads)

    out = Path(args.out)
    fmt = _out_format(out)
    if fmt == ".csv":
        _write_csv(out, CSV_HEADER, result.csv_rows())
    else:
        _write_json(out, {
            "topology": config.layout.topology.value, "n": config.layout.n,
            "m": config.layout.m, "k": config.layout.k, "seed": seed,
            "node_age": result.node_age, "head_age": result.head_age,
            "node_ci_halfwidth": result.node_ci_halfwidth,
            "head_ci_halfwidth": result.head_ci_halfwidth,
            "replications": [{"seed": rep.seed, "node_age": float(rep.node_age.mean()),
                              "head_age": float(rep.head_age.mean())}
                             for rep in result.replications],
        })

    ci = result.node_ci_halfwidth
    ci_text = f" +/- {_fmt(ci)}" if ci is not None else ""
    print(f"simulated node age: {_fmt(result.node_age)}{ci_text}; "
          f"head age: {_fmt(result.head_age)}")
    reference = _analytic_reference(config)
    if reference is not None:
        print(f"analytic exact node age: {_fmt(reference)} "
              f"(relative deviation {_fmt((result.node_age - reference) / reference)})")
    print(f"wrote {out}")
    return 0


def _analytic_reference(config: SystemConfig) -> Optional[float]:
    layout, rates = config.layout, config.rates
    if layout.topology is Topology.CUSTOM:
        if layout.k > analytic.MAX_SUBSET_NODES:
            return None
        return float(analytic.general_subset_age(layout.graph, rates, layout.m).mean())
    return analytic.node_age_exact(rates, layout.m, layout.k, layout.topology)


# ---------------------------------------------------------------------------
# sweep


def _sweep_csv_rows(sweep: SweepResult) -> list[list[str]]:
    rows = [[sweep.topology.value, str(sweep.n), str(p.m), str(p.k), _fmt(p.node_age)]
            for p in sweep.points]
    best = "|".join(str(k) for k in sorted(sweep.argmin_set))
    rows.append([sweep.topology.value, str(sweep.n), "argmin_set", best, _fmt(sweep.min_age)])
    return rows


def _sweep_json(sweep: SweepResult) -> dict:
    return {
        "topology": sweep.topology.value, "n": sweep.n,
        "points": [{"m": p.m, "k": p.k, "node_age": p.node_age} for p in sweep.points],
        "argmin_set": sorted(sweep.argmin_set), "min_age": sweep.min_age,
    }


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    topology = _parse_topology(args.topology) if args.topology else config.layout.topology
    sweep = sweep_cluster_sizes(config.layout.n, config.rates, topology)

    out = Path(args.out)
    fmt = _out_format(out)
    if fmt == ".csv":
        _write_csv(out, ["topology", "n", "m", "k", "node_age"], _sweep_csv_rows(sweep))
    else:
        _write_json(out, _sweep_json(sweep))

    if not args.no_figure:
        from . import plots
        fig = plots.save_sweep_figure(
            [(plots.topology_label(topology.value), sweep)], plots.figure_path(out),
            title=f"n = {sweep.n}")
        print(f"wrote {fig}")
    best = sorted(sweep.argmin_set)
    print(f"{topology.value}: optimal cluster size(s) {best}, "
          f"minimum node age {_fmt(sweep.min_age)}")
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# scaling


def cmd_scaling(args: argparse.Namespace) -> int:
    if not args.topology:
        raise ConfigError("--topology: required for the scaling command")
    topology = _parse_topology(args.topology)
    if topology not in _SCALING_GRID:
        raise PreconditionError("custom topologies have no scaling schedule")
    rates = load_config(args.config).rates if args.config else RateConfig(1, 1, 1, 1)

    grid = _SCALING_GRID[topology]
    if topology is Topology.FULLY_CONNECTED:
        # logarithmic growth is cleanest on the single-cluster family, where
        # the cluster-count term stays constant; fit age against log n
        splits = [(1, n) for n in grid]
        model = "log"
    else:
        from .optimize import scaling_schedule
        splits = [scaling_schedule(topology, n) for n in grid]
        model = "power"
    samples = [(m * k, node_age_exact(rates, m, k, topology)) for m, k in splits]
    fit = fit_scaling_exponent(samples, model=model)

    out = Path(args.out)
    fmt = _out_format(out)
    if fmt == ".json":
        _write_json(out, {"topology": topology.value, "model": fit.model,
                          "exponent": fit.exponent, "r_squared": fit.r_squared,
                          "samples": [[n, age] for n, age in fit.samples]})
    else:
        rows = [[topology.value, str(m * k), str(m), str(k), _fmt(age)]
                for (m, k), (_, age) in zip(splits, samples)]
        rows.append([topology.value, "fit", fit.model, _fmt(fit.exponent), _fmt(fit.r_squared)])
        _write_csv(out, ["topology", "n", "m", "k", "node_age"], rows)

    if not args.no_figure:
        from . import plots
        fig = plots.save_scaling_figure(fit, plots.figure_path(out),
                                        label=plots.topology_label(topology.value))
        print(f"wrote {fig}")
    kind = "slope of age vs log n" if model == "log" else "log-log slope"
    print(f"{topology.value}: {kind} = {_fmt(fit.exponent)} (r^2 = {_fmt(fit.r_squared)})")
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# reproduce-fig3


def fig3_panel(panel: str) -> list[tuple[str, RateConfig, list[SweepResult]]]:
    """Sweep all three topologies at the panel's rates; panel d yields both
    documented rate variants."""
    if panel not in _PANEL_RATES:
        raise ConfigError(f"--panel: expected one of a, b, c, d; got {panel!r}")
    out = []
    for label, rates in _PANEL_RATES[panel]:
        sweeps = [sweep_cluster_sizes(FIG3_N, rates, topo) for topo in _FIG3_TOPOLOGIES]
        out.append((label, rates, sweeps))
    return out


def cmd_reproduce_fig3(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    if out_dir.suffix:
        raise ConfigError("--out: reproduce-fig3 writes a file set; pass a directory path")
    out_dir.mkdir(parents=True, exist_ok=True)
    panel = args.panel
    if panel is None:
        raise ConfigError("--panel: required for reproduce-fig3")

    summary_rows = []
    written = []
    for label, rates, sweeps in fig3_panel(panel):
        tag = f"panel_{panel}" + (f"_{label}" if label else "")
        for sweep in sweeps:
            path = out_dir / f"{tag}_{sweep.topology.value}.csv"
            _write_csv(path, ["topology", "n", "m", "k", "node_age"], _sweep_csv_rows(sweep))
            written.append(path)
            best = "|".join(str(k) for k in sorted(sweep.argmin_set))
            summary_rows.append([panel, label, sweep.topology.value, str(sweep.n),
                                 best, _fmt(sweep.min_age)])
        if not args.no_figure:
            from . import plots
            rate_note = (f"lambda_e={_fmt(rates.lambda_e)} lambda_s={_fmt(rates.lambda_s)} "
                         f"lambda_c={_fmt(rates.lambda_c)} lambda={_fmt(rates.lambda_)}")
            fig = plots.save_sweep_figure(
                [(plots.topology_label(s.topology.value), s) for s in sweeps],
                out_dir / f"{tag}.png", title=f"panel {panel}: {rate_note}")
            written.append(fig)

    summary = out_dir / f"panel_{panel}_summary.csv"
    _write_csv(summary, ["panel", "variant", "topology", "n", "argmin_k", "min_age"],
               summary_rows)
    written.append(summary)

    for row in summary_rows:
        variant = f" [{row[1]}]" if row[1] else ""
        print(f"panel {row[0]}{variant} {row[2]}: k* = {{{row[4]}}}, min age {row[5]}")
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossip-age",
        description="Version age of information in clustered gossip networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="evaluate exact/approximate ages for one configuration")
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="optional output file (.csv or .json)")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte-Carlo simulation of one configuration")
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", required=True, help="output file (.csv or .json)")
    p.add_argument("--seed", type=int, help="base seed (replication r uses seed XOR r)")
    p.add_argument("--horizon", type=float, help="simulated time per replication")
    p.add_argument("--replications", type=int, help="number of independent replications")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="parallel replication workers (default: machine parallelism)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="node age across every divisor split m*k = n")
    p.add_argument("--config", required=True, help="JSON configuration file (n and rates)")
    p.add_argument("--out", required=True, help="output file (.csv or .json)")
    p.add_argument("--topology", choices=[t.value for t in Topology],
                   help="override the config's topology")
    p.add_argument("--no-figure", action="store_true", help="skip the .png figure")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scaling", help="scaling-schedule ages and growth-exponent fit")
    p.add_argument("--topology", required=True,
                   choices=[t.value for t in Topology if t is not Topology.CUSTOM])
    p.add_argument("--config", help="optional JSON configuration file (rates; default unit)")
    p.add_argument("--out", required=True, help="output file (.csv or .json)")
    p.add_argument("--no-figure", action="store_true", help="skip the .png figure")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("reproduce-fig3",
                       help="cluster-size sweeps for all topologies at n=120 panel rates")
    p.add_argument("--panel", required=True, choices=["a", "b", "c", "d"])
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figure", action="store_true", help="skip the .png figures")
    p.set_defaults(func=cmd_reproduce_fig3)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
