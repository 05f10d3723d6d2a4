"""Figure rendering writes real image files for both report kinds."""

from gossip_age import (RateConfig, Topology, fit_scaling_exponent,
                        scaling_samples, sweep_cluster_sizes)
from gossip_age.plots import figure_path, save_scaling_figure, save_sweep_figure

UNIT = RateConfig(1, 1, 1, 1)

PNG_MAGIC = b"\x89PNG"


def test_figure_path_derivation(tmp_path):
    assert figure_path(tmp_path / "out.csv") == tmp_path / "out.png"
    assert figure_path(tmp_path / "out.json", "ring") == tmp_path / "out_ring.png"


def test_sweep_figure_multiple_curves(tmp_path):
    sweeps = [(topo.value, sweep_cluster_sizes(24, UNIT, topo))
              for topo in (Topology.FULLY_CONNECTED, Topology.BI_RING, Topology.DISCONNECTED)]
    path = save_sweep_figure(sweeps, tmp_path / "sweep.png", title="n = 24")
    assert path.exists()
    assert path.read_bytes()[:4] == PNG_MAGIC


def test_scaling_figure_power_and_log_models(tmp_path):
    samples = scaling_samples(Topology.DISCONNECTED, UNIT, [100, 1000, 10000, 100000])
    power = fit_scaling_exponent(samples)
    path = save_scaling_figure(power, tmp_path / "power.png", label="disconnected")
    assert path.read_bytes()[:4] == PNG_MAGIC

    import math
    log_fit = fit_scaling_exponent([(n, 1 + math.log(n)) for n in (16, 256, 4096, 65536)],
                                   model="log")
    path = save_scaling_figure(log_fit, tmp_path / "log.png")
    assert path.read_bytes()[:4] == PNG_MAGIC
