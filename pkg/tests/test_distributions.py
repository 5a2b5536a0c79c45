import math

import numpy as np
import pytest

from lorentzgas.distributions import (AngularWeight, CesaroSpec, McConfig,
                                      SurvivalCurve, cesaro_survival,
                                      cesaro_survival_nodes, chunk_sizes,
                                      disk_survival_curve,
                                      disk_survival_directional,
                                      disk_survival_weighted, scaled_survival,
                                      slit_survival_mc)
from lorentzgas.slits import Direction, slit_partition, slit_survival
from lorentzgas.tracer import ObstacleConfig

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(samples=0)
    with pytest.raises(ValueError):
        McConfig(samples=10, workers=0)
    with pytest.raises(ValueError):
        CesaroSpec(eps=0.3, eps_star=0.25)
    with pytest.raises(ValueError):
        CesaroSpec(eps=0.25, eps_star=0.25)  # degenerate range rejected
    with pytest.raises(ValueError):
        CesaroSpec(eps=1e-3, grid_points=1)
    spec = CesaroSpec(eps=1e-2, eps_star=0.25, grid_points=5)
    assert spec.nodes()[0] == pytest.approx(1e-2)
    assert spec.nodes()[-1] == pytest.approx(0.25)
    assert spec.trapezoid_weights().sum() == pytest.approx(spec.log_width)


def test_survival_curve_invariants():
    SurvivalCurve.exact([0.0, 1.0, 2.0], [1.0, 0.5, 0.0])
    with pytest.raises(ValueError):
        SurvivalCurve.exact([0.0, 1.0, 1.0], [1.0, 0.5, 0.2])  # times not strict
    with pytest.raises(ValueError):
        SurvivalCurve.exact([0.0, 1.0], [0.5, 0.9])  # exact curve must decrease
    # noisy curves may wiggle
    c = SurvivalCurve.estimated([0.0, 1.0], [0.5, 0.51], [0.01, 0.01])
    assert c.rows()[1][2] == 0.01


def test_angular_weight_kinds():
    rng = np.random.default_rng(0)
    octant = AngularWeight("uniform-octant")
    th = octant.sample(rng, 1000)
    assert np.all((th >= 0.0) & (th <= math.pi / 4))
    assert octant.density_sup == pytest.approx(4.0 / math.pi)
    circle = AngularWeight("uniform-circle")
    th = circle.sample(rng, 1000)
    assert np.all((th >= 0.0) & (th <= 2 * math.pi))
    edges = np.array([0.0, 0.2, math.pi / 4])
    dens = np.array([2.0, (1.0 - 0.4) / (math.pi / 4 - 0.2)])
    table = AngularWeight("table", table=(edges, dens))
    th = table.sample(rng, 4000)
    assert np.all((th >= 0.0) & (th <= math.pi / 4))
    frac = np.mean(th < 0.2)
    assert abs(frac - 0.4) < 0.04
    with pytest.raises(ValueError):
        AngularWeight("table", table=(edges, dens * 2.0))
    with pytest.raises(ValueError):
        AngularWeight("bogus")


def test_survival_at_time_zero():
    cfg = ObstacleConfig(0.1)
    w = AngularWeight("uniform-octant")
    assert disk_survival_weighted(cfg, 0.0, w, McConfig(samples=100, seed=1)) == (1.0, 0.0)
    assert disk_survival_directional(cfg, 0.0, Direction(0.4),
                                     McConfig(samples=100, seed=1)) == (1.0, 0.0)


def test_worker_determinism():
    cfg = ObstacleConfig(0.1)
    w = AngularWeight("uniform-octant")
    a = disk_survival_weighted(cfg, 20.0, w, McConfig(samples=40000, seed=9, workers=1))
    b = disk_survival_weighted(cfg, 20.0, w, McConfig(samples=40000, seed=9, workers=3))
    assert a == b
    c = disk_survival_weighted(cfg, 20.0, w, McConfig(samples=40000, seed=10, workers=1))
    assert a != c
    assert chunk_sizes(40000) == [16384, 16384, 7232]


def test_monotone_in_time():
    cfg = ObstacleConfig(0.15)
    w = AngularWeight("uniform-octant")
    prev = 1.1
    for t in (0.0, 1.0, 3.0, 9.0, 27.0):
        est, err = disk_survival_weighted(cfg, t, w, McConfig(samples=20000, seed=4))
        assert est <= prev + 4.0 * max(err, 1e-3)
        prev = est


def test_directional_envelope():
    direction = Direction.from_slope(GOLDEN)
    r = 0.1
    cfg = ObstacleConfig(r)
    part = slit_partition(r, direction)
    ts = np.linspace(0.0, part.l_c / direction.cos, 20)
    est, err = disk_survival_curve(cfg, direction, ts, McConfig(samples=20000, seed=11))
    lo = slit_survival(r, direction, ts + r / 2.0, part=part) - 4.0 * err
    hi = slit_survival(r, direction, np.maximum(ts - r / 2.0, 0.0), part=part) + 4.0 * err
    assert np.all(est >= lo - 1e-12)
    assert np.all(est <= hi + 1e-12)


def test_vanishes_beyond_longest_strip():
    direction = Direction.from_slope(GOLDEN)
    r = 0.1
    part = slit_partition(r, direction)
    t = part.l_c / direction.cos + r
    est, err = disk_survival_directional(ObstacleConfig(r), t, direction,
                                         McConfig(samples=20000, seed=12))
    assert est <= 4.0 * max(err, 5e-4)


def test_slit_mc_matches_law():
    direction = Direction.from_slope(GOLDEN)
    r = 0.1
    part = slit_partition(r, direction)
    ts = np.linspace(0.0, part.l_c / direction.cos, 15)
    est, err = slit_survival_mc(r, direction, ts, McConfig(samples=30000, seed=2))
    law = slit_survival(r, direction, ts, part=part)
    sig = np.sqrt(np.maximum(law * (1.0 - law), 0.0) / 30000)
    assert np.all(np.abs(est - law) <= 4.0 * sig + 1e-12)


def test_scaled_survival_band():
    # pilot-frozen regression band for r*t*survival on the sweep t = 5/r
    w = AngularWeight("uniform-octant")
    for r in (0.2, 0.1, 0.05, 0.025):
        v = scaled_survival(ObstacleConfig(r), 5.0 / r, w,
                            McConfig(samples=20000, seed=3))
        assert 0.05 <= v <= 2.0
        assert v > 0.0
    for t_mult in (2.0, 8.0):
        v = scaled_survival(ObstacleConfig(0.1), t_mult / 0.1, w,
                            McConfig(samples=20000, seed=3))
        assert 0.05 <= v <= 2.0
    with pytest.raises(ValueError):
        scaled_survival(ObstacleConfig(0.1), 5.0, w, McConfig(samples=10, seed=0))


def test_weighted_survival_band_fixed_config():
    # r = 0.1, t = 5/r: pilot value of r*t*estimate was ~0.21
    cfg = ObstacleConfig(0.1)
    w = AngularWeight("uniform-octant")
    est, _ = disk_survival_weighted(cfg, 50.0, w, McConfig(samples=30000, seed=6))
    assert 0.1 <= 0.1 * 50.0 * est <= 0.5


def test_cesaro_small_run_and_determinism():
    w = AngularWeight("uniform-octant")
    spec = CesaroSpec(eps=0.02, eps_star=0.25, grid_points=4)
    mc = McConfig(samples=4000, seed=42)
    v1, s1 = cesaro_survival(10.0, w, spec, mc)
    v2, s2 = cesaro_survival(10.0, w, spec, mc)
    assert (v1, s1) == (v2, s2)
    assert 0.0 < v1 < 1.0
    assert s1 > 0.0
    rows = cesaro_survival_nodes(10.0, w, spec, mc)
    assert len(rows) == 4
    recombined = sum(wi * est for wi, (_, _, est, _)
                     in zip(spec.trapezoid_weights() / spec.log_width, rows))
    assert recombined == pytest.approx(v1, abs=1e-15)
    with pytest.raises(ValueError):
        cesaro_survival(1.2, w, spec, mc)  # t* must exceed sqrt(2)
