"""Monte Carlo survival estimators and their logarithmic size averages.

Determinism contract: work is split into fixed-size chunks whose RNG streams
derive from (seed, chunk index) alone, and chunk results are integer counts
combined by addition.  The worker count schedules chunks but cannot change
the estimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .slits import Direction, slit_exit_times
from .tracer import ObstacleConfig, free_paths, sample_free_positions

CHUNK = 1 << 14  # samples per RNG substream; fixed so workers cannot matter

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class McConfig:
    """Sample budget, base seed, parallel width and optional trace horizon."""

    samples: int
    seed: int = 0
    workers: int = 1
    t_max: float | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class CesaroSpec:
    """Log-uniform grid of obstacle sizes in [eps, eps_star] for dr/r averages."""

    eps: float
    eps_star: float = 0.25
    grid_points: int = 30

    def __post_init__(self):
        if not 0.0 < self.eps < self.eps_star <= 0.25:
            raise ValueError(
                f"need 0 < eps < eps_star <= 1/4, got eps={self.eps}, "
                f"eps_star={self.eps_star}")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")

    def nodes(self) -> np.ndarray:
        return np.exp(np.linspace(math.log(self.eps), math.log(self.eps_star),
                                  self.grid_points))

    def trapezoid_weights(self) -> np.ndarray:
        h = (math.log(self.eps_star) - math.log(self.eps)) / (self.grid_points - 1)
        w = np.full(self.grid_points, h)
        w[0] = w[-1] = h / 2.0
        return w

    @property
    def log_width(self) -> float:
        return math.log(self.eps_star) - math.log(self.eps)


@dataclass(frozen=True)
class SurvivalCurve:
    """Sampled survival table: rows (t, value, stderr-or-None).

    Times must increase strictly; exact curves (stderr None throughout) must
    be nonincreasing in value.
    """

    entries: tuple[tuple[float, float, float | None], ...]

    def __post_init__(self):
        ts = [e[0] for e in self.entries]
        if any(a >= b for a, b in zip(ts, ts[1:])):
            raise ValueError("curve times must increase strictly")
        if all(e[2] is None for e in self.entries):
            vals = [e[1] for e in self.entries]
            if any(a < b - 1e-12 for a, b in zip(vals, vals[1:])):
                raise ValueError("exact survival values must be nonincreasing")

    @classmethod
    def exact(cls, ts, values) -> "SurvivalCurve":
        return cls(tuple((float(t), float(v), None) for t, v in zip(ts, values)))

    @classmethod
    def estimated(cls, ts, values, stderrs) -> "SurvivalCurve":
        return cls(tuple((float(t), float(v), float(e))
                         for t, v, e in zip(ts, values, stderrs)))

    def rows(self):
        return list(self.entries)


class AngularWeight:
    """Direction sampling density for the survival probability.

    kinds: 'uniform-octant' (uniform angle on (0, pi/4), the default used by
    the size-average experiments), 'uniform-circle' (uniform on the full
    circle), or 'table' (piecewise-constant density on (0, pi/4), normalized).
    ``density_sup`` is the sup of the corresponding probability density of
    the angle on its support.
    """

    KINDS = ("uniform-octant", "uniform-circle", "table")

    def __init__(self, kind: str = "uniform-octant", table=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown angular weight kind {kind!r}")
        self.kind = kind
        self.edges = None
        self.density = None
        if kind == "table":
            if table is None:
                raise ValueError("table kind requires (edges, density) arrays")
            edges, density = table
            edges = np.asarray(edges, dtype=float)
            density = np.asarray(density, dtype=float)
            if edges.ndim != 1 or density.ndim != 1 or edges.size != density.size + 1:
                raise ValueError("table needs edges of size len(density)+1")
            if edges[0] < 0.0 or edges[-1] > math.pi / 4 or np.any(np.diff(edges) <= 0):
                raise ValueError("table edges must increase inside (0, pi/4)")
            if np.any(density < 0.0):
                raise ValueError("table density must be nonnegative")
            mass = float(np.sum(density * np.diff(edges)))
            if abs(mass - 1.0) > 1e-9:
                raise ValueError(f"table density must integrate to 1, got {mass}")
            self.edges = edges
            self.density = density

    @property
    def density_sup(self) -> float:
        if self.kind == "uniform-octant":
            return 4.0 / math.pi
        if self.kind == "uniform-circle":
            return 1.0 / (2.0 * math.pi)
        return float(np.max(self.density))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "uniform-octant":
            return rng.random(n) * (math.pi / 4.0)
        if self.kind == "uniform-circle":
            return rng.random(n) * (2.0 * math.pi)
        cdf = np.concatenate(([0.0], np.cumsum(self.density * np.diff(self.edges))))
        cdf /= cdf[-1]
        return np.interp(rng.random(n), cdf, self.edges)

    def state(self):
        return (self.kind, None if self.edges is None else
                (self.edges.tolist(), self.density.tolist()))

    @classmethod
    def from_state(cls, state):
        kind, table = state
        return cls(kind, table=None if table is None else
                   (np.array(table[0]), np.array(table[1])))


def chunk_sizes(samples: int) -> list[int]:
    full, rem = divmod(samples, CHUNK)
    return [CHUNK] * full + ([rem] if rem else [])


def chunk_seeds(seed: int, n_chunks: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(n_chunks)


def run_chunks(fn, tasks: list, workers: int) -> list:
    """Map fn over chunk tasks, optionally on a process pool; order preserved."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _disk_chunk(task) -> int:
    r, t, strict, weight_state, theta, n, ss = task
    rng = np.random.default_rng(ss)
    cfg = ObstacleConfig(r)
    pos = sample_free_positions(r, n, rng)
    if theta is not None:
        angles = np.full(n, theta)
    else:
        angles = AngularWeight.from_state(weight_state).sample(rng, n)
    vel = np.column_stack((np.cos(angles), np.sin(angles)))
    tau = free_paths(cfg, pos, vel, t_max=t)
    if strict:
        return int(np.count_nonzero(tau > t))
    return int(np.count_nonzero(tau >= t))


def _disk_survival(r: float, t: float, *, weight=None, theta=None,
                   strict: bool, samples: int, seed_seq, workers: int
                   ) -> tuple[float, float]:
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 1.0, 0.0
    sizes = chunk_sizes(samples)
    seeds = seed_seq.spawn(len(sizes))
    wstate = None if weight is None else weight.state()
    tasks = [(r, t, strict, wstate, theta, n, ss) for n, ss in zip(sizes, seeds)]
    counts = run_chunks(_disk_chunk, tasks, workers)
    hits = sum(counts)
    est = hits / samples
    stderr = math.sqrt(max(est * (1.0 - est), 0.0) / samples)
    return est, stderr


def disk_survival_weighted(cfg: ObstacleConfig, t: float, weight: AngularWeight,
                           mc: McConfig) -> tuple[float, float]:
    """P(free path > t) with position uniform off the obstacles and the angle
    drawn from ``weight``; returns (estimate, binomial standard error)."""
    return _disk_survival(cfg.r, t, weight=weight, strict=True,
                          samples=mc.samples,
                          seed_seq=np.random.SeedSequence(mc.seed),
                          workers=mc.workers)


def disk_survival_directional(cfg: ObstacleConfig, t: float, direction: Direction,
                              mc: McConfig) -> tuple[float, float]:
    """P(free path >= t) at one fixed direction, position uniform off the obstacles."""
    return _disk_survival(cfg.r, t, theta=direction.theta, strict=False,
                          samples=mc.samples,
                          seed_seq=np.random.SeedSequence(mc.seed),
                          workers=mc.workers)


def _slit_chunk(task) -> np.ndarray:
    r, theta, ts, n, ss = task
    rng = np.random.default_rng(ss)
    direction = Direction(theta)
    z = rng.random((n, 2))
    lam = slit_exit_times(r, direction, z)
    return (lam[:, None] >= np.asarray(ts)[None, :]).sum(axis=0)


def slit_survival_mc(r: float, direction: Direction, ts, mc: McConfig
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Empirical survival of the slit exit time on a time grid.

    Returns (estimates, standard errors) per grid time; the closed-form
    survival law is this curve's oracle.
    """
    ts = np.asarray(ts, dtype=float)
    sizes = chunk_sizes(mc.samples)
    seeds = chunk_seeds(mc.seed, len(sizes))
    tasks = [(r, direction.theta, ts.tolist(), n, ss) for n, ss in zip(sizes, seeds)]
    counts = run_chunks(_slit_chunk, tasks, mc.workers)
    hits = np.sum(np.stack(counts), axis=0)
    est = hits / mc.samples
    stderr = np.sqrt(np.maximum(est * (1.0 - est), 0.0) / mc.samples)
    return est, stderr


def _disk_curve_chunk(task) -> np.ndarray:
    r, theta, ts, n, ss = task
    rng = np.random.default_rng(ss)
    cfg = ObstacleConfig(r)
    pos = sample_free_positions(r, n, rng)
    vel = np.tile((math.cos(theta), math.sin(theta)), (n, 1))
    tau = free_paths(cfg, pos, vel, t_max=float(max(ts)))
    return (tau[:, None] >= np.asarray(ts)[None, :]).sum(axis=0)


def disk_survival_curve(cfg: ObstacleConfig, direction: Direction, ts,
                        mc: McConfig) -> tuple[np.ndarray, np.ndarray]:
    """Empirical survival of the free path on a time grid at one direction.

    One traced batch serves the whole grid; each grid value is the binomial
    mean of the indicator free path >= t.
    """
    ts = np.asarray(ts, dtype=float)
    sizes = chunk_sizes(mc.samples)
    seeds = chunk_seeds(mc.seed, len(sizes))
    tasks = [(cfg.r, direction.theta, ts.tolist(), n, ss)
             for n, ss in zip(sizes, seeds)]
    counts = run_chunks(_disk_curve_chunk, tasks, mc.workers)
    est = np.sum(np.stack(counts), axis=0) / mc.samples
    stderr = np.sqrt(np.maximum(est * (1.0 - est), 0.0) / mc.samples)
    return est, stderr


def cesaro_survival(t_star: float, weight: AngularWeight, spec: CesaroSpec,
                    mc: McConfig) -> tuple[float, float]:
    """Log-uniform size average of the rescaled survival probability.

    Each grid node r carries a Monte Carlo estimate of the survival at time
    t_star/r; the trapezoid rule in ln r combines them and the node errors
    propagate through the quadrature weights.  The average is normalized by
    the grid's log width (equivalent to the 1/|ln eps| normalization in the
    vanishing-eps limit, and unbiased at finite eps; see README).
    """
    rows = cesaro_survival_nodes(t_star, weight, spec, mc)
    weights = spec.trapezoid_weights() / spec.log_width
    value = sum(w * est for w, (_, _, est, _) in zip(weights, rows))
    var = sum((w * se) ** 2 for w, (_, _, _, se) in zip(weights, rows))
    return value, math.sqrt(var)


def cesaro_survival_nodes(t_star: float, weight: AngularWeight, spec: CesaroSpec,
                          mc: McConfig) -> list[tuple[float, float, float, float]]:
    """Per-node rows (r, t, estimate, stderr) of the size-average grid."""
    if t_star <= SQRT2:
        raise ValueError(f"the size average requires t_star > sqrt(2), got {t_star}")
    nodes = spec.nodes()
    node_seeds = np.random.SeedSequence(mc.seed).spawn(len(nodes))
    rows = []
    for r, ss in zip(nodes, node_seeds):
        t = t_star / float(r)
        est, se = _disk_survival(float(r), t, weight=weight, strict=True,
                                 samples=mc.samples, seed_seq=ss, workers=mc.workers)
        rows.append((float(r), t, est, se))
    return rows


def scaled_survival(cfg: ObstacleConfig, t: float, weight: AngularWeight,
                    mc: McConfig) -> float:
    """r * t * P(free path > t); bounded above and below across scales."""
    if t <= 1.0 / cfg.r:
        raise ValueError(f"the scaled survival needs t > 1/r, got t={t}, r={cfg.r}")
    est, _ = disk_survival_weighted(cfg, t, weight, mc)
    return cfg.r * t * est
