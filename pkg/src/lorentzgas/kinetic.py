"""Transport with absorbing lattice obstacles in the small-scatterer scaling.

The solution of the absorbing transport problem is the transported initial
datum masked by survival of the backward ray in the unscaled obstacle
lattice; after log-averaging over obstacle sizes, long-time moments approach
those of the profile 2 f_in(x - tv, v)/(pi^2 t).  Note the contrast with a
random (Poisson) scatterer configuration: a periodic lattice admits infinite
collision-free channels, so the limit is not the constant-rate exponential
damping of a linear Boltzmann equation; the effective damping rate decays
like 1/t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import CesaroSpec, McConfig, chunk_seeds, chunk_sizes, run_chunks
from .tracer import ObstacleConfig, free_paths

PI2 = math.pi ** 2


class CosineBump:
    """C^1 plateau bump: 1 on the plateau box, cosine-squared taper, 0 outside.

    Product of one-dimensional clamped cosines per coordinate; velocity
    dependence is omitted (isotropic data), which the moment experiments
    need anyway for their exact scaling checks.
    """

    def __init__(self, plateau: float = 1.0, taper: float = 0.5,
                 center=(0.0, 0.0), height: float = 1.0):
        if plateau <= 0.0 or taper <= 0.0 or height <= 0.0:
            raise ValueError("plateau, taper and height must be positive")
        self.plateau = float(plateau)
        self.taper = float(taper)
        self.center = (float(center[0]), float(center[1]))
        self.height = float(height)

    @property
    def half_width(self) -> float:
        return self.plateau + self.taper

    @property
    def box(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        h = self.half_width
        return (cx - h, cx + h, cy - h, cy + h)

    def _axis(self, u: np.ndarray) -> np.ndarray:
        a = np.abs(u)
        out = np.zeros_like(a)
        inside = a <= self.plateau
        out[inside] = 1.0
        ramp = (~inside) & (a < self.half_width)
        out[ramp] = np.cos(0.5 * math.pi * (a[ramp] - self.plateau) / self.taper) ** 2
        return out

    def __call__(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        vals = self.height * self._axis(xy[:, 0] - self.center[0]) \
            * self._axis(xy[:, 1] - self.center[1])
        return vals

    def at(self, x: float, y: float) -> float:
        return float(self(np.array([[x, y]]))[0])


def _inside_obstacle(z: np.ndarray, r: float) -> np.ndarray:
    w = z - np.round(z)
    return w[:, 0] ** 2 + w[:, 1] ** 2 <= (r / 2.0) ** 2


def transported_density(fin: CosineBump, eps: float, t: float, x, v) -> float:
    """Absorbing-transport solution at one phase point.

    Value is fin(x - tv) when the backward ray survives to time t/eps in the
    unscaled lattice (its free path there, set to 0 off the free domain,
    reaches t/eps), else 0.
    """
    if not 0.0 < eps < 0.25:
        raise ValueError(f"eps must lie in (0, 1/4), got {eps}")
    if t < 0.0:
        raise ValueError("t must be >= 0")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    val = fin.at(x[0] - t * v[0], x[1] - t * v[1])
    if val == 0.0:
        return 0.0
    z = (x / eps)[None, :]
    if bool(_inside_obstacle(z, eps)[0]):
        return 0.0  # exit time extended by 0 inside the obstacles
    if t == 0.0:
        return val
    tau = free_paths(ObstacleConfig(eps), z, -v[None, :], t_max=t / eps)[0]
    return val if tau >= t / eps else 0.0


def limit_density(fin: CosineBump, t: float, x, v) -> float:
    """Long-time size-averaged profile 2 fin(x - tv)/(pi^2 t)."""
    if t <= 0.0:
        raise ValueError(f"the limit profile requires t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return 2.0 * fin.at(x[0] - t * v[0], x[1] - t * v[1]) / (PI2 * t)


@dataclass(frozen=True)
class MomentComparison:
    """Size-averaged moment of the transported density next to its limit."""

    averaged: float
    limit: float
    abs_error: float
    nodes: tuple[tuple[float, float], ...]  # (r, node moment)


def _segment_survival_chunk(task) -> np.ndarray:
    """Counts, per size node, of weighted samples whose segment stays free."""
    fin_state, chi_state, t, r_nodes, force, n, ss = task
    fin = CosineBump(*fin_state)
    chi = CosineBump(*chi_state)
    rng = np.random.default_rng(ss)
    x0, x1, y0, y1 = fin.box
    y = np.column_stack((x0 + (x1 - x0) * rng.random(n),
                         y0 + (y1 - y0) * rng.random(n)))
    phi = 2.0 * math.pi * rng.random(n)
    vel = np.column_stack((np.cos(phi), np.sin(phi)))
    base = fin(y) * chi(y + t * vel)
    live = base > 0.0
    sums = np.empty(len(r_nodes) + 1)
    sums[0] = float(base.sum())
    for i, r in enumerate(r_nodes):
        if force:
            sums[i + 1] = float(base.sum())
            continue
        surv = np.zeros(n, dtype=bool)
        if live.any():
            z = y[live] / r
            inside = _inside_obstacle(z, r)
            ok = np.nonzero(live)[0][~inside]
            if ok.size:
                tau = free_paths(ObstacleConfig(r), y[ok] / r, vel[ok],
                                 t_max=t / r)
                surv[ok] = tau >= t / r
        sums[i + 1] = float(base[surv].sum())
    return sums


def moment_compare(fin: CosineBump, chi: CosineBump, t: float,
                   spec: CesaroSpec, mc: McConfig,
                   force_survival: bool = False) -> MomentComparison:
    """Size-averaged moment of the transported density against its limit.

    Both moments integrate against chi over phase space with the same sample
    points: positions importance-sampled from the support box of the initial
    datum (where the transported integrand lives), angles uniform on the
    circle.  ``force_survival`` short-circuits the ray tracing, which must
    reproduce the plain transported moment exactly (a plumbing check).
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    r_nodes = spec.nodes().tolist()
    sizes = chunk_sizes(mc.samples)
    seeds = chunk_seeds(mc.seed, len(sizes))
    fin_state = (fin.plateau, fin.taper, fin.center, fin.height)
    chi_state = (chi.plateau, chi.taper, chi.center, chi.height)
    tasks = [(fin_state, chi_state, t, r_nodes, force_survival, n, ss)
             for n, ss in zip(sizes, seeds)]
    parts = run_chunks(_segment_survival_chunk, tasks, mc.workers)
    sums = np.sum(np.stack(parts), axis=0)
    x0, x1, y0, y1 = fin.box
    weight = (x1 - x0) * (y1 - y0) * 2.0 * math.pi / mc.samples
    plain = sums[0] * weight
    limit = plain * 2.0 / (PI2 * t)
    node_moments = sums[1:] * weight
    w = spec.trapezoid_weights() / spec.log_width
    averaged = float(np.dot(w, node_moments))
    return MomentComparison(
        averaged=averaged,
        limit=limit,
        abs_error=abs(averaged - limit),
        nodes=tuple((float(r), float(m)) for r, m in zip(r_nodes, node_moments)),
    )
