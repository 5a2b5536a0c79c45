"""First-contact ray tracing among disks of diameter r at the integer lattice.

The traversal walks unit cells incrementally; inside each visited cell only
the four corner disks can be met (the disk radius r/2 stays below 1/4), so
the inner loop is a fixed set of ray-circle quadratics.  Work is bounded by
the requested horizon, never by the (possibly infinite) free path itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .slits import Direction, slit_exit_time, slit_partition

HIT_TOL = 1e-12  # smallest accepted ray parameter; guards boundary restarts


@dataclass(frozen=True)
class ObstacleConfig:
    """Disk diameter r; obstacles have radius r/2 and sit at every lattice point."""

    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 0.5:
            raise ValueError(f"obstacle diameter must lie in (0, 1/2), got {self.r}")


def free_area_fraction(r: float) -> float:
    """Area fraction of the unit cell outside the obstacle, 1 - pi r^2 / 4."""
    return 1.0 - math.pi * r * r / 4.0


def sample_free_positions(r: float, n: int, rng: np.random.Generator,
                          return_attempts: bool = False):
    """Rejection-sample n points uniform on the unit cell minus the obstacle."""
    rho2 = (r / 2.0) ** 2
    chunks = []
    got = 0
    attempts = 0
    while got < n:
        m = max(int((n - got) * 1.3) + 16, 32)
        draw = rng.random((m, 2))
        w = draw - np.round(draw)
        keep = w[:, 0] ** 2 + w[:, 1] ** 2 > rho2
        attempts += m
        kept = draw[keep]
        chunks.append(kept)
        got += kept.shape[0]
    out = np.concatenate(chunks)[:n]
    if return_attempts:
        # overdraw past n is still a fair Bernoulli sample; count it all
        total_kept = sum(c.shape[0] for c in chunks)
        return out, attempts, total_kept
    return out


def free_paths(cfg: ObstacleConfig, pos, vel, t_max: float) -> np.ndarray:
    """Exact first-intersection parameters for a batch of rays.

    pos, vel have shape (N, 2) with unit velocities.  Returns tau per ray,
    or +inf where no boundary contact occurs within t_max.  Raises if any
    start point lies inside an obstacle.
    """
    pos = np.atleast_2d(np.asarray(pos, dtype=float))
    vel = np.atleast_2d(np.asarray(vel, dtype=float))
    n = pos.shape[0]
    rho = cfg.r / 2.0
    w = pos - np.round(pos)
    if np.any(w[:, 0] ** 2 + w[:, 1] ** 2 <= rho * rho):
        raise ValueError("ray start inside an obstacle")

    x = pos[:, 0].copy()
    y = pos[:, 1].copy()
    vx = vel[:, 0].copy()
    vy = vel[:, 1].copy()
    ix = np.floor(x)
    iy = np.floor(y)

    with np.errstate(divide="ignore", invalid="ignore"):
        inv_vx = np.where(vx != 0.0, 1.0 / vx, np.inf)
        inv_vy = np.where(vy != 0.0, 1.0 / vy, np.inf)
        t_next_x = np.where(vx > 0, (ix + 1.0 - x) * inv_vx,
                            np.where(vx < 0, (ix - x) * inv_vx, np.inf))
        t_next_y = np.where(vy > 0, (iy + 1.0 - y) * inv_vy,
                            np.where(vy < 0, (iy - y) * inv_vy, np.inf))
    t_next_x = np.where(np.isnan(t_next_x), np.inf, t_next_x)
    t_next_y = np.where(np.isnan(t_next_y), np.inf, t_next_y)
    step_x = np.sign(vx)
    step_y = np.sign(vy)
    dt_x = np.abs(inv_vx)
    dt_y = np.abs(inv_vy)

    tau = np.full(n, np.inf)
    act = np.arange(n)  # indices of rays still walking
    max_iters = int(4 * t_max) + 16
    for _ in range(max_iters):
        if act.size == 0:
            break
        best = np.full(act.size, np.inf)
        for dx_c in (0.0, 1.0):
            for dy_c in (0.0, 1.0):
                rx = x[act] - (ix[act] + dx_c)
                ry = y[act] - (iy[act] + dy_c)
                b = rx * vx[act] + ry * vy[act]
                c0 = rx * rx + ry * ry - rho * rho
                disc = b * b - c0
                ok = disc > 0.0
                sq = np.sqrt(np.where(ok, disc, 0.0))
                t1 = -b - sq
                t2 = -b + sq
                root = np.where(t1 > HIT_TOL, t1,
                                np.where(t2 > HIT_TOL, t2, np.inf))
                best = np.minimum(best, np.where(ok, root, np.inf))
        t_exit = np.minimum(t_next_x[act], t_next_y[act])
        done_hit = best <= t_exit + HIT_TOL
        if done_hit.any():
            rows = act[done_hit]
            vals = best[done_hit]
            tau[rows] = np.where(vals <= t_max, vals, np.inf)
        keep = ~done_hit
        act = act[keep]
        if act.size == 0:
            break
        # advance survivors into the next cell along the smaller crossing;
        # the entry parameter of the new cell is the old cell's exit
        entered = t_exit[keep]
        go_x = t_next_x[act] <= t_next_y[act]
        ax = act[go_x]
        ay = act[~go_x]
        ix[ax] += step_x[ax]
        t_next_x[ax] += dt_x[ax]
        iy[ay] += step_y[ay]
        t_next_y[ay] += dt_y[ay]
        past = entered > t_max
        if past.any():
            act = act[~past]  # survived the horizon; tau stays +inf
    else:
        raise RuntimeError("cell walk failed to terminate within its bound")
    return tau


def free_path(cfg: ObstacleConfig, x, v, t_max: float) -> float:
    """Exact free path from one start, or +inf if it exceeds t_max."""
    return float(free_paths(cfg, np.asarray(x, dtype=float)[None, :],
                            np.asarray(v, dtype=float)[None, :], t_max)[0])


def survives(cfg: ObstacleConfig, x, v, t: float, strict: bool = True) -> bool:
    """Whether the free path exceeds t (or reaches it, with strict=False).

    Never traces beyond path length t.
    """
    tau = free_path(cfg, x, v, t_max=t)
    return tau > t if strict else tau >= t


def exit_time_pair(cfg: ObstacleConfig, direction: Direction, x) -> tuple[float, float]:
    """(disk free path, slit exit time) from the same start and direction.

    Away from an r/2-neighborhood of the slits these satisfy
    lam - R/2 <= tau <= lam + r/2 with R = r/cos(theta).
    """
    part = slit_partition(cfg.r, direction)
    lam = slit_exit_time(cfg.r, direction, x)
    horizon = part.l_c / direction.cos + cfg.r + 1.0
    tau = free_path(cfg, x, direction.v, t_max=horizon)
    return tau, lam
