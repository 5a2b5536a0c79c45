"""Slitted-torus geometry: three-length orbit partition and exact survival law.

Replacing each disk obstacle by the vertical segment of length R = r/cos(theta)
through its center (the shadow of the disk along the flow) makes the exit-time
statistics of the linear flow exactly computable: the torus minus the slit
splits into three strips whose lengths are consecutive convergent denominators
of tan(theta) and whose widths are affine in the error sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cf import ContinuedFraction, DEFAULT_DEPTH, expand, locate

# Open angular domain (0, pi/4); the ends are measure zero and numerically
# singular (division by cos(theta), slope 0), so inputs clamp to this range.
THETA_MIN = 1e-9
THETA_MAX = math.pi / 4 - 1e-9


class HorizonError(RuntimeError):
    """A ray failed to meet the slit within the guaranteed orbit-length bound."""


class Direction:
    """Unit flow direction with angle clamped into [1e-9, pi/4 - 1e-9]."""

    __slots__ = ("theta", "cos", "sin", "alpha")

    def __init__(self, theta: float):
        self.theta = min(max(float(theta), THETA_MIN), THETA_MAX)
        self.cos = math.cos(self.theta)
        self.sin = math.sin(self.theta)
        self.alpha = math.tan(self.theta)

    @classmethod
    def from_slope(cls, alpha: float) -> "Direction":
        return cls(math.atan(alpha))

    @property
    def v(self) -> tuple[float, float]:
        return (self.cos, self.sin)

    def __repr__(self) -> str:
        return f"Direction(theta={self.theta!r})"


@dataclass(frozen=True)
class SlitPartition:
    """The three strips of the torus split by one slit.

    Lengths l_a < l_b < l_c = l_a + l_b are in lattice-crossing units (time
    along the flow is length / cos(theta)); widths s_a, s_b, s_c are measured
    along the slit, in the same units as R.  l_a*s_a + l_b*s_b + l_c*s_c = 1.
    """

    n: int
    k: int
    l_a: int
    l_b: int
    l_c: int
    s_a: float
    s_b: float
    s_c: float
    big_r: float
    cos_theta: float


def slit_length(r: float, direction: Direction) -> float:
    """R = r/cos(theta), the vertical extent of the slit."""
    if not 0.0 < r < 0.5:
        raise ValueError(f"slit geometry requires r in (0, 1/2), got {r}")
    big_r = r / direction.cos
    if big_r >= 1.0:
        raise ValueError(f"R = r/cos(theta) = {big_r} must stay below 1")
    return big_r


def slit_partition(r: float, direction: Direction,
                   cf: ContinuedFraction | None = None) -> SlitPartition:
    """Strip lengths and widths for obstacle size r and the given direction."""
    big_r = slit_length(r, direction)
    if cf is None:
        cf = expand(direction.alpha, DEFAULT_DEPTH)
    idx = locate(big_r, cf)
    n, k = idx.n, idx.k
    d_n = cf.d[n]
    d_prev = cf.d[n - 1]
    q_n = cf.q[n]
    q_prev = cf.q[n - 1]
    return SlitPartition(
        n=n, k=k,
        l_a=q_n,
        l_b=q_prev + k * q_n,
        l_c=q_prev + (k + 1) * q_n,
        s_a=big_r - d_n,
        s_b=big_r - (d_prev - k * d_n),
        s_c=d_prev - (k - 1) * d_n - big_r,
        big_r=big_r,
        cos_theta=direction.cos,
    )


def survival_from_partition(part: SlitPartition, t):
    """Piecewise-linear survival probability of the slit exit time.

    ``t`` may be a scalar or an array; the value is the probability that a
    uniform point of the torus flows for time at least t before crossing any
    slit copy.  With u = t*cos(theta) the four branches are

        u <= l_a:           1 - u R
        l_a <= u <= l_b:    1 - R l_a - (R - s_a) (u - l_a)
        l_b <= u <= l_c:    s_c (l_c - u)
        u >= l_c:           0

    continuous at all three knots and nonincreasing.
    """
    u = np.asarray(t, dtype=float) * part.cos_theta
    if np.any(u < -0.0) and np.any(np.asarray(t, dtype=float) < 0):
        raise ValueError("survival requires t >= 0")
    d_n = part.big_r - part.s_a
    branch1 = 1.0 - u * part.big_r
    branch2 = 1.0 - part.big_r * part.l_a - d_n * (u - part.l_a)
    branch3 = part.s_c * (part.l_c - u)
    out = np.select(
        [u < part.l_a, u < part.l_b, u < part.l_c],
        [branch1, branch2, branch3],
        default=0.0,
    )
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(out)
    return out


def slit_survival(r: float, direction: Direction, t,
                  cf: ContinuedFraction | None = None,
                  part: SlitPartition | None = None):
    """Survival probability of the slit exit time at time(s) t."""
    if part is None:
        part = slit_partition(r, direction, cf)
    return survival_from_partition(part, t)


def slit_exit_times(r: float, direction: Direction, z,
                    part: SlitPartition | None = None) -> np.ndarray:
    """First times at which rays from the points z meet any slit copy.

    z has shape (N, 2); positions are taken modulo the lattice.  The walk
    tests successive vertical lattice lines and stops at the orbit-length
    bound l_c, which every ray must respect; exceeding it raises
    HorizonError (a geometry bug, not a user error).
    """
    if part is None:
        part = slit_partition(r, direction)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    x = z[:, 0] - np.floor(z[:, 0])
    y = z[:, 1]
    half = part.big_r / 2.0
    out = np.full(x.shape[0], np.nan)
    alive = np.ones(x.shape[0], dtype=bool)
    for m in range(1, part.l_c + 3):
        ym = y[alive] + (m - x[alive]) * direction.alpha
        frac = ym - np.round(ym)
        hit = np.abs(frac) <= half
        if hit.any():
            rows = np.nonzero(alive)[0][hit]
            out[rows] = (m - x[rows]) / direction.cos
            alive[rows] = False
            if not alive.any():
                break
    if alive.any():
        raise HorizonError(
            f"{int(alive.sum())} rays exceeded the orbit bound l_c={part.l_c}")
    return out


def slit_exit_time(r: float, direction: Direction, z) -> float:
    """First time the ray from z meets any slit copy."""
    return float(slit_exit_times(r, direction, np.asarray(z, dtype=float)[None, :])[0])


def survival_approx(r: float, direction: Direction, t_star: float,
                    cf: ContinuedFraction | None = None) -> float:
    """Two-term positive-part approximation of the survival at time t_star/r.

    Depends on the obstacle size only through the pair of errors bracketing R,
    which is what makes the size average amenable to the ergodic theorem.
    """
    big_r = slit_length(r, direction)
    if cf is None:
        cf = expand(direction.alpha, DEFAULT_DEPTH)
    idx = locate(big_r, cf)
    d_n = cf.d[idx.n]
    d_prev = cf.d[idx.n - 1]
    return max(0.0, 1.0 - big_r / d_prev - t_star * d_n / big_r)


def survival_approx_bound(r: float, direction: Direction, t_star: float,
                          cf: ContinuedFraction | None = None) -> float:
    """Bound on |survival(t_star/r) - survival_approx|: (4/k) if k >= t_star-2.

    Valid for t_star > 2; k is the second index of the partition cell of R.
    """
    if t_star <= 2.0:
        raise ValueError(f"the approximation bound requires t_star > 2, got {t_star}")
    big_r = slit_length(r, direction)
    if cf is None:
        cf = expand(direction.alpha, DEFAULT_DEPTH)
    idx = locate(big_r, cf)
    return 4.0 / idx.k if idx.k >= t_star - 2.0 else 0.0
