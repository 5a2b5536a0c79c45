"""Renormalization statistics of the error sequence and the size-averaged limit.

The scale parameter enters only through which pair of continued-fraction
errors brackets it, so logarithmic size averages reduce to Birkhoff sums of
the Gauss map against its invariant density 1/((1+x) ln 2).  This module
provides the threshold index N(alpha, eps), the in-window log offsets, direct
Birkhoff averaging, the windowed integral decomposition, and the closed-form
limit curve with its 2/(pi^2 t*) asymptote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .cf import DepthExhausted, D_FLOOR, expand

LOG2 = math.log(2.0)
PI2 = math.pi ** 2

# a.e. growth rate of the threshold index: N(alpha, eps) ~ THRESHOLD_RATE * |ln eps|
THRESHOLD_RATE = 12.0 * LOG2 / PI2

_DEEP_DEPTH = 128


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its error target."""


def _quad(f, a, b, *, epsabs=1e-12, epsrel=1e-12, limit=400) -> float:
    val, err = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
    if not math.isfinite(val) or err > 1e-6 * max(1.0, abs(val)):
        raise QuadratureError(f"integral error estimate {err} too large (value {val})")
    return val


@dataclass(frozen=True)
class DeltaPair:
    """Log offsets of the scale e^{-x} inside its error window: delta0 >= 0 >= delta1."""

    delta0: float
    delta1: float


def _expand_below(alpha: float, eps: float):
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if eps <= D_FLOOR * 10:
        raise DepthExhausted(f"eps={eps} is below the expansion precision floor")
    cf = expand(alpha, _DEEP_DEPTH)
    if cf.d[-1] >= eps:
        raise DepthExhausted(f"errors of alpha={alpha} never dropped below {eps}")
    return cf


def threshold_index(alpha: float, eps: float) -> int:
    """N(alpha, eps): least n with d_{n+1} < eps."""
    cf = _expand_below(alpha, eps)
    for m in range(1, len(cf.d)):
        if cf.d[m] < eps:
            return m - 1
    raise DepthExhausted("unreachable")  # guarded by _expand_below


def threshold_ratio(alpha: float, eps: float) -> float:
    """N(alpha, eps)/|ln eps|; concentrates near 12 ln2/pi^2 for typical alpha."""
    return threshold_index(alpha, eps) / abs(math.log(eps))


def window_offsets(alpha: float, x: float) -> DeltaPair:
    """Offsets (-x - ln d_{N+1}, -x - ln d_N) at scale eps = e^{-x}."""
    eps = math.exp(-x)
    cf = _expand_below(alpha, eps)
    n = threshold_index(alpha, eps)
    return DeltaPair(delta0=-x - math.log(cf.d[n + 1]),
                     delta1=-x - math.log(cf.d[n]))


def gauss_expectation(F) -> float:
    """Mean of F against the Gauss-map invariant density 1/((1+x) ln 2)."""
    return _quad(lambda th: F(th) / (1.0 + th), 0.0, 1.0) / LOG2


def birkhoff_vs_gauss(F, alpha: float, terms: int) -> tuple[float, float]:
    """Orbit average of F along the Gauss map next to its ergodic mean.

    Returns (empirical, expected).  The orbit is iterated in floats; rounding
    acts like typical noise and does not disturb the average.  Iterates are
    clamped away from 0 and 1 (measure-zero escapes of float inputs).
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    x = float(alpha)
    if not 0.0 < x < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    total = 0.0
    for _ in range(terms):
        total += F(x)
        inv = 1.0 / x
        x = inv - math.floor(inv)
        if x < 1e-15:
            x = 1e-15
        elif x > 1.0 - 1e-15:
            x = 1.0 - 1e-15
    return total / terms, gauss_expectation(F)


def window_integral(f, lo: float, hi: float) -> float:
    """Integral over [lo, hi) of f(hi - x, lo - x) dx, one renormalization window."""
    return _quad(lambda xx: f(hi - xx, lo - xx), lo, hi, epsabs=1e-11, epsrel=1e-11)


def windowed_average(f, alpha: float, eps: float, x_star: float = 0.0) -> float:
    """(1/|ln eps|) integral of f(delta0(x), delta1(x)) over [x_star, |ln eps|].

    Computed exactly piecewise: within the window (-ln d_l, -ln d_{l+1}] the
    threshold index is constant, so each piece is a 1-d integral of
    f(-ln d_{l+1} - x, -ln d_l - x).
    """
    if x_star < 0.0:
        raise ValueError("x_star must be >= 0")
    cf = _expand_below(alpha, eps)
    big_l = abs(math.log(eps))
    if x_star >= big_l:
        raise ValueError("x_star must stay below |ln eps|")
    total = 0.0
    for l in range(len(cf.d) - 1):
        lo = -math.log(cf.d[l])      # d_0 = 1 starts the first window at 0
        hi = -math.log(cf.d[l + 1]) if cf.d[l + 1] > 0 else math.inf
        a = max(lo, x_star)
        b = min(hi, big_l)
        if b <= a:
            if lo >= big_l:
                break
            continue
        # offsets keep their full-window anchors even on a clipped piece
        total += _quad(lambda xx, lo=lo, hi=hi: f(hi - xx, lo - xx), a, b,
                       epsabs=1e-11, epsrel=1e-11)
        if b >= big_l:
            break
    return total / big_l


def windowed_limit(f) -> float:
    """Limit of windowed_average as the scale vanishes, for a.e. alpha:

        (12/pi^2) * integral_0^1 F(th)/(1+th) dth,
        F(th) = integral_0^{|ln th|} f(|ln th| - y, -y) dy.
    """
    def big_f(th: float) -> float:
        ll = -math.log(th)
        if ll <= 0.0:
            return 0.0
        return _quad(lambda yy: f(ll - yy, -yy), 0.0, ll,
                     epsabs=1e-11, epsrel=1e-11, limit=200)

    # the sliver [0, 1e-12] contributes at most sup|f| * 3e-11; skip it
    outer = _quad(lambda th: big_f(th) / (1.0 + th), 1e-12, 1.0,
                  epsabs=1e-10, epsrel=1e-10, limit=400)
    return 12.0 / PI2 * outer


# ---------------------------------------------------------------------------
# closed-form limit curve

_TAIL_DELTA = 1e-6  # log-singular sliver of the first integrand, handled exactly


def _tail_piece(delta: float) -> float:
    """integral_0^delta [ln(2-u) - ln u - (1-u)] du, exactly."""
    i_ln2m = (2.0 * LOG2 - 2.0) - ((2.0 - delta) * math.log(2.0 - delta) - (2.0 - delta))
    i_mlnu = delta - delta * math.log(delta)
    i_lin = -delta + delta * delta / 2.0
    return i_ln2m + i_mlnu + i_lin


def _first_integral(weight) -> float:
    """integral_0^1 [ln((1+s)/(1-s)) - s] * 2s * weight(1-s^2) ds.

    The s -> 1 endpoint is log-singular; the last sliver of width
    _TAIL_DELTA is integrated analytically with the smooth factor frozen
    at s = 1.
    """
    def g(s: float) -> float:
        return 2.0 * s * weight(1.0 - s * s)

    def integrand(s: float) -> float:
        return (math.log((1.0 + s) / (1.0 - s)) - s) * g(s)

    main = _quad(integrand, 0.0, 1.0 - _TAIL_DELTA)
    return main + g(1.0) * _tail_piece(_TAIL_DELTA)


def _second_integral(weight) -> float:
    """integral_0^1 [z/(1+sqrt(1-z)) - z/(1-sqrt(1-z))] weight(z) dz.

    The bracket collapses to -2 sqrt(1-z), so the integrand is smooth.
    """
    return _quad(lambda z: -2.0 * math.sqrt(1.0 - z) * weight(z), 0.0, 1.0)


def step4_constants() -> tuple[float, float]:
    """The two weight-free integrals; they evaluate to 4/3 and -4/3, and
    3*I1 + (3/2)*I2 = 2 fixes the asymptote constant."""
    one = lambda _z: 1.0
    return _first_integral(one), _second_integral(one)


def cesaro_limit(t_star: float) -> float:
    """Closed-form limit of the log-size-averaged rescaled survival:

        (12/pi^2) I1(t*) + (6/pi^2) I2(t*)

    with both integrals weighted by 1/(4 t* + z).
    """
    if t_star <= 1.0:
        raise ValueError(f"the limit formula requires t_star > 1, got {t_star}")
    weight = lambda z: 1.0 / (4.0 * t_star + z)
    return 12.0 / PI2 * _first_integral(weight) + 6.0 / PI2 * _second_integral(weight)


def cesaro_limit_asymptote(t_star: float) -> float:
    """Leading asymptote 2/(pi^2 t*) of the limit curve."""
    if t_star <= 0.0:
        raise ValueError("t_star must be positive")
    return 2.0 / (PI2 * t_star)


def asymptote_gap_bound(t_star: float, m_sup: float = 1.0) -> float:
    """Bound 8 m_sup/(t* - 3) on the gap between the limit and its asymptote."""
    if t_star <= 3.0:
        raise ValueError(f"gap bound requires t_star > 3, got {t_star}")
    return 8.0 * m_sup / (t_star - 3.0)


def partition_tail_bound(lam: float, m_sup: float = 1.0) -> float:
    """Bound 2 m_sup/(lam - 1) on the weighted angle measure of {k >= lam}."""
    if lam <= 1.0:
        raise ValueError(f"tail bound requires lam > 1, got {lam}")
    return 2.0 * m_sup / (lam - 1.0)


def limit_curve(t_grid, m_sup: float = 1.0) -> list[tuple[float, float, float, float]]:
    """Rows (t_star, limit, asymptote, gap bound) over a grid of t_star values."""
    rows = []
    for t_star in t_grid:
        lam = cesaro_limit(float(t_star))
        asym = cesaro_limit_asymptote(float(t_star))
        bound = asymptote_gap_bound(float(t_star), m_sup) if t_star > 3.0 else math.nan
        rows.append((float(t_star), lam, asym, bound))
    return rows
