"""Continued fractions, convergents, and the nested interval partition of (0,1).

Convention used throughout (indices 0-based on p, q, d; partial quotients
1-based): q_0 = 0, q_1 = 1, p_0 = 1, p_1 = 0, d_0 = 1, d_1 = alpha, and the
recursions

    q_{n+1} = a_n q_n + q_{n-1},   p_{n+1} = a_n p_n + p_{n-1},
    d_{n+1} = -a_n d_n + d_{n-1},

with d_n = |q_n alpha - p_n|.  These close the identities

    q_n d_{n+1} + q_{n+1} d_n = 1,
    1/(q_n + q_{n+1}) < d_n < 1/q_{n+1},

which are enforced by the test suite at every computed index.

The expansion runs on exact integers: the float input is taken at its exact
rational value (float.as_integer_ratio) and the partial quotients come from
integer Euclidean division.  A pure double-precision recursion loses roughly
one digit per step and cannot keep the cross-checks above to 1e-9 beyond
depth ~15; the integer core keeps them to machine precision at every depth
while still reporting d_n as doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Expansion stops once the error drops below this; deeper terms of a float
# input reflect its binary representation, not the number it approximates.
D_FLOOR = 1e-13

DEFAULT_DEPTH = 64


class DepthExhausted(RuntimeError):
    """A query needed deeper continued-fraction data than was computable."""


def gauss_map(alpha: float) -> float:
    """Fractional part of 1/alpha, the shift map on continued-fraction digits."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"gauss_map requires alpha in (0,1), got {alpha}")
    inv = 1.0 / alpha
    return inv - math.floor(inv)


@dataclass(frozen=True)
class ContinuedFraction:
    """Expansion state of one alpha: quotients, convergents and errors.

    ``a`` holds the partial quotients a_1..a_depth; ``p``, ``q`` and ``d``
    are indexed from 0 and run two entries past ``depth`` when the full
    requested depth was reached.  ``terminated`` is set when the expansion
    hit an exactly rational value (the final d entry is then 0).
    """

    alpha: float
    a: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    d: tuple[float, ...]
    depth: int
    terminated: bool


@dataclass(frozen=True)
class PartitionIndex:
    """Cell (n, k) of the nested partition of (0,1) by the error sequence."""

    n: int
    k: int


def _expand_pair(num: int, den: int, depth: int, alpha: float) -> ContinuedFraction:
    """Exact expansion of the rational num/den in (0,1)."""
    r_prev, r_cur = den, num  # Euclid remainders; d_n = r_n / den
    a: list[int] = []
    p = [1, 0]
    q = [0, 1]
    d = [1.0, num / den]
    terminated = False
    while len(a) < depth:
        if r_cur == 0:
            terminated = True
            break
        quot, r_next = divmod(r_prev, r_cur)
        a.append(quot)
        p.append(quot * p[-1] + p[-2])
        q.append(quot * q[-1] + q[-2])
        d.append(r_next / den)
        r_prev, r_cur = r_cur, r_next
        if d[-1] < D_FLOOR:
            terminated = d[-1] == 0.0
            break
    return ContinuedFraction(alpha, tuple(a), tuple(p), tuple(q), tuple(d),
                             len(a), terminated)


def expand(alpha: float, depth: int = DEFAULT_DEPTH) -> ContinuedFraction:
    """Continued-fraction expansion of alpha to at most ``depth`` quotients.

    Rational (or float-precision-exhausted) inputs truncate early with the
    actual depth recorded; they are never an error.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"expand requires alpha in (0,1), got {alpha}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    num, den = float(alpha).as_integer_ratio()
    return _expand_pair(num, den, depth, alpha)


def error_product(alpha: float, n: int) -> float:
    """Product of the first n iterates of the Gauss map on alpha.

    Independent evaluation of d_n: the iterates are exact remainder ratios,
    multiplied in double precision.  Must agree with ``expand(alpha).d[n]``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"error_product requires alpha in (0,1), got {alpha}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    num, den = float(alpha).as_integer_ratio()
    r_prev, r_cur = den, num
    prod = 1.0
    for _ in range(n):
        if r_cur == 0:
            return 0.0  # rational ran out; remaining iterates vanish
        prod *= r_cur / r_prev
        r_prev, r_cur = r_cur, r_prev % r_cur
    return prod


def renorm_residuals(alpha: float, n: int) -> tuple[float, float]:
    """Residuals of the renormalization identities at index n.

    Returns (|q_n of the shifted expansion - p_{n+1}|,
             |d_{n+1} - alpha * d_n of the shifted expansion|), where the
    shifted expansion is that of the Gauss image of alpha, computed on the
    exact rational shift so the digit sequences stay aligned.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"renorm_residuals requires alpha in (0,1), got {alpha}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    num, den = float(alpha).as_integer_ratio()
    cf = _expand_pair(num, den, n + 2, alpha)
    shifted_num = den % num
    if shifted_num == 0:
        raise DepthExhausted(f"alpha={alpha} is rational with one quotient; "
                             "no shifted expansion")
    cf_t = _expand_pair(shifted_num, num, n + 2, shifted_num / num)
    if len(cf.p) < n + 2 or len(cf.d) < n + 2 or len(cf_t.q) < n + 1:
        raise DepthExhausted(f"expansion of alpha={alpha} too shallow for n={n}")
    res_q = float(abs(cf_t.q[n] - cf.p[n + 1]))
    res_d = abs(cf.d[n + 1] - alpha * cf_t.d[n])
    return res_q, res_d


def locate(big_r: float, cf: ContinuedFraction) -> PartitionIndex:
    """Cell (n, k) of the partition of (0,1) containing big_r.

    The cells are [max(d_n, d_{n-1} - k d_n), d_{n-1} - (k-1) d_n) for
    n >= 1 and 1 <= k <= a_n; membership uses left-closed intervals.
    """
    if not 0.0 < big_r < 1.0:
        raise ValueError(f"locate requires R in (0,1), got {big_r}")
    d = cf.d
    n = -1
    for i in range(1, len(d)):
        if d[i] <= big_r:
            n = i
            break
    if n < 0:
        raise DepthExhausted(
            f"R={big_r} lies below the computed error range (min d = {d[-1]!r})")
    if big_r >= d[n - 1]:  # can only happen via pathological float input
        raise ValueError(f"R={big_r} not inside [d_{n}, d_{n-1})")
    k = int((d[n - 1] - big_r) / d[n]) + 1
    # float division can land one cell off at a boundary; fix by membership
    for cand in (k, k - 1, k + 1):
        if cand < 1:
            continue
        left = max(d[n], d[n - 1] - cand * d[n])
        right = d[n - 1] - (cand - 1) * d[n]
        if left <= big_r < right:
            return PartitionIndex(n, cand)
    raise RuntimeError(f"no partition cell found for R={big_r} (n={n}, k~{k})")
