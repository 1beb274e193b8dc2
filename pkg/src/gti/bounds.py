"""Information-theoretic lower bounds on the number of tests.

Everything combinatorial goes through log-gamma or log1p sums; raw
factorials never appear, so n can be in the billions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln


def _log_ratio(n: int, m: int, g: int) -> float:
    """``ln[C(n - m, g) / C(n, g)]`` for ``g <= n - m``.

    Equals ``sum_{i<g} ln(1 - m/(n-i))`` and also ``sum_{k<m} ln(1 - g/(n-k))``;
    the shorter sum is used.
    """
    if m == 0 or g == 0:
        return 0.0
    if g <= m:
        i = np.arange(g, dtype=np.float64)
        return math.fsum(np.log1p(-m / (n - i)))
    k = np.arange(m, dtype=np.float64)
    return math.fsum(np.log1p(-g / (n - k)))


def _check_nrd(n: int, d: int, r: int) -> None:
    if n < 1 or d < 0 or r < 0:
        raise ValueError(f"invalid population sizes n={n}, d={d}, r={r}")
    if d + r > n:
        raise ValueError(f"d + r = {d + r} exceeds n = {n}")


def p_y(n: int, d: int, r: int, g: int) -> float:
    """Probability that a uniformly random pool of ``g`` items tests positive."""
    _check_nrd(n, d, r)
    if not 1 <= g <= n:
        raise ValueError(f"pool size g={g} outside [1, {n}]")
    if d == 0 or g > n - r:
        return 0.0
    if g == 1:
        return d / n
    log_clean = _log_ratio(n, r, g)  # no inhibitor in the pool
    if g > n - d - r:
        return math.exp(log_clean)
    # P(no inhibitor) * P(some defective | no inhibitor)
    log_no_def = _log_ratio(n - r, d, g)
    return math.exp(log_clean) * -math.expm1(log_no_def)


def p_y_curve(n: int, d: int, r: int) -> np.ndarray:
    """``p_y`` for every pool size ``g = 1..n`` (index ``g - 1``)."""
    _check_nrd(n, d, r)
    out = np.zeros(n)
    if d == 0:
        return out
    i = np.arange(n, dtype=np.float64)
    clean = np.exp(np.cumsum(np.log1p(-r / (n - i[: n - r]))))
    m = n - d - r
    log_no_def = np.cumsum(np.log1p(-d / (n - r - i[:m])))
    out[: n - r] = clean
    out[:m] *= -np.expm1(log_no_def)
    return out


def switch_points(n: int, d: int, r: int) -> tuple[float, float]:
    """Real pool sizes ``(g0, g1)``: p_y increases below g0 and decreases above g1."""
    if d < 1 or r < 1:
        raise ValueError(f"switch points need d >= 1 and r >= 1, got d={d}, r={r}")
    if d + r >= n:
        raise ValueError(f"need d + r < n, got d + r = {d + r}, n = {n}")
    lr = math.log1p(d / r)
    g0 = (d + (n - d - r + 2) * lr) / (d + lr)
    g1 = lr / math.log1p(d / (n - d - r))
    return g0, g1


def first_argmax(values, rtol: float = 1e-12) -> int:
    """Smallest index whose value is within ``rtol`` of the maximum.

    p_y can have an exact plateau of two pool sizes; this picks its left end
    regardless of last-bit rounding.
    """
    values = np.asarray(values, dtype=np.float64)
    top = values.max()
    return int(np.flatnonzero(values >= top * (1.0 - rtol))[0])


@dataclass(frozen=True)
class PoolSizeAnalysis:
    g0: float
    g1: float
    g_opt: int
    p_y_max: float
    asymptote: float

    def to_dict(self) -> dict:
        return asdict(self)


def _peak(n: int, d: int, r: int) -> int:
    """Left end of the maximal plateau of p_y, by bisection.

    With ``A(g) = C(n-r, g)/C(n, g)`` and ``B(g) = C(n-r-d, g)/C(n, g)``,
    ``p_y(g+1) - p_y(g) = [(r+d) B(g) - r A(g)] / (n - g)``. The ratio
    ``B/A`` strictly decreases in g, so p_y rises until ``B/A`` first drops to
    ``r/(r+d)`` and falls afterwards; that first g is the maximizer, and it
    ties with g + 1 exactly when the ratio equals ``r/(r+d)``.
    """
    level = math.log(r / (r + d))
    lo, hi = 1, n - r - d + 1  # B vanishes at hi, so the condition holds there
    while lo < hi:
        mid = (lo + hi) // 2
        if _log_ratio(n - r, d, mid) <= level:
            hi = mid
        else:
            lo = mid + 1
    # the float comparison can land one off an exact tie; settle it directly
    cand = [g for g in (lo - 1, lo, lo + 1) if 1 <= g <= n - r]
    return cand[first_argmax([p_y(n, d, r, g) for g in cand])]


def g_opt_search(n: int, d: int, r: int) -> PoolSizeAnalysis:
    """Integer maximizer of p_y (left end of the maximal plateau), together
    with the real switch points bracketing it in the sparse-inhibitor regime."""
    g0, g1 = switch_points(n, d, r)
    g = _peak(n, d, r)
    return PoolSizeAnalysis(g0, g1, g, p_y(n, d, r, g), d / (r * math.e))


def binary_entropy(x: float) -> float:
    """Entropy in bits of a Bernoulli(x) variable."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def _crossing_entropy(n: int, d: int, r: int, lo: int, hi: int, rising: bool) -> float:
    # best entropy on a monotone stretch of p_y that crosses 1/2
    a, b = lo, hi
    while b - a > 1:
        mid = (a + b) // 2
        above = p_y(n, d, r, mid) >= 0.5
        if above == rising:
            b = mid
        else:
            a = mid
    return max(binary_entropy(p_y(n, d, r, g)) for g in {a, b})


def max_outcome_entropy(n: int, d: int, r: int) -> tuple[float, Optional[PoolSizeAnalysis]]:
    """Largest single-test outcome entropy over pool sizes, in bits.

    Maximizing entropy is the same as maximizing p_y only while the peak stays
    at or below 1/2; otherwise the pool sizes where p_y crosses 1/2 decide.
    """
    if d == 0:
        return 0.0, None
    if r == 0:
        # p_y rises monotonically to 1 without inhibitors
        return _crossing_entropy(n, d, r, 1, n, rising=True), None
    pool = g_opt_search(n, d, r)
    if pool.p_y_max <= 0.5:
        return binary_entropy(pool.p_y_max), pool
    up = _crossing_entropy(n, d, r, 1, pool.g_opt, rising=True)
    down = _crossing_entropy(n, d, r, pool.g_opt, n - r, rising=False)
    return max(up, down), pool


def log2_binom(n: int, k: int) -> float:
    """``log2 C(n, k)``; a direct sum of logs for small ``min(k, n-k)``,
    log-gamma otherwise (its three large terms cancel to about 1e-11)."""
    if not 0 <= k <= n:
        raise ValueError(f"C({n}, {k}) undefined")
    k = min(k, n - k)
    if k <= 100_000:
        i = np.arange(k, dtype=np.float64)
        return math.fsum(np.log2((n - i) / (k - i)))
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / math.log(2.0)


@dataclass(frozen=True)
class LowerBoundReport:
    numerator_bits: float
    max_entropy: float
    tests_lb: float
    problem: str
    n: int
    d: int
    r: int
    pe: float
    pool: Optional[PoolSizeAnalysis] = None
    in_order_regime: bool = False
    branch: str = "fano"

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.pool is not None:
            out.update(self.pool.to_dict())
        out.pop("pool")
        return out


def _fano_numerator(count_bits: float, pe: float) -> float:
    if not 0.0 <= pe < 1.0:
        raise ValueError(f"error probability must lie in [0, 1), got {pe}")
    return count_bits * (1.0 - pe) - binary_entropy(pe)


def _fano(n, d, r, pe, problem, count_bits) -> LowerBoundReport:
    numerator = _fano_numerator(count_bits, pe)
    entropy, pool = max_outcome_entropy(n, d, r)
    if entropy <= 0.0:
        raise ValueError("outcome entropy is zero; no finite bound")
    return LowerBoundReport(
        numerator_bits=numerator,
        max_entropy=entropy,
        tests_lb=numerator / entropy,
        problem=problem,
        n=n, d=d, r=r, pe=pe,
        pool=pool,
        # order statements need d = o(r); only d < r is checkable
        in_order_regime=d < r,
    )


def _check_lb(n, d, r):
    _check_nrd(n, d, r)
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    if d + r >= n:
        raise ValueError(f"need d + r < n, got d + r = {d + r}, n = {n}")


def fano_lb_scp(n: int, d: int, r: int, pe: float = 0.0) -> LowerBoundReport:
    """Tests needed to identify both defectives and inhibitors."""
    _check_lb(n, d, r)
    return _fano(n, d, r, pe, "scp", log2_binom(n, d) + log2_binom(n - d, r))


def fano_lb_dcp(n: int, d: int, r: int, pe: float = 0.0) -> LowerBoundReport:
    """Tests needed to identify the defectives only."""
    _check_lb(n, d, r)
    return _fano(n, d, r, pe, "dcp", log2_binom(n, d))


def fano_lb_ub_scenario(n: int, R: int, D: int, pe: float = 0.0, problem: str = "scp") -> LowerBoundReport:
    """Lower bound when only ``r <= R`` and ``1 <= d <= D`` are known.

    The larger of a counting bound (one bit per test over the largest
    hypothesis class) and the entropy bound at ``r = R, d = 1``, where a
    positive outcome is least likely.
    """
    if R < 1 or D < 1:
        raise ValueError(f"need R >= 1 and D >= 1, got R={R}, D={D}")
    if R + D >= n:
        raise ValueError(f"need R + D < n, got {R + D} >= {n}")
    if problem == "scp":
        count_bits = log2_binom(n, D) + log2_binom(n - D, R)
        fano = fano_lb_scp(n, 1, R, pe)
    elif problem == "dcp":
        count_bits = log2_binom(n, D)
        fano = fano_lb_dcp(n, 1, R, pe)
    else:
        raise ValueError(f"problem must be 'scp' or 'dcp', got {problem!r}")
    trivial = _fano_numerator(count_bits, pe)
    if trivial >= fano.tests_lb:
        return LowerBoundReport(
            numerator_bits=trivial, max_entropy=1.0, tests_lb=trivial,
            problem=problem, n=n, d=D, r=R, pe=pe, pool=fano.pool,
            in_order_regime=fano.in_order_regime, branch="counting",
        )
    return LowerBoundReport(
        numerator_bits=fano.numerator_bits, max_entropy=fano.max_entropy,
        tests_lb=fano.tests_lb, problem=problem, n=n, d=1, r=R, pe=pe,
        pool=fano.pool, in_order_regime=fano.in_order_regime, branch="fano",
    )
