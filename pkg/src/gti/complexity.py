"""Closed-form sample-complexity bounds for the threshold decoders.

Every calculator returns the individual lower bounds on ``beta`` (one per
error event) and the test count ``T = ceil(beta * log2(n))``. Ratios such as
``ln d / ln n`` use natural logs; a log of a count below one is clamped to
zero so the term keeps only its ``delta`` part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .design import exact_params, pow1m

LN2 = math.log(2.0)
CHERNOFF = 1.0 - math.exp(-2.0)


class ChernoffConditionError(ValueError):
    """The Hoeffding step needs ``0 < margin < 1`` and the parameters violate it."""


@dataclass(frozen=True)
class BetaBreakdown:
    terms: tuple[float, ...]
    names: tuple[str, ...]
    beta: float
    tests: int
    delta: float

    @property
    def dominant(self) -> str:
        return self.names[self.terms.index(self.beta)]

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "names": list(self.names),
            "beta": self.beta,
            "tests": self.tests,
            "delta": self.delta,
            "dominant": self.dominant,
        }


def _rate(count: float, n: int, delta: float) -> float:
    # (ln count / ln n + delta) * ln 2, clamped at count <= 1
    lead = math.log(count) / math.log(n) if count > 1 else 0.0
    return (lead + delta) * LN2


def _check(n: int, delta: float) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


def _breakdown(terms, names, n: int, delta: float) -> BetaBreakdown:
    terms = tuple(float(t) for t in terms)
    for t in terms:
        if not (math.isfinite(t) and t > 0):
            raise ValueError(f"bound term is not finite and positive: {t}")
    beta = max(terms)
    tests = max(1, math.ceil(beta * math.log2(n)))
    return BetaBreakdown(terms, tuple(names), beta, tests, float(delta))


def _exact_regime(n: int, d: int, r: int, delta: float) -> None:
    _check(n, delta)
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    if d + r >= n:
        raise ValueError(f"need d + r < n, got d + r = {d + r}, n = {n}")


def _exact_terms(n, d, r, delta, p):
    par = exact_params(n, d, r, p)
    p = par.p
    if r:
        # with the optimal tau both Hoeffding margins equal (1-p)^(r+d)/2
        margins = (par.q * par.tau, par.threshold_fraction - par.a)
        for m in margins:
            if not 0.0 < m < 1.0:
                raise ChernoffConditionError(f"Hoeffding margin {m} outside (0, 1)")
    sep = p * pow1m(p, 2 * (r + d)) * CHERNOFF
    normals = n - d - r
    terms = [
        4.0 * _rate(d, n, delta) / sep,
        4.0 * _rate(normals, n, delta) / sep,
        _rate(normals, n, delta) / (p * pow1m(p, r) * -math.expm1(d * math.log1p(-p))),
    ]
    names = ["defective_missed", "normal_as_defective", "normal_as_inhibitor"]
    if r:
        terms.append(_rate(r, n, delta) / p)
        names.append("inhibitor_absent")
    return terms, names


def beta_exact(n: int, d: int, r: int, delta: float, p: float | None = None) -> BetaBreakdown:
    """Four-event bound for exact (d, r) knowledge; the inhibitor term is
    dropped when ``r == 0``."""
    _exact_regime(n, d, r, delta)
    terms, names = _exact_terms(n, d, r, delta, p)
    return _breakdown(terms, names, n, delta)


def beta_exact_asymptotic(n: int, d: int, r: int, delta: float) -> BetaBreakdown:
    """Large ``r + d`` form, using ``p ~ 1/(2(r+d))`` and ``1-p ~ exp(-p)``.

    Not accurate for small ``r + d`` (e.g. d = r = 1).
    """
    _exact_regime(n, d, r, delta)
    k = r + d
    normals = n - d - r
    terms = [
        8.0 * math.e * k * _rate(d, n, delta) / CHERNOFF,
        8.0 * math.e * k * _rate(normals, n, delta) / CHERNOFF,
        2.0 * k * _rate(normals, n, delta)
        / (math.exp(-r / (2.0 * k)) * -math.expm1(-d / (2.0 * k))),
    ]
    names = ["defective_missed", "normal_as_defective", "normal_as_inhibitor"]
    if r:
        terms.append(2.0 * k * _rate(r, n, delta))
        names.append("inhibitor_absent")
    return _breakdown(terms, names, n, delta)


def beta_dcp(n: int, d: int, r: int, delta: float, p: float | None = None) -> BetaBreakdown:
    """Only the defective-classification events, for recovering defectives alone."""
    _exact_regime(n, d, r, delta)
    terms, names = _exact_terms(n, d, r, delta, p)
    return _breakdown(terms[:2], names[:2], n, delta)


def _ub_regime(n, R, D, delta):
    _check(n, delta)
    if R < 1 or D < 1:
        raise ValueError(f"need R >= 1 and D >= 1, got R={R}, D={D}")


def beta_ub(n: int, R: int, D: int, delta: float) -> tuple[BetaBreakdown, BetaBreakdown]:
    """Bounds for the two matrices of the upper-bound design.

    The first matrix (defective detection) needs ``beta1``; the second
    (inhibitor/normal split) needs ``beta2``.
    """
    _ub_regime(n, R, D, delta)
    b1 = _breakdown(
        [
            27.0 * (R + D) * _rate(D, n, delta) / CHERNOFF,
            27.0 * (R + D) * (1.0 + delta) * LN2 / CHERNOFF,
        ],
        ["defective_missed", "normal_as_defective"],
        n, delta,
    )
    b2 = _breakdown(
        [
            6.75 * R * R * (1.0 + delta) * LN2,
            1.5 * R * _rate(R, n, delta),
        ],
        ["normal_as_inhibitor", "inhibitor_absent"],
        n, delta,
    )
    return b1, b2


def beta_dcp_ub(n: int, R: int, D: int, delta: float) -> BetaBreakdown:
    return beta_ub(n, R, D, delta)[0]


def thumb_rule_tests(p: float, a: float, b: float) -> float:
    """Unnormalized test-count estimate ``1 / (p (b - a)^2)`` for a midpoint
    threshold separating positive rates ``a < b``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0.0 <= a < b <= 1.0:
        raise ValueError(f"need 0 <= a < b <= 1, got a={a}, b={b}")
    return 1.0 / (p * (b - a) ** 2)
