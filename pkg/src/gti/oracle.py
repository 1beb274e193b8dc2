"""Brute-force references for small instances.

These are deliberately simple and refuse to run when an instance is too
large instead of silently truncating the search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import norm

from .design import generator
from .model import PoolingDesign, Population, _check_outcomes, simulate_outcomes

MAX_CANDIDATES = 10**7
MAX_POOLS = 10**6
Z99 = float(norm.ppf(0.99))


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConsistencySet:
    """Every (defectives, inhibitors) pair that reproduces the outcomes."""

    assignments: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def identifiable(self) -> bool:
        return len(self.assignments) == 1

    def to_dict(self, one_based: bool = True) -> dict:
        k = 1 if one_based else 0
        return {
            "assignments": [
                {"defectives": [i + k for i in dset], "inhibitors": [i + k for i in iset]}
                for dset, iset in self.assignments
            ],
            "identifiable": self.identifiable,
        }


def consistent_assignments(design: PoolingDesign, outcomes, d: int, r: int) -> ConsistencySet:
    """Enumerate all populations with exactly d defectives and r inhibitors
    whose simulated outcomes equal ``outcomes``.

    For each defective set, inhibitors can only come from items outside every
    positive test, and must hit every negative test that holds a defective;
    the inhibitor sets are enumerated from those items and then checked.
    """
    y = _check_outcomes(design, outcomes)
    n = design.n
    if d < 0 or r < 0 or d + r > n:
        raise ValueError(f"invalid sizes d={d}, r={r} for n={n}")
    total = math.comb(n, d) * math.comb(n - d, r)
    if total > MAX_CANDIDATES:
        raise ResourceLimitError(f"{total} candidate populations exceed the limit of {MAX_CANDIDATES}")

    m = design.dense().astype(bool)
    in_positive = m[y].any(axis=0)
    found = []
    for dset in itertools.combinations(range(n), d):
        hit = m[:, list(dset)].any(axis=1) if d else np.zeros(design.T, dtype=bool)
        if np.any(y & ~hit):
            continue  # a positive test without a defective
        must_block = hit & ~y
        pool = [j for j in range(n) if j not in dset and not in_positive[j]]
        for iset in itertools.combinations(pool, r):
            blocked = m[:, list(iset)].any(axis=1) if r else np.zeros(design.T, dtype=bool)
            if np.any(must_block & ~blocked):
                continue
            pop = Population(n, frozenset(dset), frozenset(iset))
            if not np.array_equal(simulate_outcomes(design, pop).astype(bool), y):
                raise AssertionError("pruned search produced an inconsistent assignment")
            found.append((tuple(dset), tuple(iset)))
    return ConsistencySet(tuple(sorted(found)))


class Estimate(NamedTuple):
    value: float
    half_width: float


def positive_pool_fraction(n: int, d: int, r: int, g: int) -> Fraction:
    """Exact share of size-g pools with at least one defective and no
    inhibitor, by summing over the number k of defectives drawn."""
    good = sum(math.comb(d, k) * math.comb(n - d - r, g - k) for k in range(1, min(d, g) + 1))
    return Fraction(good, math.comb(n, g))


def empirical_p_y(n: int, d: int, r: int, g: int, method: str = "count",
                  samples: int = 100_000, seed: int = 0) -> Estimate:
    """Positive-outcome probability of a random size-g pool, by brute force.

    ``method`` is ``"count"`` (exact, by type classes), ``"enumerate"``
    (walk every pool; tiny n only) or ``"sample"`` (Monte Carlo with a 99%
    normal-approximation half-width).
    """
    if n < 1 or d < 0 or r < 0 or d + r > n:
        raise ValueError(f"invalid population sizes n={n}, d={d}, r={r}")
    if not 1 <= g <= n:
        raise ValueError(f"pool size g={g} outside [1, {n}]")
    # items 0..d-1 defective, d..d+r-1 inhibitors; pools are exchangeable
    if method == "count":
        return Estimate(float(positive_pool_fraction(n, d, r, g)), 0.0)
    if method == "enumerate":
        pools = math.comb(n, g)
        if pools > MAX_POOLS:
            raise ResourceLimitError(f"{pools} pools exceed the limit of {MAX_POOLS}")
        good = 0
        for pool in itertools.combinations(range(n), g):
            has_def = any(j < d for j in pool)
            has_inh = any(d <= j < d + r for j in pool)
            good += has_def and not has_inh
        return Estimate(good / pools, 0.0)
    if method == "sample":
        if samples < 1:
            raise ValueError("need at least one sample")
        if samples * g > 10**9:
            raise ResourceLimitError("sampling budget exceeds 1e9 draws")
        rng = generator(seed)
        keys = rng.random((samples, n))
        pools = np.argpartition(keys, g - 1, axis=1)[:, :g] if g < n else np.tile(np.arange(n), (samples, 1))
        has_def = (pools < d).any(axis=1)
        has_inh = ((pools >= d) & (pools < d + r)).any(axis=1)
        hits = has_def & ~has_inh
        phat = float(hits.mean())
        return Estimate(phat, Z99 * math.sqrt(phat * (1.0 - phat) / samples))
    raise ValueError(f"unknown method {method!r}")


def empirical_event_tail(t: int, p_event: float, threshold: float) -> float:
    """``P[X >= threshold]`` for ``X ~ Binomial(t, p_event)``, summed in log space."""
    if t < 0 or t > 10**5:
        raise ValueError(f"t must lie in [0, 1e5], got {t}")
    if not 0.0 <= p_event <= 1.0:
        raise ValueError(f"probability {p_event} outside [0, 1]")
    k0 = max(0, math.ceil(threshold))
    if k0 == 0:
        return 1.0
    if k0 > t:
        return 0.0
    if p_event == 0.0:
        return 0.0
    if p_event == 1.0:
        return 1.0
    k = np.arange(k0, t + 1, dtype=np.float64)
    logpmf = (gammaln(t + 1) - gammaln(k + 1) - gammaln(t - k + 1)
              + k * math.log(p_event) + (t - k) * math.log1p(-p_event))
    return float(min(1.0, math.exp(logsumexp(logpmf))))
