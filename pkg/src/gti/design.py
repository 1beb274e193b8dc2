"""I.i.d. Bernoulli pooling designs and their optimized parameters.

Random streams
--------------
All randomness comes from ``numpy.random.Philox`` generators seeded through
``numpy.random.SeedSequence``. A design is generated in blocks of
``ROW_BLOCK`` rows and every block draws from its own substream whose spawn
key is the design's key extended by the block index. The matrix for a given
seed is therefore fixed regardless of how blocks are scheduled, and trial
substreams in the harness are just longer spawn keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .model import PoolingDesign

ROW_BLOCK = 1024

SeedLike = Union[int, np.random.SeedSequence]


def substream(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Child stream of ``seed`` addressed by ``key`` (e.g. trial, role)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)
    if int(seed) < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=key)


def generator(seed: SeedLike, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(substream(seed, *key)))


def pow1m(p: float, k: float) -> float:
    """``(1 - p) ** k`` without underflow from repeated multiplication."""
    if k == 0:
        return 1.0
    return math.exp(k * math.log1p(-p))


def _geometric(rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
    # floor(E / rate) + 1 with E ~ Exp(1) is Geometric(1 - exp(-rate)); faster
    # than Generator.geometric, which inverts a uniform with two logs
    return (rng.standard_exponential(size) / rate).astype(np.int64) + 1


def _bernoulli_positions(rng: np.random.Generator, size: int, p: float) -> np.ndarray:
    # Gaps between successive ones of an i.i.d. Bernoulli(p) sequence are
    # Geometric(p); sampling gaps costs O(size * p) instead of O(size).
    rate = -math.log1p(-p)
    mean = size * p
    chunk = int(mean + 6.0 * math.sqrt(mean) + 64)
    parts = [np.cumsum(_geometric(rng, rate, chunk)) - 1]
    while parts[-1][-1] < size:
        parts.append(parts[-1][-1] + np.cumsum(_geometric(rng, rate, chunk // 4 + 64)))
    pos = np.concatenate(parts) if len(parts) > 1 else parts[0]
    return pos[pos < size]


def iid_design(T: int, n: int, p: float, seed: SeedLike) -> PoolingDesign:
    """T x n matrix whose entries are independent Bernoulli(p) draws."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"participation probability must lie in (0, 1), got {p}")
    if T < 1 or n < 1:
        raise ValueError(f"need T >= 1 and n >= 1, got T={T}, n={n}")
    width = (n + 7) // 8
    packed = np.empty((T, width), dtype=np.uint8)
    for b, start in enumerate(range(0, T, ROW_BLOCK)):
        rows = min(ROW_BLOCK, T - start)
        rng = generator(seed, b)
        flat = np.zeros(rows * n, dtype=bool)
        flat[_bernoulli_positions(rng, rows * n, p)] = True
        packed[start:start + rows] = np.packbits(flat.reshape(rows, n), axis=1)
    return PoolingDesign(packed, n)


@dataclass(frozen=True)
class ExactParams:
    """Design and threshold parameters when d and r are known exactly.

    ``tau`` is ``None`` when there are no inhibitors; the threshold is then
    taken from the midpoint form directly.
    """

    n: int
    d: int
    r: int
    p: float
    q: float
    a: float
    b: float
    tau: Optional[float]
    threshold_fraction: float

    @property
    def gap(self) -> float:
        """``b - a``, equal to ``(1 - p) ** (r + d)``."""
        return pow1m(self.p, self.r + self.d)


def exact_params(n: int, d: int, r: int, p: float | None = None) -> ExactParams:
    if d < 1:
        raise ValueError(f"need at least one defective, got d={d}")
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if d + r > n:
        raise ValueError(f"d + r = {d + r} exceeds n = {n}")
    if p is None:
        p = 1.0 / (2 * (r + d) + 1)
    elif not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    b = pow1m(p, r)
    q = -math.expm1(r * math.log1p(-p))
    a = b * -math.expm1(d * math.log1p(-p))
    # 1 - q - a = b - a = (1-p)^(r+d); the closed form avoids cancellation
    tau = pow1m(p, r + d) / (2.0 * q) if r else None
    return ExactParams(n, d, r, p, q, a, b, tau, (a + b) / 2.0)


@dataclass(frozen=True)
class UbParams:
    """Two-matrix parameters when only upper bounds R and D are known."""

    R: int
    D: int
    p1: float
    p2: float
    qR: float
    tau: float
    stage1_threshold_fraction: float


def ub_params(R: int, D: int) -> UbParams:
    if R < 1 or D < 1:
        raise ValueError(f"need R >= 1 and D >= 1, got R={R}, D={D}")
    p1 = 1.0 / (3 * (R + D))
    p2 = 2.0 / (3 * R)
    qR = -math.expm1(R * math.log1p(-p1))
    slack = 1.0 - (R + D) * p1
    tau = slack / (2.0 * qR)
    return UbParams(R, D, p1, p2, qR, tau, 1.0 - qR - slack / 2.0)
