"""Populations, bit-packed pooling designs and the inhibitor outcome rule.

Items are zero-based inside the package. The text file formats and the CLI
use one-based item indices; conversion happens only in :mod:`gti.io` and
:mod:`gti.cli`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class Population:
    """Ground truth: which items are defectives and which are inhibitors.

    Every item not listed in either set is normal.
    """

    n: int
    defectives: frozenset[int]
    inhibitors: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "defectives", frozenset(int(i) for i in self.defectives))
        object.__setattr__(self, "inhibitors", frozenset(int(i) for i in self.inhibitors))
        if self.n < 1:
            raise ValueError(f"population needs at least one item, got n={self.n}")
        if self.defectives & self.inhibitors:
            raise ValueError("an item cannot be both defective and inhibitor")
        for idx in self.defectives | self.inhibitors:
            if not 0 <= idx < self.n:
                raise IndexError(f"item index {idx} outside [0, {self.n})")

    @property
    def d(self) -> int:
        return len(self.defectives)

    @property
    def r(self) -> int:
        return len(self.inhibitors)

    def mask(self, which: str) -> np.ndarray:
        """Boolean length-n mask of ``"defectives"`` or ``"inhibitors"``."""
        out = np.zeros(self.n, dtype=bool)
        out[sorted(getattr(self, which))] = True
        return out

    def types(self) -> np.ndarray:
        """Per-item type codes: 0 normal, 1 defective, 2 inhibitor."""
        out = np.zeros(self.n, dtype=np.int8)
        out[sorted(self.defectives)] = 1
        out[sorted(self.inhibitors)] = 2
        return out


class PoolingDesign:
    """A T x n binary test matrix stored as bit-packed rows.

    Row ``i`` is test ``i`` and column ``j`` is item ``j``. Bits are packed
    big-endian within each byte (``numpy.packbits`` convention), so testing a
    row against an item set is a byte-wise AND.
    """

    __slots__ = ("_packed", "_n")

    def __init__(self, packed: np.ndarray, n: int):
        packed = np.asarray(packed, dtype=np.uint8)
        if packed.ndim != 2:
            raise ValueError("packed rows must be a 2-D array")
        if n < 1:
            raise ValueError(f"design needs at least one item, got n={n}")
        if packed.shape[1] != (n + 7) // 8:
            raise ValueError(
                f"packed width {packed.shape[1]} does not match n={n}"
            )
        tail = (-n) % 8
        if tail and packed.shape[0] and np.any(packed[:, -1] & ((1 << tail) - 1)):
            raise ValueError("padding bits beyond column n must be zero")
        packed = packed.copy()
        packed.setflags(write=False)
        self._packed = packed
        self._n = int(n)

    @classmethod
    def from_dense(cls, matrix) -> "PoolingDesign":
        m = np.asarray(matrix)
        if m.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if m.size and not np.isin(m, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        return cls(np.packbits(m.astype(bool), axis=1), m.shape[1])

    @classmethod
    def empty(cls, n: int) -> "PoolingDesign":
        """A design with no tests at all."""
        return cls(np.zeros((0, (n + 7) // 8), dtype=np.uint8), n)

    @property
    def T(self) -> int:
        return self._packed.shape[0]

    @property
    def n(self) -> int:
        return self._n

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def dense(self) -> np.ndarray:
        return np.unpackbits(self._packed, axis=1, count=self._n)

    def column_counts(self, rows: np.ndarray | None = None) -> np.ndarray:
        """Number of ones per column, optionally over a boolean row subset."""
        packed = self._packed if rows is None else self._packed[rows]
        counts = np.zeros(self._n, dtype=np.int64)
        for start in range(0, packed.shape[0], _CHUNK_ROWS):
            block = np.unpackbits(packed[start:start + _CHUNK_ROWS], axis=1, count=self._n)
            # uint16 cannot overflow within a chunk and reduces several times faster
            counts += block.sum(axis=0, dtype=np.uint16)
        return counts

    def __eq__(self, other):
        if not isinstance(other, PoolingDesign):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._n, self._packed.tobytes()))

    def __repr__(self):
        return f"PoolingDesign(T={self.T}, n={self.n})"


_CHUNK_ROWS = 8192  # must stay below 2**16


class ItemStats(NamedTuple):
    item: int
    t_count: int
    s_count: int


def _check_outcomes(design: PoolingDesign, outcomes) -> np.ndarray:
    y = np.asarray(outcomes)
    if y.ndim != 1 or y.shape[0] != design.T:
        raise ValueError(
            f"outcome vector has shape {y.shape}, expected ({design.T},)"
        )
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("outcomes must be 0 or 1")
    return y.astype(bool)


def simulate_outcomes(design: PoolingDesign, truth: Population) -> np.ndarray:
    """Outcome of every test: 1 iff it holds a defective and no inhibitor."""
    if design.n != truth.n:
        raise ValueError(f"design has n={design.n} but population has n={truth.n}")
    packed = design.packed
    if truth.d == 0 or design.T == 0:
        return np.zeros(design.T, dtype=np.uint8)
    has_def = (packed & np.packbits(truth.mask("defectives"))).any(axis=1)
    if truth.r:
        has_inh = (packed & np.packbits(truth.mask("inhibitors"))).any(axis=1)
        has_def &= ~has_inh
    return has_def.astype(np.uint8)


def participation_counts(design: PoolingDesign, outcomes) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(t, s)``: tests containing each item, and the positive ones."""
    y = _check_outcomes(design, outcomes)
    return design.column_counts(), design.column_counts(y)


def item_stats(design: PoolingDesign, outcomes, item: int) -> ItemStats:
    y = _check_outcomes(design, outcomes)
    if not 0 <= item < design.n:
        raise IndexError(f"item {item} outside [0, {design.n})")
    byte, bit = divmod(item, 8)
    col = (design.packed[:, byte] >> (7 - bit)) & 1
    col = col.astype(bool)
    return ItemStats(item, int(col.sum()), int((col & y).sum()))


def all_item_stats(design: PoolingDesign, outcomes) -> list[ItemStats]:
    t, s = participation_counts(design, outcomes)
    return [ItemStats(j, int(tj), int(sj)) for j, (tj, sj) in enumerate(zip(t, s))]

