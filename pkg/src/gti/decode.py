"""Threshold decoders for the exact-knowledge and upper-bound scenarios."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .design import ExactParams, UbParams
from .model import PoolingDesign, participation_counts


class Label(IntEnum):
    NORMAL = 0
    DEFECTIVE = 1
    INHIBITOR = 2


@dataclass(frozen=True)
class Classification:
    """Per-item labels plus the items that never appeared in a test.

    Non-participants carry the INHIBITOR label (they have no positive test)
    but are listed separately so callers can count them as absences.
    """

    labels: np.ndarray
    non_participants: frozenset[int]

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8).copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "non_participants", frozenset(int(i) for i in self.non_participants))

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def items(self, label: Label) -> list[int]:
        return np.flatnonzero(self.labels == label).tolist()

    def to_dict(self, one_based: bool = True) -> dict:
        shift = 1 if one_based else 0
        return {
            "defectives": [i + shift for i in self.items(Label.DEFECTIVE)],
            "inhibitors": [i + shift for i in self.items(Label.INHIBITOR)],
            "normals": [i + shift for i in self.items(Label.NORMAL)],
            "non_participants": sorted(i + shift for i in self.non_participants),
        }


def classify_counts(t, s, threshold_fraction: float) -> np.ndarray:
    """Three-region rule on participation counts.

    Inhibitor when ``s == 0``, defective when ``s > t * f``, normal otherwise
    (i.e. ``1 <= s <= floor(t * f)``).
    """
    t = np.asarray(t)
    s = np.asarray(s)
    labels = np.full(np.broadcast(t, s).shape, Label.NORMAL, dtype=np.int8)
    labels[s > t * threshold_fraction] = Label.DEFECTIVE
    labels[s == 0] = Label.INHIBITOR
    return labels


def decode_exact(design: PoolingDesign, outcomes, params: ExactParams) -> Classification:
    if params.n != design.n:
        raise ValueError(f"params built for n={params.n}, design has n={design.n}")
    t, s = participation_counts(design, outcomes)
    labels = classify_counts(t, s, params.threshold_fraction)
    return Classification(labels, frozenset(np.flatnonzero(t == 0).tolist()))


def decode_ub(design1: PoolingDesign, outcomes1, design2: PoolingDesign, outcomes2,
              params: UbParams) -> Classification:
    """Stage 1 picks defectives from the first matrix; stage 2 splits the
    remaining items into inhibitors and normals using the second.

    ``non_participants`` holds items missing from either matrix.
    """
    if design1.n != design2.n:
        raise ValueError(f"designs disagree on n: {design1.n} vs {design2.n}")
    t1, s1 = participation_counts(design1, outcomes1)
    t2, s2 = participation_counts(design2, outcomes2)
    labels = np.where(s2 == 0, Label.INHIBITOR, Label.NORMAL).astype(np.int8)
    labels[s1 > t1 * params.stage1_threshold_fraction] = Label.DEFECTIVE
    absent = (t1 == 0) | (t2 == 0)
    return Classification(labels, frozenset(np.flatnonzero(absent).tolist()))


def defective_set(c: Classification) -> set[int]:
    return set(c.items(Label.DEFECTIVE))
