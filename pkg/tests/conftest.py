"""Independent reference implementations used as test oracles.

These are written in plain Python loops over lists so they share no code
path with the vectorized package implementations they check.
"""

from fractions import Fraction
from math import comb

import numpy as np
import pytest

# worked example: item 1 defective, item 2 inhibitor, item 3 normal
TINY_M = [[1, 1, 0], [1, 0, 1], [1, 0, 0]]
TINY_Y = [0, 1, 1]

# four-item no-inhibitor example: items 1 and 2 defective
COMA_M = [[0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 1, 0], [1, 1, 0, 1]]
COMA_Y = [1, 1, 0, 1]


def ref_outcomes(matrix, defectives, inhibitors):
    out = []
    for row in matrix:
        members = {j for j, v in enumerate(row) if v}
        out.append(int(bool(members & set(defectives)) and not members & set(inhibitors)))
    return out


def ref_stats(matrix, outcomes, j):
    t = sum(1 for row in matrix if row[j])
    s = sum(1 for row, y in zip(matrix, outcomes) if row[j] and y)
    return t, s


def ref_p_y(n, d, r, g):
    """Exact rational share of size-g pools with a defective and no inhibitor."""
    if g > n - r:
        return Fraction(0)
    clean = comb(n - r, g)
    no_def = comb(n - r - d, g) if g <= n - r - d else 0
    return Fraction(clean - no_def, comb(n, g))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance verdicts, one entry per criterion, printed after the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
