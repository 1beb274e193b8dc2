"""Plain-text readers and writers for designs, outcomes and populations.

Matrix file: ``T n`` on the first line, then T rows of n space-separated
0/1 entries. Outcome file: T lines holding a single 0 or 1. Population
file: ``n``, then the defective indices, then the inhibitor indices (the
last line may be empty). Item indices in population files are one-based.
"""

from __future__ import annotations

import os
from typing import TextIO

import numpy as np

from .model import PoolingDesign, Population


class FormatError(ValueError):
    pass


def _lines(source: str | os.PathLike | TextIO) -> list[str]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    return text.splitlines()


def _parse_ints(line: str, where: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(f"{where}: expected integers, got {line!r}") from None


def read_matrix(source) -> PoolingDesign:
    lines = _lines(source)
    if not lines:
        raise FormatError("matrix file is empty")
    header = _parse_ints(lines[0], "line 1")
    if len(header) != 2 or header[0] < 0 or header[1] < 1:
        raise FormatError(f"line 1 must be 'T n', got {lines[0]!r}")
    T, n = header
    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != T:
        raise FormatError(f"header says T={T} but found {len(rows)} rows")
    if T == 0:
        return PoolingDesign.empty(n)
    m = np.zeros((T, n), dtype=np.uint8)
    for i, ln in enumerate(rows):
        vals = _parse_ints(ln, f"row {i + 1}")
        if len(vals) != n or any(v not in (0, 1) for v in vals):
            raise FormatError(f"row {i + 1} must hold {n} entries in {{0,1}}")
        m[i] = vals
    return PoolingDesign.from_dense(m)


def write_matrix(design: PoolingDesign, dest) -> None:
    dense = design.dense()
    body = [f"{design.T} {design.n}"]
    body += [" ".join("1" if v else "0" for v in row) for row in dense]
    _write(dest, "\n".join(body) + "\n")


def read_outcomes(source) -> np.ndarray:
    vals = []
    for i, ln in enumerate(_lines(source)):
        if not ln.strip():
            continue
        tok = ln.strip()
        if tok not in ("0", "1"):
            raise FormatError(f"outcome line {i + 1} must be 0 or 1, got {tok!r}")
        vals.append(int(tok))
    return np.array(vals, dtype=np.uint8)


def write_outcomes(outcomes, dest) -> None:
    _write(dest, "".join(f"{int(v)}\n" for v in np.asarray(outcomes)))


def read_population(source) -> Population:
    lines = _lines(source)
    if not lines:
        raise FormatError("population file is empty")
    head = _parse_ints(lines[0], "line 1")
    if len(head) != 1:
        raise FormatError("line 1 must hold n")
    n = head[0]
    defectives = _parse_ints(lines[1], "line 2") if len(lines) > 1 else []
    inhibitors = _parse_ints(lines[2], "line 3") if len(lines) > 2 else []
    for idx in defectives + inhibitors:
        if not 1 <= idx <= n:
            raise FormatError(f"item index {idx} outside 1..{n}")
    return Population(n, frozenset(i - 1 for i in defectives), frozenset(i - 1 for i in inhibitors))


def write_population(pop: Population, dest) -> None:
    d = " ".join(str(i + 1) for i in sorted(pop.defectives))
    r = " ".join(str(i + 1) for i in sorted(pop.inhibitors))
    _write(dest, f"{pop.n}\n{d}\n{r}\n")


def _write(dest, text: str) -> None:
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)
