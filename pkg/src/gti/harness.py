"""Monte Carlo trials, parameter sweeps and report rendering.

Each trial is addressed by ``(r, d, trial_index)`` under the master seed, so
every trial draws the same population and matrices however the trials are
split across worker processes. Counters are plain sums, so merging is
order-independent and reports are bit-identical for any worker count.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .bounds import fano_lb_dcp, fano_lb_scp, fano_lb_ub_scenario
from .complexity import beta_dcp, beta_dcp_ub, beta_exact, beta_ub
from .decode import Classification, Label, decode_exact, decode_ub
from .design import exact_params, generator, iid_design, substream, ub_params
from .model import Population, simulate_outcomes
from .oracle import Z99

MAX_WORK = 10**12  # n * T * trials summed over cells

# union-bound constants for the target line c * n^-delta
TARGET_C = {("exact", "scp"): 4.0, ("ub", "scp"): 3.0, ("exact", "dcp"): 2.0, ("ub", "dcp"): 2.0}

EVENTS = ("e1", "e2", "e3", "e4")
_COUNTERS = EVENTS + ("scp_errors", "dcp_errors", "inhibitor_mislabels", "absent_items")


@dataclass(frozen=True)
class TrialConfig:
    """What to simulate.

    Exact mode uses ``d`` and ``r``. Upper-bound mode uses ``R`` and ``D``
    and runs every ``(r, d)`` cell of ``grid``, by default ``r in 0..R`` and
    ``d in 1..D``. ``T`` (and ``T2`` in upper-bound mode) override the test
    counts from the closed-form bounds; ``p`` overrides the exact-mode
    participation probability.
    """

    n: int
    mode: str = "exact"
    d: Optional[int] = None
    r: Optional[int] = None
    R: Optional[int] = None
    D: Optional[int] = None
    grid: Optional[tuple[tuple[int, int], ...]] = None
    delta: float = 1.0
    trials: int = 100
    seed: int = 0
    problem: str = "scp"
    p: Optional[float] = None
    T: Optional[int] = None
    T2: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("exact", "ub"):
            raise ValueError(f"mode must be 'exact' or 'ub', got {self.mode!r}")
        if self.problem not in ("scp", "dcp"):
            raise ValueError(f"problem must be 'scp' or 'dcp', got {self.problem!r}")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.mode == "exact":
            if self.d is None or self.r is None:
                raise ValueError("exact mode needs d and r")
            if self.d < 1 or self.r < 0 or self.d + self.r >= self.n:
                raise ValueError(f"invalid exact-mode sizes d={self.d}, r={self.r}, n={self.n}")
        else:
            if self.R is None or self.D is None:
                raise ValueError("ub mode needs R and D")
            if self.R < 1 or self.D < 1 or self.R + self.D >= self.n:
                raise ValueError(f"invalid bounds R={self.R}, D={self.D}, n={self.n}")
            if self.grid is not None:
                object.__setattr__(self, "grid", tuple((int(r), int(d)) for r, d in self.grid))
                if not self.grid:
                    raise ValueError("grid must not be empty")
                for r, d in self.grid:
                    if d < 1 or r < 0 or r > self.R or d > self.D:
                        raise ValueError(f"grid cell (r={r}, d={d}) outside r<=R, 1<=d<=D")

    def cells(self) -> tuple[tuple[int, int], ...]:
        if self.mode == "exact":
            return ((self.r, self.d),)
        if self.grid is not None:
            return self.grid
        return tuple((r, d) for r in range(self.R + 1) for d in range(1, self.D + 1))

    def test_counts(self) -> tuple[int, ...]:
        """``(T,)`` in exact mode, ``(T1, T2)`` in upper-bound mode."""
        if self.mode == "exact":
            if self.T is not None:
                return (self.T,)
            calc = beta_dcp if self.problem == "dcp" else beta_exact
            return (calc(self.n, self.d, self.r, self.delta, self.p).tests,)
        b1, b2 = beta_ub(self.n, self.R, self.D, self.delta)
        return (self.T if self.T is not None else b1.tests,
                self.T2 if self.T2 is not None else b2.tests)

    @property
    def target(self) -> float:
        return TARGET_C[(self.mode, self.problem)] * self.n ** (-self.delta)


@dataclass(frozen=True)
class CellReport:
    r: int
    d: int
    trials: int
    e1: int = 0
    e2: int = 0
    e3: int = 0
    e4: int = 0
    scp_errors: int = 0
    dcp_errors: int = 0
    inhibitor_mislabels: int = 0
    absent_items: int = 0

    @property
    def scp_rate(self) -> float:
        return self.scp_errors / self.trials

    @property
    def dcp_rate(self) -> float:
        return self.dcp_errors / self.trials

    def half_width(self, rate: float) -> float:
        """One-sided 99% normal-approximation slack for an error rate."""
        return Z99 * math.sqrt(rate * (1.0 - rate) / self.trials)

    def to_dict(self) -> dict:
        out = asdict(self)
        for name in ("scp", "dcp"):
            rate = getattr(self, f"{name}_rate")
            out[f"{name}_rate"] = rate
            out[f"{name}_half_width"] = self.half_width(rate)
        return out


@dataclass(frozen=True)
class TrialReport:
    config: TrialConfig
    tests: tuple[int, ...]
    cells: tuple[CellReport, ...] = field(default_factory=tuple)

    @property
    def target(self) -> float:
        return self.config.target

    def _rate(self, cell: CellReport) -> float:
        return cell.scp_rate if self.config.problem == "scp" else cell.dcp_rate

    def cell_passed(self, cell: CellReport) -> bool:
        rate = self._rate(cell)
        return cell.inhibitor_mislabels == 0 and rate <= self.target + cell.half_width(rate)

    @property
    def worst(self) -> CellReport:
        return max(self.cells, key=lambda c: (self._rate(c), -c.r, -c.d))

    @property
    def passed(self) -> bool:
        return all(self.cell_passed(c) for c in self.cells)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        if cfg["grid"] is not None:
            cfg["grid"] = [list(c) for c in cfg["grid"]]
        worst = self.worst
        return {
            "config": cfg,
            "tests": list(self.tests),
            "target": self.target,
            "cells": [c.to_dict() for c in self.cells],
            "worst_cell": {"r": worst.r, "d": worst.d},
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def attribute_events(types: np.ndarray, c: Classification) -> np.ndarray:
    """Per-item error event: 0 none, else 1-4 by the item's true type.

    1: defective absent or not declared defective. 2: normal declared
    defective (or absent yet labeled normal, possible only with two
    matrices). 3: normal declared inhibitor, which covers an absent normal
    in single-matrix decoding. 4: inhibitor absent or mislabeled.
    """
    labels = c.labels
    absent = np.zeros(labels.shape[0], dtype=bool)
    if c.non_participants:
        absent[list(c.non_participants)] = True
    codes = np.zeros(labels.shape[0], dtype=np.int8)
    defective = types == 1
    normal = types == 0
    inhibitor = types == 2
    codes[defective & (absent | (labels != Label.DEFECTIVE))] = 1
    codes[normal & (labels == Label.DEFECTIVE)] = 2
    codes[normal & (labels == Label.NORMAL) & absent] = 2
    codes[normal & (labels == Label.INHIBITOR)] = 3
    codes[inhibitor & (absent | (labels != Label.INHIBITOR))] = 4
    return codes


def draw_population(n: int, d: int, r: int, seed, *key: int) -> Population:
    rng = generator(seed, *key)
    picked = rng.choice(n, size=d + r, replace=False)
    return Population(n, frozenset(picked[:d].tolist()), frozenset(picked[d:].tolist()))


def _one_trial(cfg: TrialConfig, tests: tuple[int, ...], r: int, d: int, trial: int) -> np.ndarray:
    n = cfg.n
    key = (r, d, trial)
    truth = draw_population(n, d, r, cfg.seed, *key, 0)
    if cfg.mode == "exact":
        params = exact_params(n, d, r, cfg.p)
        design = iid_design(tests[0], n, params.p, substream(cfg.seed, *key, 1))
        c = decode_exact(design, simulate_outcomes(design, truth), params)
    else:
        params = ub_params(cfg.R, cfg.D)
        m1 = iid_design(tests[0], n, params.p1, substream(cfg.seed, *key, 1))
        m2 = iid_design(tests[1], n, params.p2, substream(cfg.seed, *key, 2))
        c = decode_ub(m1, simulate_outcomes(m1, truth), m2, simulate_outcomes(m2, truth), params)
    types = truth.types()
    codes = attribute_events(types, c)
    declared = c.labels == Label.DEFECTIVE
    row = np.zeros(len(_COUNTERS), dtype=np.int64)
    for k in range(4):
        row[k] = np.any(codes == k + 1)
    row[4] = np.any(codes != 0)
    row[5] = not np.array_equal(declared, types == 1)
    row[6] = np.count_nonzero((types == 2) & (c.labels != Label.INHIBITOR))
    row[7] = len(c.non_participants)
    return row


def _run_chunk(job) -> tuple[int, int, np.ndarray]:
    cfg, tests, r, d, start, stop = job
    total = np.zeros(len(_COUNTERS), dtype=np.int64)
    for trial in range(start, stop):
        total += _one_trial(cfg, tests, r, d, trial)
    return r, d, total


def run_trials(config: TrialConfig, workers: int = 1, chunk: int = 50) -> TrialReport:
    """Run ``config.trials`` seeded trials per cell and tally error events."""
    if workers < 1:
        raise ValueError("workers must be positive")
    tests = config.test_counts()
    cells = config.cells()
    work = config.n * sum(tests) * config.trials * len(cells)
    if work > MAX_WORK:
        raise ValueError(f"requested work n*T*trials = {work:.3g} exceeds {MAX_WORK:.0e}")
    jobs = [
        (config, tests, r, d, start, min(start + chunk, config.trials))
        for r, d in cells
        for start in range(0, config.trials, chunk)
    ]
    totals = {cell: np.zeros(len(_COUNTERS), dtype=np.int64) for cell in cells}
    if workers == 1:
        results = map(_run_chunk, jobs)
        for r, d, row in results:
            totals[(r, d)] += row
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for r, d, row in pool.map(_run_chunk, jobs):
                totals[(r, d)] += row
    reports = tuple(
        CellReport(r, d, config.trials, **{k: int(v) for k, v in zip(_COUNTERS, totals[(r, d)])})
        for r, d in cells
    )
    return TrialReport(config, tests, reports)


def report_render(report: TrialReport) -> tuple[str, int]:
    """Human-readable summary and exit code (0 when every cell passes)."""
    cfg = report.config
    out = io.StringIO()
    if cfg.mode == "exact":
        out.write(f"mode=exact n={cfg.n} d={cfg.d} r={cfg.r} delta={cfg.delta!r} problem={cfg.problem}\n")
        out.write(f"tests T={report.tests[0]}\n")
    else:
        out.write(f"mode=ub n={cfg.n} R={cfg.R} D={cfg.D} delta={cfg.delta!r} problem={cfg.problem}\n")
        out.write(f"tests T1={report.tests[0]} T2={report.tests[1]}\n")
    out.write(f"trials per cell={cfg.trials} seed={cfg.seed} target={report.target:.6g}\n")
    out.write("    r    d      e1      e2      e3      e4     scp     dcp  inh_mis  rate      slack     verdict\n")
    for c in report.cells:
        rate = report._rate(c)
        verdict = "PASS" if report.cell_passed(c) else "FAIL"
        out.write(
            f"{c.r:5d}{c.d:5d}{c.e1:8d}{c.e2:8d}{c.e3:8d}{c.e4:8d}"
            f"{c.scp_errors:8d}{c.dcp_errors:8d}{c.inhibitor_mislabels:9d}"
            f"  {rate:<9.4g} {c.half_width(rate):<9.3g} {verdict}\n"
        )
    w = report.worst
    out.write(f"worst cell r={w.r} d={w.d} rate={report._rate(w):.6g}\n")
    out.write("PASS\n" if report.passed else "FAIL\n")
    return out.getvalue(), 0 if report.passed else 1


CSV_COLUMNS = ("n", "d", "r", "R", "D", "T", "scp_err", "dcp_err",
               "e1", "e2", "e3", "e4", "fano_lb", "ratio")


@dataclass(frozen=True)
class SweepSpec:
    """Grid of points: ``(n, d, r)`` in exact mode, ``(n, R, D)`` in ub mode.

    With ``trials == 0`` only the closed-form columns are filled.
    """

    points: tuple[tuple[int, int, int], ...]
    mode: str = "exact"
    delta: float = 1.0
    pe: float = 0.0
    problem: str = "scp"
    trials: int = 0
    seed: int = 0


def _sweep_row(spec: SweepSpec, point, workers: int) -> dict:
    row = dict.fromkeys(CSV_COLUMNS)
    if spec.mode == "exact":
        n, d, r = point
        row.update(n=n, d=d, r=r)
        calc, lb = (beta_dcp, fano_lb_dcp) if spec.problem == "dcp" else (beta_exact, fano_lb_scp)
        T = calc(n, d, r, spec.delta).tests
        fano = lb(n, d, r, spec.pe).tests_lb
        cfg_kw = dict(mode="exact", d=d, r=r)
    else:
        n, R, D = point
        row.update(n=n, R=R, D=D)
        if spec.problem == "dcp":
            T = beta_dcp_ub(n, R, D, spec.delta).tests
        else:
            T = sum(b.tests for b in beta_ub(n, R, D, spec.delta))
        fano = fano_lb_ub_scenario(n, R, D, spec.pe, spec.problem).tests_lb
        cfg_kw = dict(mode="ub", R=R, D=D)
    row.update(T=T, fano_lb=fano, ratio=T / fano)
    if spec.trials:
        cfg = TrialConfig(n=n, delta=spec.delta, trials=spec.trials, seed=spec.seed,
                          problem=spec.problem, **cfg_kw)
        rep = run_trials(cfg, workers=workers)
        worst = rep.worst
        row.update(scp_err=worst.scp_rate, dcp_err=worst.dcp_rate,
                   e1=worst.e1, e2=worst.e2, e3=worst.e3, e4=worst.e4)
        if spec.mode == "ub":
            row.update(r=worst.r, d=worst.d)
    return row


def sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """One row per grid point with designed T, lower bound, and (optionally)
    empirical error rates of the worst cell."""
    if spec.mode not in ("exact", "ub"):
        raise ValueError(f"mode must be 'exact' or 'ub', got {spec.mode!r}")
    if not spec.points:
        raise ValueError("sweep grid is empty")
    return [_sweep_row(spec, pt, workers) for pt in spec.points]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_cell(row[c]) for c in CSV_COLUMNS) for row in rows]
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps([{c: row[c] for c in CSV_COLUMNS} for row in rows], indent=2) + "\n"
