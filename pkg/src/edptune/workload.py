"""Per-step, per-process workload traces: generation, imbalance and CSV I/O.

The generator is a bounded multiplicative random walk per process, a stand-in
for element counts drifting apart under adaptive mesh refinement.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from edptune.machine import ModelError

CSV_HEADER = ("step", "process", "workload")


class TraceParseError(ModelError):
    pass


@dataclass(frozen=True)
class WorkloadTrace:
    workloads: tuple[tuple[float, ...], ...]  # [step][process]

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.workloads)
        if not rows or not rows[0]:
            raise ModelError("trace needs at least one step and one process")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ModelError("trace matrix is not rectangular")
        if any(not x > 0 for row in rows for x in row):
            raise ModelError("trace workloads must be positive")
        object.__setattr__(self, "workloads", rows)

    @classmethod
    def from_array(cls, arr) -> "WorkloadTrace":
        return cls(tuple(map(tuple, np.asarray(arr, dtype=float).tolist())))

    @property
    def n_steps(self) -> int:
        return len(self.workloads)

    @property
    def n_procs(self) -> int:
        return len(self.workloads[0])

    def as_array(self) -> np.ndarray:
        return np.array(self.workloads)

    def mean_imbalance(self) -> float:
        return sum(imbalance(row) for row in self.workloads) / self.n_steps


@dataclass(frozen=True)
class GeneratorParams:
    n_steps: int
    n_procs: int
    initial_workload: float = 1000.0
    drift: float = 0.05
    min_factor: float = 0.5
    max_factor: float = 2.0
    seed: int = 0

    def violations(self) -> list[str]:
        out = []
        if self.n_steps < 1:
            out.append("n_steps must be >= 1")
        if self.n_procs < 1:
            out.append("n_procs must be >= 1")
        if not self.initial_workload > 0:
            out.append("initial_workload must be positive")
        if not self.drift >= 0:
            out.append("drift must be >= 0")
        if not 0 < self.min_factor <= 1 <= self.max_factor:
            out.append("bounds must satisfy 0 < min_factor <= 1 <= max_factor")
        return out


def generate(params: GeneratorParams) -> WorkloadTrace:
    """Generate a trace; identical ``params`` give an identical trace.

    Process ``p`` draws from its own stream seeded by ``(seed, p)``, so adding
    processes does not change the existing columns.
    """
    bad = params.violations()
    if bad:
        raise ModelError("invalid generator params: " + "; ".join(bad), bad)
    w0 = params.initial_workload
    lo, hi = w0 * params.min_factor, w0 * params.max_factor
    out = np.empty((params.n_steps, params.n_procs))
    for p in range(params.n_procs):
        rng = np.random.default_rng([params.seed, p])
        z = rng.standard_normal(params.n_steps - 1)
        w = w0
        out[0, p] = w
        for step in range(1, params.n_steps):
            w = min(max(w * math.exp(params.drift * z[step - 1]), lo), hi)
            out[step, p] = w
    return WorkloadTrace.from_array(out)


def imbalance(step_workloads: Sequence[float]) -> float:
    """max/mean of one step's workloads; 1.0 means perfectly balanced."""
    if len(step_workloads) == 0:
        raise ModelError("imbalance of an empty step")
    if any(not x > 0 for x in step_workloads):
        raise ModelError("imbalance requires positive workloads")
    return max(step_workloads) / (sum(step_workloads) / len(step_workloads))


def write_trace(trace: WorkloadTrace, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s, row in enumerate(trace.workloads):
            for p, w in enumerate(row):
                writer.writerow((s, p, repr(w)))


def read_trace(path: str | Path) -> WorkloadTrace:
    """Parse a trace CSV; rows may come in any order."""
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise TraceParseError(f"file not found: {path}") from exc
    cells: dict[tuple[int, int], float] = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise TraceParseError(f"{path}:1: expected header {','.join(CSV_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise TraceParseError(f"{path}:{line}: malformed row {row!r}")
            try:
                s, p, w = int(row[0]), int(row[1]), float(row[2])
            except ValueError as exc:
                raise TraceParseError(f"{path}:{line}: malformed row {row!r}") from exc
            if s < 0 or p < 0:
                raise TraceParseError(f"{path}:{line}: negative index")
            if not w > 0 or not math.isfinite(w):
                raise TraceParseError(f"{path}:{line}: non-positive workload {row[2]}")
            if (s, p) in cells:
                raise TraceParseError(f"{path}:{line}: duplicate (step={s}, process={p})")
            cells[(s, p)] = w
    if not cells:
        raise TraceParseError(f"{path}: no data rows")
    n_steps = 1 + max(s for s, _ in cells)
    n_procs = 1 + max(p for _, p in cells)
    for s in range(n_steps):
        for p in range(n_procs):
            if (s, p) not in cells:
                raise TraceParseError(f"{path}: incomplete matrix, missing (step={s}, process={p})")
    return WorkloadTrace(
        tuple(tuple(cells[(s, p)] for p in range(n_procs)) for s in range(n_steps))
    )
