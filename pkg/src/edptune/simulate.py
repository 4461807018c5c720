"""Barrier-synchronized timestep loop producing per-slice time/energy records.

Power is constant within a slice, so the energy integral is a finite sum:
active cores draw static + dynamic power, waiting at the barrier draws idle
power only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from edptune.machine import MachineModel, ModelError, RegionModel, process_power, region_time
from edptune.metrics import Measurement, edp
from edptune.workload import WorkloadTrace

SLICE_HEADER = ("step", "process", "f_ghz", "cores", "active_s", "wait_s", "switch_s", "energy_j")
PLAN_HEADER = ("step", "process", "f_ghz", "cores")


@dataclass(frozen=True, order=True)
class ProcessConfig:
    # field order gives the tie-break key: lower P-state (frequency), then fewer cores
    pstate: int
    cores: int = 1

    def check(self, m: MachineModel) -> None:
        if not 0 <= self.pstate < len(m.pstates):
            raise ModelError(f"pstate index {self.pstate} out of range")
        if not 1 <= self.cores <= m.max_cores:
            raise ModelError(f"cores={self.cores} outside [1, {m.max_cores}]")

    def to_dict(self) -> dict:
        return {"pstate": self.pstate, "cores": self.cores}


Schedule = tuple[tuple[ProcessConfig, ...], ...]


def all_configs(m: MachineModel) -> list[ProcessConfig]:
    return [ProcessConfig(i, c) for i in range(len(m.pstates)) for c in range(1, m.max_cores + 1)]


def uniform_schedule(trace: WorkloadTrace, config: ProcessConfig) -> Schedule:
    row = (config,) * trace.n_procs
    return (row,) * trace.n_steps


@dataclass(frozen=True)
class SliceRecord:
    step: int
    process: int
    config: ProcessConfig
    active_time: float
    wait_time: float
    switch_time: float
    energy: float


@dataclass(frozen=True)
class SimulationResult:
    slices: tuple[SliceRecord, ...]
    total_energy: float
    total_time: float
    makespans: tuple[float, ...]
    n_procs: int

    @property
    def n_steps(self) -> int:
        return len(self.makespans)

    @property
    def measurement(self) -> Measurement:
        return Measurement(self.total_energy, self.total_time)

    def edp(self, w: int = 1) -> float:
        return edp(self.measurement, w)

    def step_energies(self) -> list[float]:
        out = [0.0] * self.n_steps
        for s in self.slices:
            out[s.step] += s.energy
        return out

    def summary(self, w: int = 1) -> dict:
        return {
            "total_energy_j": self.total_energy,
            "total_time_s": self.total_time,
            "edp": self.edp(w),
            "weight": w,
            "n_steps": self.n_steps,
            "n_procs": self.n_procs,
        }


def active_energy_and_time(
    m: MachineModel, r: RegionModel, workload: float, cfg: ProcessConfig
) -> tuple[float, float]:
    p = m.pstates[cfg.pstate]
    t = region_time(r, workload, p, cfg.cores, m.serial_fraction)
    return process_power(m, p, cfg.cores) * t, t


def simulate(
    m: MachineModel, r: RegionModel, trace: WorkloadTrace, sched: Sequence[Sequence[ProcessConfig]]
) -> SimulationResult:
    if len(sched) != trace.n_steps or any(len(row) != trace.n_procs for row in sched):
        raise ModelError(
            f"schedule shape does not match trace ({trace.n_steps} x {trace.n_procs})"
        )
    for row in sched:
        for cfg in row:
            cfg.check(m)

    slices: list[SliceRecord] = []
    makespans: list[float] = []
    prev: Sequence[ProcessConfig] | None = None
    for step, (loads, row) in enumerate(zip(trace.workloads, sched)):
        active: list[tuple[float, float]] = []
        busy: list[float] = []
        overhead: list[float] = []
        for p, (w, cfg) in enumerate(zip(loads, row)):
            e_act, t_act = active_energy_and_time(m, r, w, cfg)
            sw = prev is not None and prev[p].pstate != cfg.pstate
            t_sw = m.switch_latency if sw else 0.0
            active.append((e_act, t_act))
            busy.append(t_act + t_sw)
            overhead.append(t_sw)
        makespan = max(busy)
        makespans.append(makespan)
        for p, cfg in enumerate(row):
            e_act, t_act = active[p]
            t_sw = overhead[p]
            wait = makespan - busy[p]
            energy = e_act + m.static_power * (wait + t_sw)
            if prev is not None and prev[p].pstate != cfg.pstate:
                energy += m.switch_energy
            slices.append(SliceRecord(step, p, cfg, t_act, wait, t_sw, energy))
        prev = row

    return SimulationResult(
        slices=tuple(slices),
        total_energy=sum(s.energy for s in slices),
        total_time=sum(makespans),
        makespans=tuple(makespans),
        n_procs=trace.n_procs,
    )


def check_invariants(m: MachineModel, res: SimulationResult, rtol: float = 1e-9) -> list[str]:
    """Conservation and lower-bound checks on a result; empty list means consistent."""
    out = []
    e_sum = sum(s.energy for s in res.slices)
    if abs(res.total_energy - e_sum) > rtol * max(abs(e_sum), 1e-300):
        out.append("total_energy != sum of slice energies")
    t_sum = sum(res.makespans)
    if abs(res.total_time - t_sum) > rtol * max(abs(t_sum), 1e-300):
        out.append("total_time != sum of makespans")
    floor = res.n_procs * m.static_power * res.total_time
    if res.total_energy < floor * (1 - rtol):
        out.append("total_energy below idle-power floor")
    for s in res.slices:
        if min(s.active_time, s.wait_time, s.switch_time, s.energy) < 0:
            out.append(f"negative quantity in slice (step={s.step}, process={s.process})")
            break
    return out


def write_summary(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_slices(m: MachineModel, res: SimulationResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SLICE_HEADER)
        for s in res.slices:
            writer.writerow((
                s.step, s.process, repr(m.pstates[s.config.pstate].frequency), s.config.cores,
                repr(s.active_time), repr(s.wait_time), repr(s.switch_time), repr(s.energy),
            ))


def write_schedule(m: MachineModel, sched: Schedule, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLAN_HEADER)
        for s, row in enumerate(sched):
            for p, cfg in enumerate(row):
                writer.writerow((s, p, repr(m.pstates[cfg.pstate].frequency), cfg.cores))


def read_schedule(m: MachineModel, path: str | Path) -> Schedule:
    """Parse a plan CSV, mapping each ``f_ghz`` back to its P-state index in ``m``."""
    path = Path(path)
    by_freq = {p.frequency: i for i, p in enumerate(m.pstates)}
    cells: dict[tuple[int, int], ProcessConfig] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise ModelError(f"file not found: {path}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PLAN_HEADER:
            raise ModelError(f"{path}:1: expected header {','.join(PLAN_HEADER)}")
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            try:
                s, p, f, c = int(row[0]), int(row[1]), float(row[2]), int(row[3])
            except (ValueError, IndexError) as exc:
                raise ModelError(f"{path}:{line}: malformed row {row!r}") from exc
            if f not in by_freq:
                raise ModelError(f"{path}:{line}: frequency {f} is not a P-state of the machine")
            if (s, p) in cells:
                raise ModelError(f"{path}:{line}: duplicate (step={s}, process={p})")
            cfg = ProcessConfig(by_freq[f], c)
            try:
                cfg.check(m)
            except ModelError as exc:
                raise ModelError(f"{path}:{line}: {exc}") from exc
            cells[(s, p)] = cfg
    if not cells:
        raise ModelError(f"{path}: no data rows")
    n_steps = 1 + max(s for s, _ in cells)
    n_procs = 1 + max(p for _, p in cells)
    try:
        return tuple(tuple(cells[(s, p)] for p in range(n_procs)) for s in range(n_steps))
    except KeyError as exc:
        raise ModelError(f"{path}: incomplete schedule, missing {exc.args[0]}") from exc
