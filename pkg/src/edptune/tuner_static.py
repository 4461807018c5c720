"""Static tuning: one (P-state, cores) for the whole run, chosen by sweeping candidates."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from edptune.machine import MachineModel, ModelError, RegionModel
from edptune.metrics import check_weight, edp, Measurement
from edptune.simulate import ProcessConfig, all_configs, simulate, uniform_schedule
from edptune.workload import WorkloadTrace

SWEEP_HEADER = "f_ghz,volt,cores,energy_j,time_s,edp,rel_energy,rel_time"

# objective values closer than this (relative) count as ties
TIE_RTOL = 1e-12


def argmin_with_ties(values: list[float], keys: list, rtol: float = TIE_RTOL) -> int:
    """Index of the minimum value; near-ties resolve to the smallest key."""
    lo = min(values)
    bound = lo + rtol * abs(lo)
    near = [i for i, v in enumerate(values) if v <= bound]
    return min(near, key=lambda i: keys[i])


@dataclass(frozen=True)
class SweepRow:
    config: ProcessConfig
    energy: float
    time: float
    edp: float
    rel_energy: float
    rel_time: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    best: int
    weight: int

    @property
    def best_row(self) -> SweepRow:
        return self.rows[self.best]

    @property
    def best_config(self) -> ProcessConfig:
        return self.rows[self.best].config


def reference_config(m: MachineModel) -> ProcessConfig:
    """The un-tuned default: highest frequency, all cores."""
    return ProcessConfig(m.fastest, m.max_cores)


def sweep(
    m: MachineModel,
    r: RegionModel,
    trace: WorkloadTrace,
    w: int = 1,
    candidates: Iterable[ProcessConfig] | None = None,
) -> SweepResult:
    w = check_weight(w)
    cands = sorted(set(all_configs(m) if candidates is None else candidates))
    if not cands:
        raise ModelError("sweep needs at least one candidate configuration")

    def run(cfg: ProcessConfig) -> Measurement:
        return simulate(m, r, trace, uniform_schedule(trace, cfg)).measurement

    ref = run(reference_config(m))
    rows = []
    for cfg in cands:
        meas = run(cfg)
        rows.append(SweepRow(
            config=cfg,
            energy=meas.energy,
            time=meas.time,
            edp=edp(meas, w),
            rel_energy=meas.energy / ref.energy,
            rel_time=meas.time / ref.time,
        ))
    best = argmin_with_ties([row.edp for row in rows], [row.config for row in rows])
    return SweepResult(tuple(rows), best, w)


def write_sweep(m: MachineModel, result: SweepResult, path: str | Path) -> None:
    lines = [SWEEP_HEADER]
    for row in result.rows:
        p = m.pstates[row.config.pstate]
        lines.append(",".join(map(repr, (
            p.frequency, p.voltage, row.config.cores, row.energy, row.time,
            row.edp, row.rel_energy, row.rel_time,
        ))))
    best = result.best_row.config
    lines.append(f"# best={m.pstates[best.pstate].frequency!r},{best.cores}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
