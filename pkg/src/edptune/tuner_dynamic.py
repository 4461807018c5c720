"""Workload-driven dynamic tuning.

In every step the most loaded process keeps the reference configuration and
fixes the step's finish time. Every other process gets the cheapest
(P-state, cores) that still finishes by then, where cost counts the idle power
drawn while waiting at the barrier. Processes are independent once the finish
time is fixed, so the per-process minimum is also the joint minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from edptune.machine import MachineModel, RegionModel
from edptune.simulate import ProcessConfig, Schedule, active_energy_and_time, all_configs
from edptune.tuner_static import argmin_with_ties, sweep
from edptune.workload import WorkloadTrace


@dataclass(frozen=True)
class DynamicPlan:
    schedule: Schedule
    reference: ProcessConfig


def critical_process(step_workloads: Sequence[float]) -> int:
    # max() returns the first maximal element: ties go to the lowest index
    return max(range(len(step_workloads)), key=lambda p: step_workloads[p])


def slice_energy(
    m: MachineModel, r: RegionModel, workload: float, cfg: ProcessConfig, finish: float
) -> tuple[float, float]:
    """(energy over the whole step, active time) for one process finishing by ``finish``."""
    e_act, t_act = active_energy_and_time(m, r, workload, cfg)
    return e_act + m.static_power * (finish - t_act), t_act


def plan_step(
    m: MachineModel, r: RegionModel, step_workloads: Sequence[float], reference: ProcessConfig
) -> tuple[ProcessConfig, ...]:
    reference.check(m)
    crit = critical_process(step_workloads)
    _, finish = active_energy_and_time(m, r, step_workloads[crit], reference)
    configs = all_configs(m)
    out = []
    for p, w in enumerate(step_workloads):
        if p == crit:
            out.append(reference)
            continue
        feasible, costs = [], []
        for cfg in configs:
            energy, t_act = slice_energy(m, r, w, cfg, finish)
            if t_act <= finish:
                feasible.append(cfg)
                costs.append(energy)
        if not feasible:
            # unreachable for w <= critical workload; kept for exotic rounding
            out.append(reference)
            continue
        out.append(feasible[argmin_with_ties(costs, feasible)])
    return tuple(out)


def plan_trace(
    m: MachineModel, r: RegionModel, trace: WorkloadTrace, reference: ProcessConfig
) -> DynamicPlan:
    """Plan every step independently. Switch overheads are not considered here."""
    return DynamicPlan(
        schedule=tuple(plan_step(m, r, row, reference) for row in trace.workloads),
        reference=reference,
    )


def default_reference(
    m: MachineModel, r: RegionModel, trace: WorkloadTrace, w: int = 1
) -> ProcessConfig:
    """Static-tuning winner for the same trace and weight."""
    return sweep(m, r, trace, w).best_config
