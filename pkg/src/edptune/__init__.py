"""Energy/run-time modelling and EDP tuning for barrier-synchronized parallel codes."""

from edptune.machine import (
    MachineModel,
    ModelError,
    PState,
    RegionModel,
    dynamic_power,
    process_power,
    region_time,
    validate_machine,
)
from edptune.metrics import Improvement, Measurement, edp, improvement
from edptune.workload import GeneratorParams, WorkloadTrace, generate, imbalance
from edptune.simulate import ProcessConfig, SimulationResult, SliceRecord, simulate, uniform_schedule
from edptune.tuner_static import SweepResult, SweepRow, sweep
from edptune.tuner_dynamic import DynamicPlan, plan_step, plan_trace
from edptune.autotune import Situation, TuningModel, match, run_production, situation_of, train

__version__ = "0.1.0"

__all__ = [
    "DynamicPlan",
    "GeneratorParams",
    "Improvement",
    "MachineModel",
    "Measurement",
    "ModelError",
    "PState",
    "ProcessConfig",
    "RegionModel",
    "SimulationResult",
    "Situation",
    "SliceRecord",
    "SweepResult",
    "SweepRow",
    "TuningModel",
    "WorkloadTrace",
    "dynamic_power",
    "edp",
    "generate",
    "imbalance",
    "improvement",
    "match",
    "plan_step",
    "plan_trace",
    "process_power",
    "region_time",
    "run_production",
    "simulate",
    "situation_of",
    "sweep",
    "train",
    "uniform_schedule",
    "validate_machine",
]
