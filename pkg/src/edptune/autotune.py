"""Semi-automatic tuning: learn best configs per situation at design time, recall them in production.

A situation is the workload distribution at a switching point (per-process
shares) plus the log of the total workload. Design-time test runs store the
dynamic planner's optimum for each situation seen; production looks up the
nearest stored situation at every timestep boundary and applies its configs.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from edptune.machine import MachineModel, ModelError, RegionModel, fingerprint
from edptune.metrics import check_weight
from edptune.simulate import ProcessConfig, SimulationResult, active_energy_and_time, simulate
from edptune.tuner_dynamic import plan_step
from edptune.workload import WorkloadTrace

LAMBDA = 0.1
DEDUPE_EPS = 0.01


class FingerprintMismatch(UserWarning):
    pass


@dataclass(frozen=True)
class Situation:
    shares: tuple[float, ...]
    log_total: float

    def features(self, lam: float = LAMBDA) -> tuple[float, ...]:
        return (*self.shares, lam * self.log_total)


@dataclass(frozen=True)
class Entry:
    situation: Situation
    configs: tuple[ProcessConfig, ...]
    energy: float


@dataclass(frozen=True)
class TuningModel:
    entries: tuple[Entry, ...]
    n_procs: int
    reference: ProcessConfig
    fingerprint: str
    lam: float = LAMBDA
    weight: int = 1

    def to_dict(self) -> dict:
        return {
            "n_procs": self.n_procs,
            "reference": self.reference.to_dict(),
            "lambda": self.lam,
            "weight": self.weight,
            "entries": [
                {
                    "shares": list(e.situation.shares),
                    "log_total": e.situation.log_total,
                    "configs": [c.to_dict() for c in e.configs],
                    "energy_j": e.energy,
                }
                for e in self.entries
            ],
            "fingerprint": self.fingerprint,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TuningModel":
        try:
            n = int(data["n_procs"])
            entries = tuple(
                Entry(
                    Situation(tuple(map(float, e["shares"])), float(e["log_total"])),
                    tuple(ProcessConfig(int(c["pstate"]), int(c["cores"])) for c in e["configs"]),
                    float(e["energy_j"]),
                )
                for e in data["entries"]
            )
            ref = data["reference"]
            model = cls(
                entries=entries,
                n_procs=n,
                reference=ProcessConfig(int(ref["pstate"]), int(ref["cores"])),
                fingerprint=str(data["fingerprint"]),
                lam=float(data.get("lambda", LAMBDA)),
                weight=int(data.get("weight", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed tuning model: {exc!r}") from exc
        if not entries:
            raise ModelError("tuning model has no entries")
        if any(len(e.situation.shares) != n or len(e.configs) != n for e in entries):
            raise ModelError("tuning model entries disagree with n_procs")
        return model


def situation_of(step_workloads: Sequence[float]) -> Situation:
    if not step_workloads or any(not w > 0 for w in step_workloads):
        raise ModelError("situation needs positive workloads")
    total = math.fsum(step_workloads)
    return Situation(tuple(w / total for w in step_workloads), math.log(total))


def _step_energy(
    m: MachineModel, r: RegionModel, loads: Sequence[float], configs: Sequence[ProcessConfig]
) -> float:
    parts = [active_energy_and_time(m, r, w, c) for w, c in zip(loads, configs)]
    finish = max(t for _, t in parts)
    return sum(e + m.static_power * (finish - t) for e, t in parts)


def train(
    m: MachineModel,
    r: RegionModel,
    training_traces: WorkloadTrace | Iterable[WorkloadTrace],
    reference: ProcessConfig,
    w: int = 1,
    dedupe_eps: float = DEDUPE_EPS,
    lam: float = LAMBDA,
) -> TuningModel:
    """Run design-time test runs over every step of every training trace.

    A situation within ``dedupe_eps`` (Euclidean, feature space) of an already
    stored one is skipped; the first occurrence wins, so entry order follows
    trace order.
    """
    if isinstance(training_traces, WorkloadTrace):
        training_traces = [training_traces]
    traces = list(training_traces)
    if not traces:
        raise ModelError("training needs at least one trace")
    n = traces[0].n_procs
    if any(t.n_procs != n for t in traces):
        raise ModelError("training traces must share n_procs")
    if dedupe_eps < 0:
        raise ModelError("dedupe_eps must be >= 0")

    entries: list[Entry] = []
    feats: list[tuple[float, ...]] = []
    for trace in traces:
        for loads in trace.workloads:
            sit = situation_of(loads)
            f = sit.features(lam)
            if any(math.dist(f, g) <= dedupe_eps for g in feats):
                continue
            configs = plan_step(m, r, loads, reference)
            entries.append(Entry(sit, configs, _step_energy(m, r, loads, configs)))
            feats.append(f)
    return TuningModel(
        entries=tuple(entries),
        n_procs=n,
        reference=reference,
        fingerprint=fingerprint(m, r),
        lam=lam,
        weight=check_weight(w),
    )


def nearest(model: TuningModel, s: Situation) -> tuple[int, float]:
    """(entry index, distance) of the best match; ties go to the earliest entry."""
    if not model.entries:
        raise ModelError("empty tuning model")
    if len(s.shares) != model.n_procs:
        raise ModelError(f"situation has {len(s.shares)} processes, model has {model.n_procs}")
    q = s.features(model.lam)
    best, best_d = 0, math.inf
    for i, e in enumerate(model.entries):
        d = math.dist(q, e.situation.features(model.lam))
        if d < best_d:
            best, best_d = i, d
    return best, best_d


def match(model: TuningModel, s: Situation) -> tuple[ProcessConfig, ...]:
    return model.entries[nearest(model, s)[0]].configs


def run_production(
    m: MachineModel, r: RegionModel, trace: WorkloadTrace, model: TuningModel
) -> SimulationResult:
    """Switch configs at every timestep boundary by situation lookup, then simulate."""
    if trace.n_procs != model.n_procs:
        raise ModelError(f"trace has {trace.n_procs} processes, model has {model.n_procs}")
    sched = tuple(match(model, situation_of(loads)) for loads in trace.workloads)
    return simulate(m, r, trace, sched)


def save_model(model: TuningModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_model(
    path: str | Path, m: MachineModel | None = None, r: RegionModel | None = None
) -> TuningModel:
    """Load a model file; warns with :class:`FingerprintMismatch` if trained on other models."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ModelError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from exc
    model = TuningModel.from_dict(data)
    if m is not None and r is not None and fingerprint(m, r) != model.fingerprint:
        warnings.warn(
            f"{path}: trained on a different machine/region (fingerprint mismatch)",
            FingerprintMismatch,
            stacklevel=2,
        )
    return model
