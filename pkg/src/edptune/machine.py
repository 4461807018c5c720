"""Hardware abstraction: discrete P-states, the static/dynamic power split, region run times.

Units are fixed throughout the package: GHz, volts, watts, joules, seconds.
Region compute cost is given in cycles per workload unit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

CYCLES_PER_GHZ_SECOND = 1e9


class ModelError(ValueError):
    """Raised for invalid model inputs (domain errors, malformed files)."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class PState:
    frequency: float  # GHz
    voltage: float  # V


@dataclass(frozen=True)
class MachineModel:
    pstates: tuple[PState, ...]
    static_power: float  # W per process slot, drawn at all times
    dyn_coefficient: float  # W / (V^2 GHz) per active core
    max_cores: int = 1
    serial_fraction: float = 0.0
    switch_latency: float = 0.0
    switch_energy: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pstates", tuple(self.pstates))

    @property
    def fastest(self) -> int:
        return len(self.pstates) - 1

    def to_dict(self) -> dict:
        return {
            "pstates": [{"ghz": p.frequency, "volt": p.voltage} for p in self.pstates],
            "static_power_w": self.static_power,
            "dyn_coeff": self.dyn_coefficient,
            "max_cores": self.max_cores,
            "serial_fraction": self.serial_fraction,
            "switch_latency_s": self.switch_latency,
            "switch_energy_j": self.switch_energy,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MachineModel":
        try:
            pstates = tuple(PState(float(p["ghz"]), float(p["volt"])) for p in data["pstates"])
            cores = data.get("max_cores", 1)
            if isinstance(cores, bool) or int(cores) != cores:
                raise ModelError(f"max_cores must be an integer, got {cores!r}")
            m = cls(
                pstates=pstates,
                static_power=float(data["static_power_w"]),
                dyn_coefficient=float(data["dyn_coeff"]),
                max_cores=int(cores),
                serial_fraction=float(data.get("serial_fraction", 0.0)),
                switch_latency=float(data.get("switch_latency_s", 0.0)),
                switch_energy=float(data.get("switch_energy_j", 0.0)),
            )
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed machine model: {exc!r}") from exc
        violations = validate_machine(m)
        if violations:
            raise ModelError("invalid machine model: " + "; ".join(violations), violations)
        return m


@dataclass(frozen=True)
class RegionModel:
    """Per-workload-unit cost of the timestep region.

    ``compute_cost`` scales with 1/f; ``memory_time`` does not. Setting
    ``memory_time=0`` gives the purely compute-bound case.
    """

    compute_cost: float  # cycles per workload unit
    memory_time: float = 0.0  # s per workload unit

    def __post_init__(self):
        if self.compute_cost < 0 or self.memory_time < 0:
            raise ModelError("region costs must be non-negative")
        if self.compute_cost + self.memory_time <= 0:
            raise ModelError("region must have positive cost per workload unit")

    def to_dict(self) -> dict:
        return {"compute_cost_cycles": self.compute_cost, "memory_time_s": self.memory_time}

    @classmethod
    def from_dict(cls, data: dict) -> "RegionModel":
        try:
            return cls(float(data["compute_cost_cycles"]), float(data.get("memory_time_s", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed region model: {exc!r}") from exc


def dynamic_power(m: MachineModel, p: PState) -> float:
    """Dynamic power of one active core, ``c * U**2 * f``."""
    return m.dyn_coefficient * p.voltage**2 * p.frequency


def process_power(m: MachineModel, p: PState, active_cores: int) -> float:
    """Power drawn by one process slot. With zero active cores only idle power remains."""
    if not 0 <= active_cores <= m.max_cores:
        raise ModelError(f"active_cores={active_cores} outside [0, {m.max_cores}]")
    return m.static_power + active_cores * dynamic_power(m, p)


def amdahl_factor(cores: int, serial_fraction: float) -> float:
    return serial_fraction + (1.0 - serial_fraction) / cores


def region_time(
    r: RegionModel, workload: float, p: PState, cores: int, serial_fraction: float
) -> float:
    """Seconds to process ``workload`` units at P-state ``p`` on ``cores`` cores."""
    if not workload > 0:
        raise ModelError(f"workload must be positive, got {workload}")
    if cores < 1:
        raise ModelError(f"cores must be >= 1, got {cores}")
    per_unit = r.compute_cost / (p.frequency * CYCLES_PER_GHZ_SECOND) + r.memory_time
    return workload * per_unit * amdahl_factor(cores, serial_fraction)


def validate_machine(m: MachineModel) -> list[str]:
    """Return every violated invariant of ``m``; an empty list means the model is valid."""
    out: list[str] = []
    if not m.pstates:
        out.append("at least one P-state required")
    for i, p in enumerate(m.pstates):
        if not p.frequency > 0:
            out.append(f"pstate {i}: frequency must be positive")
        if not p.voltage > 0:
            out.append(f"pstate {i}: voltage must be positive")
    for i in range(1, len(m.pstates)):
        prev, cur = m.pstates[i - 1], m.pstates[i]
        if not cur.frequency > prev.frequency:
            out.append(f"pstates {i - 1},{i}: strictly increasing frequency required")
        if cur.voltage < prev.voltage:
            out.append(f"pstates {i - 1},{i}: non-decreasing voltage required")
    if m.static_power < 0:
        out.append("static_power must be >= 0")
    if m.dyn_coefficient < 0:
        out.append("dyn_coefficient must be >= 0")
    if m.static_power + m.dyn_coefficient <= 0:
        out.append("machine must draw some power (static_power + dyn_coefficient > 0)")
    if m.max_cores < 1:
        out.append("max_cores must be >= 1")
    if not 0.0 <= m.serial_fraction < 1.0:
        out.append("serial_fraction must lie in [0, 1)")
    if m.switch_latency < 0:
        out.append("switch_latency must be >= 0")
    if m.switch_energy < 0:
        out.append("switch_energy must be >= 0")
    return out


def _read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ModelError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from exc


def load_machine(path: str | Path) -> MachineModel:
    try:
        return MachineModel.from_dict(_read_json(path))
    except ModelError as exc:
        if str(path) in str(exc):
            raise
        raise ModelError(f"{path}: {exc}", exc.violations) from exc


def load_region(path: str | Path) -> RegionModel:
    try:
        return RegionModel.from_dict(_read_json(path))
    except ModelError as exc:
        if str(path) in str(exc):
            raise
        raise ModelError(f"{path}: {exc}") from exc


def save_json(obj: MachineModel | RegionModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj.to_dict(), indent=2) + "\n", encoding="utf-8")


def fingerprint(m: MachineModel, r: RegionModel) -> str:
    """Content hash of a machine/region pair, independent of file formatting."""
    blob = json.dumps({"machine": m.to_dict(), "region": r.to_dict()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()
