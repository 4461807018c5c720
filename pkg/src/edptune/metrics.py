"""Objective functions: energy-to-solution, run time and the energy delay product."""

from __future__ import annotations

from dataclasses import dataclass

from edptune.machine import ModelError


@dataclass(frozen=True)
class Measurement:
    energy: float  # J
    time: float  # s

    def __post_init__(self):
        if self.energy < 0:
            raise ModelError(f"energy must be >= 0, got {self.energy}")
        if not self.time > 0:
            raise ModelError(f"time must be > 0, got {self.time}")


@dataclass(frozen=True)
class Improvement:
    """Relative change of a candidate against a baseline.

    Positive ``energy_saving``/``edp_saving`` means the candidate is better;
    positive ``time_change`` means it is slower.
    """

    energy_saving: float
    time_change: float
    edp_saving: float


def check_weight(w: int) -> int:
    if isinstance(w, bool) or int(w) != w or w < 0:
        raise ModelError(f"EDP weight must be a non-negative integer, got {w!r}")
    return int(w)


def edp(m: Measurement, w: int = 1) -> float:
    """``E * T**w``; ``w=0`` reduces to energy-to-solution."""
    return m.energy * m.time ** check_weight(w)


def improvement(baseline: Measurement, candidate: Measurement, w: int = 1) -> Improvement:
    return Improvement(
        energy_saving=1.0 - candidate.energy / baseline.energy,
        time_change=candidate.time / baseline.time - 1.0,
        edp_saving=1.0 - edp(candidate, w) / edp(baseline, w),
    )
