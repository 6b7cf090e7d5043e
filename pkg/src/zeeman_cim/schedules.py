"""Pump and target-amplitude schedules.

Time is measured in photon lifetimes. The mean-field model uses a constant
pump and a target that rises linearly with the step index; the Wigner models
use a tanh pump ramp and a target tied to the instantaneous pump.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


class Model(str, enum.Enum):
    MFZ = "MFZ"
    GATW = "GATW"
    WIGNER_FULL = "WIGNER_FULL"


@dataclass(frozen=True)
class ScheduleConfig:
    """Time grid and schedule parameters.

    The default grid covers 30 photon lifetimes at ``dt = 0.002``. Coarser
    steps let forward Euler drive the CAC error variables negative during
    the chaotic transient.

    ``pump_const`` replaces the tanh pump ramp of the Wigner models with a
    fixed value when set; the mean-field model always uses ``p_const``.
    """

    model: Model = Model.MFZ
    p_const: float = 0.57
    tau0: float = 1.0
    tau_n: float = 2.0
    total_steps: int = 15000
    dt: float = 0.002
    g2: float = 0.0
    pump_const: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if not (0.0 < self.dt <= 0.1):
            raise InvalidArgumentError(f"dt must lie in (0, 0.1], got {self.dt}")
        if self.total_steps < 1:
            raise InvalidArgumentError("total_steps must be positive")
        if self.tau0 <= 0.0 or self.tau0 + self.tau_n <= 0.0:
            raise InvalidArgumentError("need tau0 > 0 and tau0 + tau_n > 0")
        if self.g2 < 0.0:
            raise InvalidArgumentError("g2 must be non-negative")

    @property
    def total_time(self) -> float:
        return self.dt * self.total_steps


def pump_gatw(t):
    """Pump ramp ``1 + tanh((t + 2) / 10)``; rises from about 1.197 towards 2."""
    if np.ndim(t) == 0:
        return 1.0 + math.tanh((float(t) + 2.0) / 10.0)
    return 1.0 + np.tanh((np.asarray(t, dtype=np.float64) + 2.0) / 10.0)


def target_gatw(p, g2):
    """Target squared amplitude for the Wigner models at pump ``p``.

    Reduces to ``max(p - 1, 0)`` when ``g2 = 0``.
    """
    half = (p - 1.0) / 2.0
    return half + np.sqrt(half * half + p * g2 / 2.0)


def target_mfz(step: int, cfg: ScheduleConfig) -> float:
    """Linear target ``tau0 + tau_n * step / total_steps`` for the mean-field model."""
    if not 0 <= step <= cfg.total_steps:
        raise InvalidArgumentError(
            f"step {step} outside [0, {cfg.total_steps}]"
        )
    return cfg.tau0 + (cfg.tau_n / cfg.total_steps) * step


def pump_at(step: int, cfg: ScheduleConfig) -> float:
    """Pump rate used by ``cfg.model`` at integer ``step`` (continuous time ``step * dt``)."""
    if cfg.model is Model.MFZ:
        return cfg.p_const
    if cfg.pump_const is not None:
        return cfg.pump_const
    return pump_gatw(step * cfg.dt)


def target_at(step: int, cfg: ScheduleConfig) -> float:
    """CAC target amplitude used by ``cfg.model`` at integer ``step``."""
    if cfg.model is Model.MFZ:
        return target_mfz(step, cfg)
    return float(target_gatw(pump_at(step, cfg), cfg.g2))
