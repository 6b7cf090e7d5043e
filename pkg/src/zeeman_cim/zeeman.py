"""Zeeman-term realizations for amplitude-based Ising machines.

Three ways of feeding the external field ``h`` into the injection field:

* ``ABS_MEAN``: scale ``h`` by the mean absolute amplitude (open loop).
* ``AUX_SPIN``: fold ``h`` into an extra coupling row/column driven by one
  auxiliary pulse, then run with plain coupling (open loop).
* ``CAC``: scale ``h`` by the square root of the target amplitude and
  modulate each pulse's injection with an error variable ``e_r`` that pushes
  ``x_r**2`` towards the target (chaotic amplitude control, closed loop).

The injection functions accept anything with ``J`` and ``h`` attributes whose
arrays broadcast against ``x``, so batches of problems of shape
``(B, n, n)`` / ``(B, n)`` work the same as a single :class:`IsingProblem`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, StepSizeFault
from .ising import IsingProblem


class Variant(str, enum.Enum):
    ABS_MEAN = "ABS_MEAN"
    AUX_SPIN = "AUX_SPIN"
    CAC = "CAC"


@dataclass(frozen=True)
class ZeemanMethod:
    """Zeeman strategy plus its strengths.

    Attributes:
        variant: which realization to use.
        zeta: Zeeman strength.
        beta: CAC error rate; only the ``CAC`` variant reads it.
        j: feedback (injection) strength.
    """

    variant: Variant = Variant.CAC
    zeta: float = 1.0
    beta: float = 10.0
    j: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.zeta < 0 or self.beta < 0:
            raise InvalidArgumentError("zeta and beta must be non-negative")
        if self.j <= 0:
            raise InvalidArgumentError("j must be positive")


@dataclass(frozen=True)
class CacState:
    """CAC error variables ``e_r``; they start at one and must stay positive."""

    e: np.ndarray

    @classmethod
    def ones(cls, n: int) -> "CacState":
        return cls(np.ones(n))


def coupling(J, x):
    """``sum_r' J[r, r'] x_r'`` over the last axis, batched over leading axes.

    Written as multiply-then-sum so each row is reduced the same way whatever
    the batch size, keeping batched and single runs bit-identical.
    """
    return (J * x[..., None, :]).sum(axis=-1)


def _check(problem, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != problem.h.shape[-1]:
        raise InvalidArgumentError(
            f"amplitude length {x.shape[-1]} does not match n={problem.h.shape[-1]}"
        )
    return x


def injection_plain(problem, x, j: float = 1.0):
    """Plain coupling injection ``j * J x`` (no Zeeman term)."""
    x = _check(problem, x)
    return j * coupling(problem.J, x)


def injection_abs_mean(problem, x, m: ZeemanMethod):
    """Injection with the field scaled by the mean absolute amplitude."""
    x = _check(problem, x)
    scale = np.abs(x).mean(axis=-1, keepdims=True)
    return m.j * (coupling(problem.J, x) + m.zeta * problem.h * scale)


def injection_cac(problem, x, state: CacState, tau: float, m: ZeemanMethod):
    """CAC injection ``j * e_r * (sum J x + zeta * h_r * sqrt(tau))``."""
    x = _check(problem, x)
    if tau <= 0:
        raise InvalidArgumentError(f"target amplitude must be positive, got {tau}")
    e = np.asarray(state.e if isinstance(state, CacState) else state)
    return m.j * e * (coupling(problem.J, x) + m.zeta * np.sqrt(tau) * problem.h)


def cac_error_rate(e, x, tau, beta):
    """Right-hand side ``-beta * (x**2 - tau) * e`` of the error dynamics."""
    return -beta * (x * x - tau) * e


def cac_error_step(state: CacState, x, tau: float, beta: float, dt: float,
                   step: int | None = None) -> CacState:
    """One forward-Euler step of the error variables.

    Raises:
        StepSizeFault: an updated ``e_r`` is negative or non-finite, which
            means ``dt`` is too coarse for the current ``beta * (x**2 - tau)``.
    """
    if tau <= 0 or dt <= 0:
        raise InvalidArgumentError("tau and dt must be positive")
    e = state.e + dt * cac_error_rate(state.e, np.asarray(x), tau, beta)
    if not np.all(np.isfinite(e)) or np.any(e < 0):
        raise StepSizeFault("CAC error variable left [0, inf)", step)
    return CacState(e)


def extend_problem_aux(problem: IsingProblem, zeta: float) -> IsingProblem:
    """``(n + 1)``-spin problem whose last spin carries the scaled field as couplings.

    The border row and column are ``zeta * h``; the new field vector is zero.
    """
    if zeta < 0:
        raise InvalidArgumentError("zeta must be non-negative")
    n = problem.n
    J = np.zeros((n + 1, n + 1))
    J[:n, :n] = problem.J
    J[:n, n] = J[n, :n] = zeta * problem.h
    return IsingProblem(J, np.zeros(n + 1))


def gauge_fix_aux(s_ext) -> np.ndarray:
    """Multiply all spins by the auxiliary (last) spin and drop it."""
    s_ext = np.asarray(s_ext, dtype=np.float64)
    if s_ext.shape[-1] < 2:
        raise InvalidArgumentError("extended configuration needs at least two spins")
    return s_ext[..., :-1] * s_ext[..., -1:]
