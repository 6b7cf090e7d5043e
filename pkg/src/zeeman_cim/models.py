"""Time stepping for the mean-field and truncated-Wigner CIM models.

Three models share one batched engine:

* ``MFZ``: deterministic mean-field amplitudes, ``dx = (-1 + p - x^2) x + I``,
  with Gaussian initial amplitudes of variance 1e-4.
* ``GATW``: Gaussian-approximation truncated Wigner with measurement
  feedback. Each pulse carries a mean amplitude and a variance; the injection
  is computed from homodyne-measured amplitudes.
* ``WIGNER_FULL``: in-phase / quadrature truncated-Wigner SDEs.

The GATW mean amplitude is stored normalized, ``x = g * mu``, which keeps the
feedback, Zeeman and CAC terms on the same scale as the mean-field model and
makes ``g2 = 0`` (with noise off) exactly the mean-field limit
``dx = -(1 - p + j) x - x^3 + j J x``.

All stochastic terms use Euler-Maruyama with one standard-normal draw per
pulse per step (two for ``WIGNER_FULL``), taken from a generator owned by the
trajectory. Batched runs are therefore bit-identical to running each
trajectory alone.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from . import schedules as sch
from .errors import InvalidArgumentError, NumericFault, StepSizeFault
from .ising import GroundTruth, IsingProblem, ising_energy, spins_from_amplitudes
from .schedules import Model, ScheduleConfig
from .zeeman import (
    CacState,
    Variant,
    ZeemanMethod,
    cac_error_rate,
    coupling,
    extend_problem_aux,
    gauge_fix_aux,
    injection_abs_mean,
    injection_cac,
    injection_plain,
)

SUCCESS_TOL = 1e-4
INIT_VARIANCE = 1e-4
_NOISE_CHUNK = 256


@dataclass(frozen=True)
class SolverConfig:
    """Everything needed to run one trajectory besides the problem.

    Attributes:
        schedule: model choice, time grid and schedule parameters.
        method: Zeeman strategy and its strengths.
        seed: trajectory seed (initial amplitudes and SDE noise).
        record_trajectory: keep ``(t, x, e)`` samples every ``record_every`` steps.
        noise_off: zero every Wiener increment (deterministic limit).
        cac_drive: ``"measured"`` drives the GATW error variables with the
            measured amplitude, ``"mean"`` with the noiseless mean.
        gatw_v0: initial GATW variance (vacuum is 1/2).
    """

    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    method: ZeemanMethod = field(default_factory=ZeemanMethod)
    seed: int = 0
    record_trajectory: bool = False
    record_every: int = 10
    noise_off: bool = False
    cac_drive: str = "measured"
    gatw_v0: float = 0.5

    def __post_init__(self):
        if self.schedule.g2 == 0 and self.schedule.model is not Model.MFZ and not self.noise_off:
            raise InvalidArgumentError("g2 = 0 requires noise_off for the Wigner models")
        if self.cac_drive not in ("measured", "mean"):
            raise InvalidArgumentError(f"unknown cac_drive {self.cac_drive!r}")
        if self.record_every < 1:
            raise InvalidArgumentError("record_every must be positive")
        if self.gatw_v0 <= 0:
            raise InvalidArgumentError("gatw_v0 must be positive")

    @property
    def model(self) -> Model:
        return self.schedule.model


@dataclass
class SystemState:
    """Dynamical variables at one step; arrays are ``(n,)`` or ``(batch, n)``.

    ``x`` holds the in-phase amplitude for every model (``g * mu`` for GATW);
    ``v`` the GATW variance and ``s_quad`` the quadrature amplitude of the
    full Wigner model. Unused fields are zero.
    """

    x: np.ndarray
    v: np.ndarray
    s_quad: np.ndarray
    cac: CacState
    step: int = 0


@dataclass
class Trajectory:
    """Samples at steps ``0, k, 2k, ...`` for ``k = record_every``.

    ``x`` and ``e`` have shape ``(samples, n)`` (``(samples, batch, n)`` from
    :func:`simulate_batch`).
    """

    steps: np.ndarray
    t: np.ndarray
    x: np.ndarray
    e: np.ndarray

    def __len__(self):
        return len(self.steps)


@dataclass
class RunResult:
    final_spins: np.ndarray
    final_energy: float
    success: bool | None
    steps_run: int
    final_state: SystemState
    trajectory: Trajectory | None = None


class _Batch:
    """Stacked couplings and fields for a batch of equally sized problems."""

    def __init__(self, problems):
        self.J = np.stack([p.J for p in problems])
        self.h = np.stack([p.h for p in problems])


def _initial_rows(model: Model, n: int, rng: np.random.Generator, v0: float = 0.5):
    if model is Model.GATW:
        return np.zeros(n), np.full(n, v0), np.zeros(n)
    x = rng.normal(0.0, np.sqrt(INIT_VARIANCE), n)
    if model is Model.WIGNER_FULL:
        return x, np.zeros(n), rng.normal(0.0, np.sqrt(INIT_VARIANCE), n)
    return x, np.zeros(n), np.zeros(n)


def init_state(model, n: int, seed: int, gatw_v0: float = 0.5) -> SystemState:
    """Initial state for ``model``.

    MFZ draws amplitudes with variance 1e-4; GATW starts in vacuum (zero mean,
    variance ``gatw_v0``); the full Wigner model draws both quadratures with
    variance 1e-4. CAC errors start at one for every model.
    """
    model = Model(model)
    if n < 1:
        raise InvalidArgumentError("n must be positive")
    x, v, s = _initial_rows(model, n, np.random.default_rng(int(seed) & ((1 << 64) - 1)), gatw_v0)
    return SystemState(x, v, s, CacState.ones(n), 0)


def _injection(problem, x, e, tau, method: ZeemanMethod):
    if method.variant is Variant.CAC:
        return injection_cac(problem, x, e, tau, method)
    if method.variant is Variant.ABS_MEAN:
        return injection_abs_mean(problem, x, method)
    # AUX_SPIN: the field is already folded into the extended couplings
    return injection_plain(problem, x, method.j)


def _advance(problem, state: SystemState, cfg: SolverConfig, k: int, xi):
    """One synchronous step from ``k`` to ``k + 1``.

    ``xi`` holds standard normals of shape ``x.shape`` (GATW) or
    ``(2,) + x.shape`` (full Wigner); ignored for MFZ. Returns the new state
    and a boolean mask of rows whose update left the admissible region.
    """
    sc, m = cfg.schedule, cfg.method
    dt = sc.dt
    x, e = state.x, state.cac.e
    cac = m.variant is Variant.CAC
    p = sch.pump_at(k, sc)
    tau = sch.target_at(k, sc)
    v, s = state.v, state.s_quad

    if sc.model is Model.MFZ:
        inj = _injection(problem, x, e, tau, m)
        x_new = x + dt * ((-1.0 + p - x * x) * x + inj)
        drive = x
    elif sc.model is Model.GATW:
        g = np.sqrt(sc.g2)
        j = m.j
        dw = np.zeros_like(x) if cfg.noise_off else np.sqrt(dt) * xi
        # measured amplitude: the same increment, scaled as sqrt(1/(4 j dt)) dW
        x_meas = x + g * np.sqrt(1.0 / (4.0 * j * dt)) * dw
        inj = _injection(problem, x_meas, e, tau, m)
        loss = 1.0 - p + j
        x_new = x + dt * (-loss * x - x * x * x + inj) + g * np.sqrt(j) * (v - 0.5) * dw
        x2 = x * x
        v = v + dt * (-2.0 * loss * v - 6.0 * x2 * v + 1.0 + j + 2.0 * x2
                      - 2.0 * j * (v - 0.5) ** 2)
        drive = x_meas if cfg.cac_drive == "measured" else x
    else:
        r2 = x * x + s * s
        if cfg.noise_off:
            dw1 = dw2 = 0.0
        else:
            amp = sc.g2 * np.sqrt(r2 + 0.5) * np.sqrt(dt)
            dw1, dw2 = amp * xi[0], amp * xi[1]
        inj = _injection(problem, x, e, tau, m)
        x_new = x + dt * ((-1.0 + p - r2) * x + inj) + dw1
        s = s + dt * ((-1.0 - p - r2) * s) + dw2
        drive = x

    if cac and m.beta != 0.0:
        e = e + dt * cac_error_rate(e, drive, tau, m.beta)

    bad = ~np.isfinite(x_new)
    if sc.model is Model.GATW:
        bad |= ~(v > 0)
    if sc.model is Model.WIGNER_FULL:
        bad |= ~np.isfinite(s)
    bad |= ~(e >= 0) | ~np.isfinite(e)
    new = SystemState(x_new, v, s, CacState(e), k + 1)
    return new, bad.any(axis=-1)


_FAULTS = {
    "non-finite": (NumericFault, "non-finite state"),
    "variance": (StepSizeFault, "GATW variance became non-positive"),
    "cac-error": (StepSizeFault, "CAC error variable became negative"),
}


def _classify(model: Model, state: SystemState, b) -> str:
    """Name the fault in row ``b`` (``...`` for an unbatched state)."""
    arrays = (state.x[b], state.v[b], state.s_quad[b], state.cac.e[b])
    if not all(np.all(np.isfinite(a)) for a in arrays):
        return "non-finite"
    if model is Model.GATW and np.any(state.v[b] <= 0):
        return "variance"
    return "cac-error"


def _raise_fault(kind: str, step: int):
    cls, message = _FAULTS[kind]
    raise cls(message, step)


def _single_step(problem, state, cfg, n_step, xi, model):
    if cfg.model is not model:
        raise InvalidArgumentError(f"config selects {cfg.model.value}, not {model.value}")
    with np.errstate(over="ignore", invalid="ignore"):
        new, bad = _advance(problem, state, cfg, n_step, xi)
    if np.any(bad):
        _raise_fault(_classify(model, new, ...), n_step + 1)
    return new


def _draw(rng, shape):
    if isinstance(rng, np.random.Generator):
        return rng.standard_normal(shape)
    xi = np.asarray(rng, dtype=np.float64)
    if xi.shape != shape:
        raise InvalidArgumentError(f"noise array has shape {xi.shape}, expected {shape}")
    return xi


def mfz_step(problem, state: SystemState, cfg: SolverConfig, n_step: int) -> SystemState:
    """Forward-Euler step of the mean-field model with the configured Zeeman strategy."""
    return _single_step(problem, state, cfg, n_step, None, Model.MFZ)


def gatw_step(problem, state: SystemState, cfg: SolverConfig, n_step: int, rng) -> SystemState:
    """Euler-Maruyama step of the Gaussian truncated-Wigner model.

    ``rng`` is a ``numpy.random.Generator`` or a pre-drawn array of standard
    normals shaped like ``state.x``.
    """
    return _single_step(problem, state, cfg, n_step, _draw(rng, state.x.shape), Model.GATW)


def wigner_full_step(problem, state: SystemState, cfg: SolverConfig, n_step: int,
                     rng) -> SystemState:
    """Euler-Maruyama step of the in-phase / quadrature Wigner SDEs."""
    xi = _draw(rng, (2,) + state.x.shape)
    return _single_step(problem, state, cfg, n_step, xi, Model.WIGNER_FULL)


def deterministic_limit_rhs(problem, x, p: float, j: float):
    """Noiseless, ``g -> 0`` limit of the normalized GATW mean equation.

    ``-(1 - p + j) x - x^3 + j J x``; equals the mean-field right-hand side at
    pump ``p - j`` without a Zeeman term.
    """
    return -(1.0 - p + j) * x - x ** 3 + j * coupling(problem.J, x)


@dataclass
class BatchOutcome:
    """Per-trajectory results of :func:`simulate_batch`.

    ``fault_step[b]`` is -1 for clean runs, otherwise the step at which row
    ``b`` faulted; ``fault_kind[b]`` names the fault.
    """

    spins: np.ndarray
    energies: np.ndarray
    final_state: SystemState
    fault_step: np.ndarray
    fault_kind: list
    trajectory: Trajectory | None


def _seed_rng(seed):
    return np.random.default_rng(int(seed) & ((1 << 64) - 1))


def simulate_batch(problems, cfg: SolverConfig, seeds, x0=None) -> BatchOutcome:
    """Run one trajectory per ``(problem, seed)`` pair, stepping all rows together.

    Args:
        problems: equally sized :class:`IsingProblem` instances (original,
            not auxiliary-extended; the extension happens here).
        cfg: shared configuration; ``cfg.seed`` is ignored in favour of ``seeds``.
        seeds: one trajectory seed per problem.
        x0: optional initial in-phase amplitudes, shape ``(batch, n)``.

    Faulted rows are frozen at their last admissible state and reported via
    ``fault_step``; they do not disturb the other rows.
    """
    problems = list(problems)
    seeds = list(seeds)
    if len(problems) != len(seeds) or not problems:
        raise InvalidArgumentError("need one seed per problem and at least one problem")
    model, method, sc = cfg.model, cfg.method, cfg.schedule
    aux = method.variant is Variant.AUX_SPIN
    sim_problems = [extend_problem_aux(p, method.zeta) if aux else p for p in problems]
    n_sim = sim_problems[0].n
    if any(p.n != n_sim for p in sim_problems):
        raise InvalidArgumentError("all problems in a batch must have the same size")
    batch = _Batch(sim_problems)
    B = len(problems)

    rngs = [_seed_rng(s) for s in seeds]
    rows = [_initial_rows(model, n_sim, rng, cfg.gatw_v0) for rng in rngs]
    x = np.stack([r[0] for r in rows])
    if x0 is not None:
        x = np.array(x0, dtype=np.float64).reshape(B, n_sim)
    state = SystemState(x, np.stack([r[1] for r in rows]), np.stack([r[2] for r in rows]),
                        CacState(np.ones((B, n_sim))), 0)

    noisy = model is not Model.MFZ and not cfg.noise_off
    noise_shape = (n_sim,) if model is Model.GATW else (2, n_sim)
    chunk = None

    fault_step = np.full(B, -1, dtype=np.int64)
    fault_kind = [None] * B
    rec_steps, rec_x, rec_e = [], [], []

    def record(st):
        rec_steps.append(st.step)
        rec_x.append(st.x.copy())
        rec_e.append(st.cac.e.copy())

    if cfg.record_trajectory:
        record(state)

    total = sc.total_steps
    for k in range(total):
        xi = None
        if noisy:
            c = k % _NOISE_CHUNK
            if c == 0:
                length = min(_NOISE_CHUNK, total - k)
                chunk = np.stack([rng.standard_normal((length,) + noise_shape) for rng in rngs],
                                 axis=1)
            xi = chunk[c]
            if model is Model.WIGNER_FULL:
                xi = np.moveaxis(xi, 1, 0)
        with np.errstate(over="ignore", invalid="ignore"):
            new, bad = _advance(batch, state, cfg, k, xi)
        fresh = bad & (fault_step < 0)
        for b in np.flatnonzero(fresh):
            fault_step[b] = k + 1
            fault_kind[b] = _classify(model, new, b)
        dead = fault_step >= 0
        if dead.any():
            for name in ("x", "v", "s_quad"):
                arr = getattr(new, name)
                arr[dead] = getattr(state, name)[dead]
            new.cac.e[dead] = state.cac.e[dead]
        state = new
        if cfg.record_trajectory and (k + 1) % cfg.record_every == 0:
            record(state)

    spins = spins_from_amplitudes(state.x)
    if aux:
        spins = gauge_fix_aux(spins)
    energies = np.array([ising_energy(p, s) for p, s in zip(problems, spins)])

    traj = None
    if cfg.record_trajectory:
        traj = Trajectory(np.array(rec_steps), np.array(rec_steps) * sc.dt,
                          np.stack(rec_x), np.stack(rec_e))
    return BatchOutcome(spins, energies, state, fault_step, fault_kind, traj)


def run_trajectory(problem: IsingProblem, cfg: SolverConfig, ground: GroundTruth | None = None,
                   x0=None) -> RunResult:
    """Run one trajectory and read out its spins.

    ``success`` is ``|final_energy - ground.energy| < 1e-4`` when ``ground``
    is given and ``None`` otherwise.

    Raises:
        NumericFault: the state left the admissible region; the exception
            carries the failing step.
    """
    out = simulate_batch([problem], cfg, [cfg.seed], None if x0 is None else [x0])
    row = _row(out.final_state, 0)
    if out.fault_step[0] >= 0:
        _raise_fault(out.fault_kind[0], int(out.fault_step[0]))
    energy = float(out.energies[0])
    success = None if ground is None else abs(energy - ground.energy) < SUCCESS_TOL
    traj = None
    if out.trajectory is not None:
        t = out.trajectory
        traj = Trajectory(t.steps, t.t, t.x[:, 0], t.e[:, 0])
    return RunResult(out.spins[0], energy, success, cfg.schedule.total_steps, row, traj)


def save_trajectory(traj: Trajectory, path) -> None:
    """Write one comma-separated record per sample: step, time, x values, e values.

    Reals use 17 significant digits.
    """
    n = traj.x.shape[-1]
    header = ["step", "t"] + [f"x{r}" for r in range(n)] + [f"e{r}" for r in range(n)]
    with open(os.fspath(path), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for k, t, x, e in zip(traj.steps, traj.t, traj.x, traj.e):
            w.writerow([int(k), format(float(t), ".17g")]
                       + [format(float(v), ".17g") for v in np.concatenate([x, e])])


def _row(state: SystemState, b: int) -> SystemState:
    return SystemState(state.x[b].copy(), state.v[b].copy(), state.s_quad[b].copy(),
                       CacState(state.cac.e[b].copy()), state.step)
