"""Success-probability sweeps over Zeeman strength, CAC rate, noise and model.

A sweep draws ``instances`` SK problems once, solves each exactly, and then
runs every grid cell on that same problem set with the same per-instance
trajectory seeds. Cells are independent, so they can be farmed out to worker
processes without affecting the result.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvalidArgumentError, SizeLimitError
from .ising import MAX_BRUTE_FORCE_SPINS, brute_force_ground, generate_sk
from .models import SUCCESS_TOL, SolverConfig, simulate_batch
from .schedules import Model, ScheduleConfig
from .zeeman import Variant, ZeemanMethod

log = logging.getLogger(__name__)

CSV_HEADER = ["model", "method", "zeta", "beta", "g2", "runs", "successes", "p_sc",
              "mean_energy_gap"]
DEFAULT_ZETA_GRID = tuple(0.25 * k for k in range(13))


@dataclass(frozen=True)
class SweepSpec:
    """Grid of cells plus the shared problem-set definition.

    ``g2_grid`` applies to the Wigner models only; mean-field cells are keyed
    with ``g2 = 0``. The remaining fields set the time grid and model
    constants shared by every cell.
    """

    n: int = 16
    instances: int = 500
    master_seed: int = 0
    models: tuple = (Model.MFZ, Model.GATW)
    methods: tuple = (Variant.CAC,)
    zeta_grid: tuple = DEFAULT_ZETA_GRID
    beta_grid: tuple = (0.0, 10.0)
    g2_grid: tuple = (1e-7,)
    j: float = 1.0
    dt: float = ScheduleConfig.dt
    total_steps: int = ScheduleConfig.total_steps
    p_const: float = 0.57
    tau0: float = 1.0
    tau_n: float = 2.0
    success_tol: float = SUCCESS_TOL
    cac_drive: str = "measured"
    gatw_v0: float = 0.5

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("models", tuple(Model(m) for m in self.models))
        set_("methods", tuple(Variant(m) for m in self.methods))
        for name in ("zeta_grid", "beta_grid", "g2_grid"):
            set_(name, tuple(float(v) for v in getattr(self, name)))
        if self.instances < 1:
            raise InvalidArgumentError("instances must be at least 1")
        if not (self.models and self.methods and self.zeta_grid and self.beta_grid
                and self.g2_grid):
            raise InvalidArgumentError("sweep grids must be non-empty")
        if self.n > MAX_BRUTE_FORCE_SPINS:
            raise SizeLimitError(f"sweeps need exact ground states; n={self.n} is too large")

    def cells(self):
        """Cell keys ``(model, method, zeta, beta, g2)`` in grid order."""
        for model, method, zeta, beta in itertools.product(
                self.models, self.methods, self.zeta_grid, self.beta_grid):
            g2s = (0.0,) if model is Model.MFZ else self.g2_grid
            for g2 in g2s:
                yield (model.value, method.value, zeta, beta, g2)

    def solver_config(self, key) -> SolverConfig:
        model, method, zeta, beta, g2 = key
        sched = ScheduleConfig(model=model, p_const=self.p_const, tau0=self.tau0,
                               tau_n=self.tau_n, total_steps=self.total_steps, dt=self.dt, g2=g2)
        return SolverConfig(sched, ZeemanMethod(method, zeta, beta, self.j),
                            cac_drive=self.cac_drive, gatw_v0=self.gatw_v0)


@dataclass
class CellStats:
    runs: int
    successes: int
    faults: int = 0
    mean_energy_gap: float = float("nan")
    problem_hash: str = ""

    @property
    def p_sc(self) -> float:
        return self.successes / self.runs


@dataclass
class SweepResult:
    """Per-cell success counts keyed by ``(model, method, zeta, beta, g2)``."""

    cells: dict = field(default_factory=dict)

    def p_sc(self, model, method, zeta, beta, g2=None) -> float:
        """Look up one cell; ``g2`` defaults to 0 for MFZ and 1e-7 otherwise."""
        model = Model(model).value
        if g2 is None:
            g2 = 0.0 if model == Model.MFZ.value else 1e-7
        return self.cells[(model, Variant(method).value, float(zeta), float(beta),
                           float(g2))].p_sc


def instance_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """Problem seed and trajectory seed for instance ``index``.

    Both depend only on ``(master_seed, index)``; every cell of a sweep thus
    sees the same problem and the same noise stream for a given instance.
    """
    ss = np.random.SeedSequence([int(master_seed) & ((1 << 64) - 1), index])
    words = ss.generate_state(4, np.uint64)
    return int(words[0]), int(words[1])


def build_problem_set(spec: SweepSpec):
    problems, grounds, traj_seeds = [], [], []
    for i in range(spec.instances):
        pseed, tseed = instance_seeds(spec.master_seed, i)
        p = generate_sk(spec.n, pseed)
        problems.append(p)
        grounds.append(brute_force_ground(p).energy)
        traj_seeds.append(tseed)
    return problems, np.array(grounds), traj_seeds


def _problem_hash(problems) -> str:
    h = hashlib.sha256()
    for p in problems:
        h.update(p.fingerprint())
    return h.hexdigest()


def _run_cell(args):
    spec, key, problems, grounds, seeds = args
    out = simulate_batch(problems, spec.solver_config(key), seeds)
    clean = out.fault_step < 0
    gap = out.energies - grounds
    ok = clean & (np.abs(gap) < spec.success_tol)
    mean_gap = float(gap[clean].mean()) if clean.any() else float("nan")
    return key, CellStats(len(problems), int(ok.sum()), int((~clean).sum()), mean_gap,
                          _problem_hash(problems))


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: ``CIM_THREADS`` if set, else ``workers``, else 1."""
    env = os.environ.get("CIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidArgumentError(f"CIM_THREADS must be an integer, got {env!r}") from None
    return max(1, workers or 1)


def run_batch(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate every cell of ``spec`` and aggregate success probabilities.

    Faulted trajectories count as failures and are tallied in
    ``CellStats.faults``. The result does not depend on ``workers``.
    """
    problems, grounds, seeds = build_problem_set(spec)
    tasks = [(spec, key, problems, grounds, seeds) for key in spec.cells()]
    workers = resolve_workers(workers)
    result = SweepResult()
    if workers == 1:
        outputs = map(_run_cell, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        outputs = pool.map(_run_cell, tasks)
    try:
        for key, stats in outputs:
            result.cells[key] = stats
            if stats.faults:
                log.warning("cell %s: %d of %d runs faulted", key, stats.faults, stats.runs)
    finally:
        if workers != 1:
            pool.shutdown()
    return result


def _fmt(v) -> str:
    return format(float(v), ".17g")


def export_csv(result: SweepResult, path) -> None:
    """Write one row per cell, sorted by key, reals at 17 significant digits."""
    try:
        with open(os.fspath(path), "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for key in sorted(result.cells):
                c = result.cells[key]
                model, method, zeta, beta, g2 = key
                w.writerow([model, method, _fmt(zeta), _fmt(beta), _fmt(g2), c.runs,
                            c.successes, _fmt(c.p_sc), _fmt(c.mean_energy_gap)])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def read_csv(path) -> SweepResult:
    """Parse a file written by :func:`export_csv`."""
    result = SweepResult()
    with open(os.fspath(path), newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise InvalidArgumentError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            key = (row["model"], row["method"], float(row["zeta"]), float(row["beta"]),
                   float(row["g2"]))
            result.cells[key] = CellStats(int(row["runs"]), int(row["successes"]),
                                          mean_energy_gap=float(row["mean_energy_gap"]))
    return result


_LIST_KEYS = {"models", "methods", "zeta_grid", "beta_grid", "g2_grid"}
_CASTS = {"n": int, "instances": int, "master_seed": int, "total_steps": int,
          "cac_drive": str}


def parse_config(text: str) -> tuple[SweepSpec, dict]:
    """Build a :class:`SweepSpec` from ``key = value`` lines.

    Lists are comma-separated. ``total_time`` (photon lifetimes) may replace
    ``total_steps``; ``workers`` is returned separately.

    Returns:
        the sweep spec and a dict of runner options (currently only ``workers``).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string("[sweep]\n" + text)
    except configparser.Error as exc:
        raise InvalidArgumentError(f"malformed config: {exc}") from exc
    known = {f.name for f in fields(SweepSpec)}
    kwargs, options, total_time = {}, {}, None
    for key, raw in parser["sweep"].items():
        try:
            if key in _LIST_KEYS:
                items = [v.strip() for v in raw.split(",") if v.strip()]
                kwargs[key] = [v.upper() for v in items] if key in ("models", "methods") \
                    else [float(v) for v in items]
            elif key == "workers":
                options["workers"] = int(raw)
            elif key == "total_time":
                total_time = float(raw)
            elif key in known:
                kwargs[key] = _CASTS.get(key, float)(raw)
            else:
                raise InvalidArgumentError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise InvalidArgumentError(f"bad value for {key!r}: {raw!r}") from exc
    if total_time is not None:
        dt = kwargs.get("dt", SweepSpec.dt)
        kwargs["total_steps"] = int(round(total_time / dt))
    try:
        return SweepSpec(**kwargs), options
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from exc


def load_config(path) -> tuple[SweepSpec, dict]:
    with open(os.fspath(path)) as f:
        return parse_config(f.read())


# --- figure presets ---------------------------------------------------------

FIG1_PROBLEM_SEED = 0
FIG1_TRAJECTORY_SEED = 0
FIG1_PANELS = {"a": (0.0, 0.0), "b": (1.0, 0.0), "c": (1.0, 10.0)}
FIG3_BETA_GRID = tuple(0.5 * k for k in range(1, 21))


def figure_specs(which: int, **overrides) -> dict:
    """Sweep specs that regenerate the data behind figures 2-4.

    Returns a mapping from output file stem to :class:`SweepSpec`; keyword
    overrides (``instances``, ``zeta_grid``, ``dt``, ...) apply to every spec.
    """
    mk = lambda **kw: SweepSpec(**{**kw, **overrides})  # noqa: E731
    if which == 2:
        return {
            "fig2_gatw": mk(models=("GATW",), beta_grid=(0.0, 10.0), g2_grid=(1e-7, 1e-3)),
            "fig2_mfz": mk(models=("MFZ",), beta_grid=(0.0, 10.0)),
        }
    if which == 3:
        return {
            "fig3_gatw": mk(models=("GATW",), beta_grid=FIG3_BETA_GRID, g2_grid=(1e-7,)),
            "fig3_mfz": mk(models=("MFZ",), beta_grid=FIG3_BETA_GRID),
        }
    if which == 4:
        methods = ("CAC", "ABS_MEAN", "AUX_SPIN")
        return {
            "fig4_gatw": mk(models=("GATW",), methods=methods, beta_grid=(10.0,), g2_grid=(1e-7,)),
            "fig4_mfz": mk(models=("MFZ",), methods=methods, beta_grid=(10.0,)),
        }
    raise InvalidArgumentError(f"no sweep preset for figure {which}")


def figure1_configs(**schedule_overrides) -> dict:
    """Single-trajectory MFZ configs for the amplitude-evolution panels.

    Panel ``c`` also carries the error-variable traces.
    """
    out = {}
    for panel, (zeta, beta) in FIG1_PANELS.items():
        sched = ScheduleConfig(model=Model.MFZ, **schedule_overrides)
        out[f"fig1{panel}"] = SolverConfig(sched, ZeemanMethod(Variant.CAC, zeta, beta, 1.0),
                                           seed=FIG1_TRAJECTORY_SEED, record_trajectory=True,
                                           record_every=10)
    return out
