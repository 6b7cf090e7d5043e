"""Coherent Ising machine simulators with artificial Zeeman terms."""

from .errors import (
    CimError,
    InvalidArgumentError,
    NumericFault,
    SizeLimitError,
    StepSizeFault,
)
from .ising import (
    GroundTruth,
    IsingProblem,
    brute_force_ground,
    brute_force_naive,
    generate_sk,
    ising_energy,
    load_problem,
    local_field,
    save_problem,
    spins_from_amplitudes,
)
from .models import (
    RunResult,
    SolverConfig,
    SystemState,
    gatw_step,
    init_state,
    mfz_step,
    run_trajectory,
    simulate_batch,
    wigner_full_step,
)
from .schedules import Model, ScheduleConfig, pump_gatw, target_gatw, target_mfz
from .zeeman import (
    CacState,
    Variant,
    ZeemanMethod,
    cac_error_step,
    extend_problem_aux,
    gauge_fix_aux,
    injection_abs_mean,
    injection_cac,
)

__version__ = "0.1.0"
