"""
Amplitude homogenisation by chaotic amplitude control
=====================================================

Run the mean-field machine on one 16-spin instance with and without the
error-feedback loop and compare the final amplitudes.
"""

import numpy as np

from zeeman_cim import (
    ScheduleConfig,
    SolverConfig,
    ZeemanMethod,
    brute_force_ground,
    generate_sk,
    run_trajectory,
)
from zeeman_cim.harness import FIG1_PROBLEM_SEED, FIG1_TRAJECTORY_SEED

problem = generate_sk(16, FIG1_PROBLEM_SEED)
ground = brute_force_ground(problem)
sched = ScheduleConfig(model="MFZ")
tau_end = sched.tau0 + sched.tau_n

for beta in (0.0, 10.0):
    cfg = SolverConfig(sched, ZeemanMethod("CAC", zeta=1.0, beta=beta), seed=FIG1_TRAJECTORY_SEED,
                       record_trajectory=True, record_every=500)
    res = run_trajectory(problem, cfg, ground)
    x = res.final_state.x
    print(f"beta={beta:4.1f}  success={res.success}  E={res.final_energy:.4f} (ground {ground.energy:.4f})")
    print("  |x| spread", f"{np.std(np.abs(x)):.3f}",
          " max|x^2-tau|/tau", f"{np.max(np.abs(x**2 - tau_end)) / tau_end:.2e}")

    # a coarse look at how the first three amplitudes evolve
    for t, row in zip(res.trajectory.t[::6], res.trajectory.x[::6]):
        print(f"  t={t:5.1f}", np.array2string(row[:3], precision=3))
