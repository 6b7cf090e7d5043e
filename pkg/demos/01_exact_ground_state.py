"""
Exact ground states of small spin glasses
=========================================

Draw a Sherrington-Kirkpatrick instance, find its ground state by Gray-code
enumeration and check the answer against a slow full re-evaluation.
"""

import time

import numpy as np

from zeeman_cim import brute_force_ground, brute_force_naive, generate_sk, ising_energy, local_field

problem = generate_sk(16, seed=7)
print("couplings", problem.J.shape, "fields", problem.h.shape)

# Gray-code enumeration touches one spin per step, so each energy costs O(n)
t0 = time.perf_counter()
gt = brute_force_ground(problem)
print(f"ground energy {gt.energy:.6f} in {time.perf_counter() - t0:.3f}s")
print("ground config", gt.config.astype(int))

# the slow oracle should agree to rounding
print("naive agrees:", np.isclose(brute_force_naive(problem).energy, gt.energy, atol=1e-9))

# every single flip from the ground state costs energy: 2 s_r f_r >= 0
costs = [2 * gt.config[r] * local_field(problem, gt.config, r) for r in range(problem.n)]
print("cheapest flip costs", f"{min(costs):.4f}")

# random configurations never beat the ground state
rng = np.random.default_rng(0)
S = 1.0 - 2.0 * rng.integers(0, 2, (5000, problem.n))
print("best of 5000 random", f"{ising_energy(problem, S).min():.4f}")
