"""
Three ways to add a Zeeman term
===============================

Compare the absolute-mean, auxiliary-spin and CAC-scaled Zeeman terms on a
shared set of small instances. The sample is tiny, so expect noisy numbers.
"""

from zeeman_cim.harness import SweepSpec, run_batch

spec = SweepSpec(n=12, instances=40, master_seed=3, models=("MFZ",),
                 methods=("ABS_MEAN", "AUX_SPIN", "CAC"), zeta_grid=(0.5, 1.0, 2.0),
                 beta_grid=(10.0,), total_steps=10000)
result = run_batch(spec)

print("method     zeta  P_sc")
for (model, method, zeta, beta, g2), cell in sorted(result.cells.items()):
    print(f"{method:<10} {zeta:4.1f}  {cell.p_sc:.3f}")
