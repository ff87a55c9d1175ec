"""High-SNR degrees of freedom when the user count grows like rho**alpha.

Run with ``python demos/04_single_cell_dof.py``.
"""

# %%
import math
from fractions import Fraction

from mcrbf.dof import dof_single, dof_single_opt
from mcrbf.mc import McConfig, simulate_sumrate
from mcrbf.model import SystemModel, db_to_linear

# %% [markdown]
# More beams are not always better: with few users the interference between
# beams caps the DoF.

# %%
for alpha in (Fraction(1, 2), 1, Fraction(3, 2), 2, 3):
    d, m = dof_single_opt(alpha, 4)
    per_m = [str(dof_single(alpha, M)) for M in range(1, 5)]
    print(f"alpha={str(alpha):>4}: d(M=1..4) = {per_m}, best d*={d} with M*={m}")

# %% [markdown]
# A quick simulation with alpha = 1: the slope in bits per log2(rho) follows
# the DoF, 2 with two beams and 4/3 with four.

# %%
for M in (2, 4):
    rates = []
    for rho_db in (20, 30):
        rho = db_to_linear(rho_db)
        K = math.floor(rho * (1 + 1e-12))
        cfg = McConfig(SystemModel(4, (M,), rho, 1.0), (K,), 500, master_seed=rho_db)
        rates.append(simulate_sumrate(cfg)[0].value)
    slope = (rates[1] - rates[0]) / math.log2(10)
    print(f"M={M}: simulated slope {slope:.3f}, DoF {float(dof_single(1, M)):.3f}")
