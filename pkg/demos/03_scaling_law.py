"""The M log2(eta ln K) sum-rate law and how slowly it is approached.

Run with ``python demos/03_scaling_law.py``.
"""

# %%
import math

from mcrbf import figures
from mcrbf.rate import dpc_upper_rate, scaling_law, sumrate_quadrature

# %%
system = figures.fig3_single()
eta = system.snr_per_beam(0)
for K in (10, 100, 1000, 10_000, 100_000):
    r = sumrate_quadrature(system, 0, K).value
    law = scaling_law(K, 3, eta)
    print(f"K={K:>6}: rate {r:7.3f}  law {law:7.3f}  ratio {r / law:.3f}")

# %% [markdown]
# The ratio creeps up towards one.  The dirty-paper upper bound grows with
# the same log log K behaviour but with all antennas serving the best users.

# %%
for K in (10, 1000, 100_000):
    print(f"K={K:>6}: DPC bound {dpc_upper_rate(K, 3, eta).value:7.3f}")

# %% [markdown]
# At high SNR with K = rho users the bound grows by N_T bits per doubling.

# %%
rates = [dpc_upper_rate(math.floor(rho), 4, rho / 4).value for rho in (1e4, 1e6)]
print("DPC slope from 40 to 60 dB:", (rates[1] - rates[0]) / math.log2(100))
