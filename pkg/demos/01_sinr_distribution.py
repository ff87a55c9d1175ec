"""SINR distribution of a random-beamforming cell under inter-cell interference.

Run with ``python demos/01_sinr_distribution.py``.
"""

# %%
import numpy as np

from mcrbf import figures
from mcrbf.mc import McConfig, ks_statistic, simulate_sinr_samples
from mcrbf.sinr import SinrDistribution, evt_constants, growth_function, sinr_cdf, sinr_pdf

# %% [markdown]
# Three cells, four antennas.  Cell 1 serves four beams at 30 dB per beam and
# hears two interfering cells at -3 dB and +3 dB per beam.

# %%
system = figures.fig1_systems()[0]
dist = SinrDistribution(system, 0)
print("eta_1 =", dist.eta, " interferers (M_l, mu_l1):", dist.interference)

s = np.array([0.0, 0.5, 1.0, 2.0, 5.0])
print("F(s) =", np.round(sinr_cdf(dist, s), 6))
print("f(s) =", np.round(sinr_pdf(dist, s), 6))

# %% [markdown]
# The analytical CDF against 10^5 simulated SINRs (100 users x 1000 drops).

# %%
samples = simulate_sinr_samples(McConfig(system, (100, 1, 1), 1000, master_seed=1), 0)
print("KS distance:", ks_statistic(samples, lambda x: sinr_cdf(dist, x)))

# %% [markdown]
# The growth function g = (1 - F)/f tends to eta, which is what puts the
# maximum of K SINRs in the Gumbel domain of attraction.

# %%
for x in (1.0, 1e2, 1e4, 1e6):
    print(f"g({x:g}) = {growth_function(dist, x):.4f}")
evt = evt_constants(dist, 1000)
print(f"K=1000: location b_K = {evt.location:.2f}, scale a_K = {evt.scale:.2f}")
