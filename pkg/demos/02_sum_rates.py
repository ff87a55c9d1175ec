"""Average sum rate three ways: closed form, quadrature, Monte Carlo.

Run with ``python demos/02_sum_rates.py``.
"""

# %%
from mcrbf import figures
from mcrbf.mc import McConfig, simulate_sumrate
from mcrbf.rate import sumrate_closed_multicell, sumrate_quadrature

# %% [markdown]
# The closed forms are alternating binomial sums.  They are evaluated in
# multiprecision, at a bit count that grows with K, and double-checked at
# twice that precision.

# %%
single = figures.fig2_single()
two_cell = figures.fig2_two_cell()

print(" K   single closed    quad        two-cell closed   quad")
for K in (1, 2, 5, 10):
    a = sumrate_closed_multicell(single, 0, K)
    b = sumrate_quadrature(single, 0, K)
    c = sumrate_closed_multicell(two_cell, 0, K)
    d = sumrate_quadrature(two_cell, 0, K)
    print(f"{K:2d}   {a.value:.10f}  {b.value:.10f}   {c.value:.10f}  {d.value:.10f}"
          f"   ({c.precision_bits} bits)")

# %% [markdown]
# Monte Carlo gives an independent check with a standard error.

# %%
for K in (1, 10):
    mc = simulate_sumrate(McConfig(two_cell, (K, K), 4000, master_seed=K))[0]
    exact = sumrate_closed_multicell(two_cell, 0, K).value
    print(f"K={K}: MC {mc.value:.4f} +/- {mc.error_estimate:.4f}, closed form {exact:.4f}")
