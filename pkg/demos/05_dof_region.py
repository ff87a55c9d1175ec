"""Two-cell DoF region: vertices, Pareto boundary, support and membership.

Run with ``python demos/05_dof_region.py``.
"""

# %%
from mcrbf.dof import dof_member, dof_region, dof_support, rbf_is_dof_optimal

# %% [markdown]
# Every beam assignment (M_1, M_2) in {0..4}^2 gives a DoF pair; time sharing
# fills in the convex hull.

# %%
for alpha in ([1, 1], [3, 1], [7, 7]):
    region = dof_region(alpha, 4)
    hull = [(str(x), str(y)) for x, y in region.hull]
    print(f"alpha={alpha}: boundary {hull}")
    print("   sum-DoF:", dof_support(region, (1, 1)),
          " contains (4,4):", dof_member(region, (4, 4)))

# %% [markdown]
# With enough users per cell the region is the full interference-free box.

# %%
for alpha in ([1, 1], [7, 7]):
    cert = rbf_is_dof_optimal(alpha, 2, 4)
    print(alpha, "sufficient condition met:", bool(cert), "gap:", [str(g) for g in cert.gap])
