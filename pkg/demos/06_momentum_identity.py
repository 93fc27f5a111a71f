# %% [markdown]
# # The first-moment identity on a box
#
# On the line, `d/dt int x u = sum_j nu_j/k_j int u^{k_j}`.  A periodic box adds
# a boundary term: the flux through the faces, about `2 L F(L)`.  It falls
# off slowly with `L`, so the raw residual is dominated by it; with the
# flux added back the identity closes to time-stepping accuracy.

# %%
import numpy as np

from fkdv import Field, ModelParams, StepperConfig, evolve, make_grid, momentum_residual

params = ModelParams(a=1.0, nonlinearities=((2, 1), (3, 1)))
for L in (256.0, 1024.0, 4096.0):
    grid = make_grid(1, int(8 * L), L)
    u0 = Field.from_function(grid, lambda x: 0.1 * np.exp(-x**2))
    recs = evolve(u0, params, StepperConfig(0.01, 1.0, record_every=2)).records
    raw = momentum_residual(recs, params)
    fixed = momentum_residual(recs, params, box_corrected=True)
    print(f"L={L:6.0f}  raw {raw:.2e}  with box flux {fixed:.2e}")
