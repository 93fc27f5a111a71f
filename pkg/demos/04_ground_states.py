# %% [markdown]
# # Ground-state tails
#
# The solitary wave decays like `|x|^{-(d+a)}` for `0 < a < 2`, and
# exponentially in the KdV case `a = 2`.  The fit below works on radial
# bins between `L/40` and `L/8`.

# %%
import numpy as np

from fkdv import ModelParams, make_grid, petviashvili_solve, rescale_ground_state, verify_decay

for a, (n, L) in [(0.5, (2**15, 8000.0)), (1.0, (4096, 200 * np.pi)), (1.5, (8192, 1000.0))]:
    res = petviashvili_solve(ModelParams.single(a, 2, 1), grid=make_grid(1, n, L))
    rep = verify_decay(res)
    print(f"a={a}: exponent {rep.exponent:.3f} (expected {rep.expected}), "
          f"A2/A1 = {rep.upper_constant / rep.lower_constant:.2f}")

# %%
kdv = petviashvili_solve(ModelParams.single(2.0, 2, 1), grid=make_grid(1, 1024, 200.0))
print(verify_decay(kdv, (10, 25)).message)

# %% [markdown]
# Speed scaling: `Q_c(x) = c^{1/(k-1)} Q(c^{1/a} x)`.

# %%
grid = make_grid(1, 1024, 40.0)
base = petviashvili_solve(ModelParams.single(2.0, 2, 1), grid=grid)
direct = petviashvili_solve(ModelParams.single(2.0, 2, 1), c=1.5, grid=grid)
scaled = rescale_ground_state(base.Q, 1.5, a=2.0, k=2)
print("rescaled vs direct solve:", np.max(np.abs(scaled.values - direct.Q.values)))
