# %% [markdown]
# # Stein derivative and threshold algebra
#
# The Stein functional `(int |f(x)-f(y)|^2 / |x-y|^{1+2b} dy)^{1/2}` has the
# same L2 norm as `D^b f` up to a constant.  With the exterior term the
# ratio lands on that constant.

# %%
import math

import numpy as np

from fkdv import Field, make_grid
from fkdv.diagnostics import (decay_gain, homogeneous_norm, regularity_thresholds, stein_constant,
                              stein_norm, symbol_stein_check)

grid = make_grid(1, 1024, 30.0)
for b in (0.3, 0.5, 0.7):
    f = Field.from_function(grid, lambda x: np.exp(-x**2 / 2))
    ratio = stein_norm(f, b, exterior=True) / homogeneous_norm(f, b)
    print(f"b={b}: ratio {ratio:.5f}, sqrt C(1,b) = {math.sqrt(stein_constant(1, b)):.5f}")

# %%
rep = symbol_stein_check((1, 2, 4, 8), a=0.5, b=0.5, xi_values=(2, 4, 8, 16))
print(f"growth in t: {rep.t_exponent:.3f}, in xi: {rep.xi_exponent:.3f}, max ratio {rep.max_ratio:.2f}")

# %% [markdown]
# Regularity thresholds and the decay gain map `r -> theta r`.

# %%
s1, s2 = regularity_thresholds(1, 2)
print(f"s1={s1:.4f}  s2={s2:.4f}")
for s in (1.5, s1, 3.0, 5.0):
    print(f"s={s:.4f}: r=1 -> {decay_gain(1, 2, s, 1.0).r1:.4f}")
