# %% [markdown]
# # When the first moment pays back
#
# For zero-mean data `d/dt int x u = (nu/2) ||u||^2` with `k = 2`, so the first
# moment is linear in time and its time integral `G` vanishes again at
# `t* = -4 int x u0 / (nu ||u0||^2)`.  The default data is tuned so `t* = 2`.

# %%
from fkdv import run_scenario

rep = run_scenario("tstar")
m = rep.metrics
print(f"predicted t* = {m['tstar_predicted']:.6f}")
print(f"measured  t* = {m['tstar_measured']:.6f}  (relative error {m['tstar_rel_error']:.1e})")
print(f"slope of M1: {m['M1_slope']:.8f} vs (nu/2) I2 = {m['M1_slope_expected']:.8f}")

# %%
for row in rep.table[::30]:
    print(f"t={row['t']:5.2f}  M1={row['M1']:+.6f}  G={row['G']:+.6f}")
