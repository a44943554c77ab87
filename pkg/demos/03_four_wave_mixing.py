# %% [markdown]
# # Is four-wave mixing a concern?
#
# Two checks: the nonlinear phase gamma*P0*L, and the phase-matching
# efficiency of a product landing on the quantum channel relative to perfect
# phase matching.

# %%
from ramanqkd import grid
from ramanqkd.fwm import (DispersionParams, NonlinearParams, delta_k, effective_length,
                          fwm_efficiency, fwm_negligible, mixing_products, nonlinear_gamma)

f_q = grid.channel_to_frequency(39)
gamma = nonlinear_gamma(NonlinearParams(n2_m2_per_w=2.6e-20, a_eff_m2=50e-12), f_q)
print(f"gamma = {gamma:.3e} 1/(W m)")

alpha = grid.db_per_km_to_per_km(0.2) / 1e3
for length_km in (7.5, 25.0, 60.0):
    ok, _ = fwm_negligible(gamma, 1e-3, length_km * 1e3)
    l_eff = effective_length(alpha, length_km * 1e3)
    print(f"{length_km:5.1f} km, 1 mW: gamma P0 L = {gamma * 1e-3 * length_km * 1e3:.4f} "
          f"({'below' if ok else 'above'} 0.1), with L_eff {gamma * 1e-3 * l_eff:.4f}")

# %% [markdown]
# Standard single-mode fibre at 16 ps/(km nm) with channels 37, 38 and 39.

# %%
disp = DispersionParams.from_engineering(16.0)
f = [grid.channel_to_frequency(c) for c in (37, 38, 39)]
dk = delta_k(disp, *f)
print(f"delta k = {dk:.3e} 1/m, suppression = {fwm_efficiency(alpha, dk, 7.5e3):.2e}")

for term in mixing_products([35, 36, 37, 38, 40], disp, alpha, 7.5e3, target=39):
    print(f"  {term.i}+{term.j}-{term.k} -> {term.product}: eta = {term.efficiency:.2e}")
