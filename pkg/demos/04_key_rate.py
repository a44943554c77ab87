# %% [markdown]
# # Secure key rate with and without classical traffic
#
# Decoy-state BB84 in the infinite-decoy limit. Raman noise adds to the
# vacuum yield, weighted by the duty cycle of the classical modulation format.

# %%
import numpy as np

from ramanqkd.plans import preset
from ramanqkd.qkd import ModulationFormat
from ramanqkd.scan import Scenario

lengths = np.arange(0, 121, 20.0)
cases = {
    "no classical traffic": Scenario(preset("none")),
    "plan A, co, PSK": Scenario(preset("A", 0.0, "co")),
    "plan A, co, OOK-RZ": Scenario(preset("A", 0.0, "co"), modulation=ModulationFormat.OOK_RZ),
    "plan A, counter, PSK": Scenario(preset("A", 0.0, "counter")),
}

# %%
print(f"{'':>22}" + "".join(f"{x:>10.0f}" for x in lengths))
for label, sc in cases.items():
    r = np.maximum(sc.rate(lengths), 0.0)
    print(f"{label:>22}" + "".join(f"{v:10.2e}" for v in r))

# %% [markdown]
# QBER climbs quickly once Raman noise dominates the vacuum yield.

# %%
sc = cases["plan A, co, PSK"]
for x in (0.0, 25.0, 50.0, 100.0):
    p = sc.point(x)
    print(f"{x:5.0f} km: Q = {p.q:.2e}, E = {p.e:.3f}, Y0 = {p.y0:.2e}")
