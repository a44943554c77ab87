# %% [markdown]
# # How far can the quantum channel reach?
#
# The maximum distance is where the key rate falls to zero, found by a coarse
# scan followed by bisection. We compare channel plans, filter bandwidths and
# launch powers.

# %%
from ramanqkd.plans import PRESET_NAMES, preset
from ramanqkd.raman import DetectionParams
from ramanqkd.scan import Scenario, max_distance, max_distance_vs_power

print(f"no Raman noise: {max_distance(Scenario(preset('none'))).length_km:.2f} km")

# %%
print(f"{'plan':>4} {'1 GHz':>8} {'10 GHz':>8} {'100 GHz':>8}   (co, PSK, 0 dBm)")
for name in PRESET_NAMES:
    row = [max_distance(Scenario(preset(name), detection=DetectionParams(filter_bandwidth_hz=bw)))
           for bw in (1e9, 10e9, 100e9)]
    print(f"{name:>4} " + " ".join(f"{m.length_km:8.2f}" for m in row))

# %% [markdown]
# Co- versus counter-propagation. The measured co-propagating slopes are
# slightly larger, so at very short reach the counter direction can win.

# %%
for name in ("A", "D", "G"):
    co = max_distance(Scenario(preset(name, 0.0, "co"))).length_km
    ctr = max_distance(Scenario(preset(name, 0.0, "counter"))).length_km
    print(f"plan {name}: co {co:6.2f} km, counter {ctr:6.2f} km")

# %%
res = max_distance_vs_power(Scenario(preset("C")), range(-10, 1, 2))
for p, d in zip(res.abscissa, res.columns["max_distance_km"]):
    print(f"{p:5.0f} dBm per channel: {d:6.2f} km")
