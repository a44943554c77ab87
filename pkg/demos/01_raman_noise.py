# %% [markdown]
# # Raman noise in the quantum channel
#
# Classical DWDM channels scatter a small fraction of their light into the
# quantum channel (ITU channel 39, 1546.12 nm). Here we look at how the
# detected noise depends on fibre length, direction of propagation and the
# number of populated channels.

# %%
import numpy as np

from ramanqkd import grid
from ramanqkd.plans import PRESET_NAMES, preset
from ramanqkd.raman import MEASURED_SLOPES, DetectionParams, FiberParams, co_peak_length, srs_counts_multi

fiber = FiberParams(alpha_mean_per_km=0.0484)
det = DetectionParams(eta=0.045, tau_s=1e-9, filter_bandwidth_hz=10e9)
print(f"quantum channel: {grid.channel_to_wavelength(39) * 1e9:.2f} nm")

# %% [markdown]
# Counts per 1 ns gate for plan D at 0 dBm per channel. Co-propagating noise
# peaks near 1/alpha and then decays with the signal; counter-propagating
# noise keeps accumulating towards a plateau.

# %%
z = np.arange(0, 101, 10.0)
co = srs_counts_multi(preset("D", 0.0, "co"), z, MEASURED_SLOPES["co"], fiber, det)
counter = srs_counts_multi(preset("D", 0.0, "counter"), z, MEASURED_SLOPES["counter"], fiber, det)
print(f"{'z [km]':>7} {'co':>11} {'counter':>11}")
for row in zip(z, co, counter):
    print(f"{row[0]:7.0f} {row[1]:11.3e} {row[2]:11.3e}")
print(f"co-propagating peak at {co_peak_length(fiber):.1f} km")

# %% [markdown]
# More channels means more noise. At 25 km the presets are ordered A < ... < G.

# %%
for name in PRESET_NAMES:
    p = float(srs_counts_multi(preset(name, 0.0, "co"), 25.0, MEASURED_SLOPES["co"], fiber, det))
    print(f"plan {name}: {len(preset(name).channels):2d} channels, {p:.3e} counts/gate")
