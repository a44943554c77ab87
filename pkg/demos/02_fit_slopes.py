# %% [markdown]
# # Recovering Raman slopes from count data
#
# The counts are linear in the two slopes (one for data channels below the
# quantum channel, one for those above), so a weighted least-squares fit over
# several channel plans and spool lengths recovers both. We fake a
# measurement campaign, add Poisson noise and fit it back.

# %%
import numpy as np

from ramanqkd.calib import fit_slopes, fit_slopes_by_length, spread, synthesize_records
from ramanqkd.plans import PRESET_NAMES, preset
from ramanqkd.raman import MEASURED_SLOPES, DetectionParams, FiberParams

det = DetectionParams(eta=0.15 * 10 ** -0.84, tau_s=2.5e-9, filter_bandwidth_hz=10e9)
fiber = FiberParams()
dark = 3.6e-5
lengths = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
rng = np.random.default_rng(2024)

# %%
for direction in ("co", "counter"):
    truth = MEASURED_SLOPES[direction]
    plans = [preset(n, -10.5, direction) for n in PRESET_NAMES]
    recs = synthesize_records(plans, lengths, truth, det, fiber, p_dark=dark, rng=rng)
    fit = fit_slopes(recs, det, fiber, p_dark_background=dark)
    print(f"{direction:>8}: s = {fit.s_hat:.3e} +/- {fit.s_sigma:.1e} (true {truth.s:.2e}), "
          f"a = {fit.a_hat:.3e} +/- {fit.a_sigma:.1e} (true {truth.a:.2e})")

# %% [markdown]
# Fitting each spool separately gives a feel for the scatter between
# independent measurements.

# %%
per = fit_slopes_by_length(recs, det, fiber, p_dark_background=dark)
for z, f in per.items():
    print(f"  {z:4.0f} km: s = {f.s_hat:.3e}, a = {f.a_hat:.3e}")
print("mean/std:", {k: tuple(f"{v:.2e}" for v in pair) for k, pair in spread(per).items()})
