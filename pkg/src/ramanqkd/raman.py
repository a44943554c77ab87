"""Spontaneous Raman scattering noise in the quantum channel.

Counts per detection gate produced by classical DWDM channels sharing the
fibre, for co- and counter-propagating traffic. The Raman coefficient of a
data channel grows linearly with its grid separation from the quantum channel
(a v-shaped model valid inside the C-band), with separate slopes below and
above the quantum channel frequency.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import grid
from .errors import InvalidInputError

Direction = Literal["co", "counter"]
DIRECTIONS = ("co", "counter")

# Separation beyond which the linear coefficient model is extrapolating.
MAX_LINEAR_SEPARATION = 15


def _check_direction(direction):
    if direction not in DIRECTIONS:
        raise InvalidInputError(f"direction must be 'co' or 'counter', got {direction!r}")
    return direction


@dataclass(frozen=True)
class RamanSlopes:
    """Per-channel-separation Raman coefficient slopes.

    ``s`` applies to data channels below the quantum channel on the grid
    (lower channel number, lower frequency) and ``a`` to those above. Both are
    in 1/km per 100 GHz of separation, normalised to ``ref_bandwidth_hz`` of
    detection filter bandwidth.
    """

    s: float
    a: float
    direction: Direction
    ref_bandwidth_hz: float = 10e9
    s_sigma: float = 0.0
    a_sigma: float = 0.0

    def __post_init__(self):
        _check_direction(self.direction)
        if not (self.s > 0 and self.a > 0):
            raise InvalidInputError("Raman slopes must be positive")
        if not self.ref_bandwidth_hz > 0:
            raise InvalidInputError("reference bandwidth must be positive")


# Measured slopes, 10 GHz filter, 1/km per channel of separation.
MEASURED_SLOPES = {
    "co": RamanSlopes(s=6.9e-12, a=11.5e-12, direction="co", s_sigma=1.6e-12, a_sigma=1.0e-12),
    "counter": RamanSlopes(s=6.8e-12, a=10.8e-12, direction="counter",
                           s_sigma=1.3e-12, a_sigma=0.9e-12),
}


def default_slopes(direction: Direction) -> RamanSlopes:
    return MEASURED_SLOPES[_check_direction(direction)]


@dataclass(frozen=True)
class ChannelPlan:
    """A quantum channel and the populated classical channels around it.

    ``data_channels`` is a tuple of ``(itu_channel, launch_power_w)`` pairs.
    """

    quantum_channel: int = 39
    data_channels: tuple[tuple[int, float], ...] = ()
    direction: Direction = "co"
    name: str = ""

    def __post_init__(self):
        _check_direction(self.direction)
        grid.channel_to_frequency(self.quantum_channel)
        chans = tuple((int(ch), float(p)) for ch, p in self.data_channels)
        seen = set()
        for ch, p in chans:
            grid.channel_to_frequency(ch)
            if ch == self.quantum_channel:
                raise InvalidInputError(f"channel {ch} is the quantum channel and cannot carry data")
            if ch in seen:
                raise InvalidInputError(f"channel {ch} listed twice")
            if not p >= 0:
                raise InvalidInputError(f"channel {ch} has negative power {p}")
            seen.add(ch)
        object.__setattr__(self, "data_channels", chans)

    @property
    def channels(self) -> list[int]:
        return [ch for ch, _ in self.data_channels]

    def with_uniform_power(self, power_w: float) -> "ChannelPlan":
        return replace(self, data_channels=tuple((ch, power_w) for ch in self.channels))

    def with_direction(self, direction: Direction) -> "ChannelPlan":
        return replace(self, direction=direction)

    def scaled(self, k: float) -> "ChannelPlan":
        return replace(self, data_channels=tuple((ch, k * p) for ch, p in self.data_channels))


@dataclass(frozen=True)
class DetectionParams:
    """Receiver seen by the Raman photons.

    eta: end-to-end detection efficiency; tau_s: gate length;
    filter_bandwidth_hz: quantum-channel filter FWHM; p_dark: dark-count
    probability per gate per detector.
    """

    eta: float = 0.045
    tau_s: float = 1e-9
    filter_bandwidth_hz: float = 10e9
    p_dark: float = 0.85e-6

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise InvalidInputError("detection efficiency must lie in (0, 1]")
        if not self.tau_s > 0:
            raise InvalidInputError("gate length must be positive")
        if not self.filter_bandwidth_hz > 0:
            raise InvalidInputError("filter bandwidth must be positive")
        if not 0 <= self.p_dark < 1:
            raise InvalidInputError("dark-count probability must lie in [0, 1)")


@dataclass(frozen=True)
class FiberParams:
    """alpha_mean_per_km: attenuation averaged over data and quantum
    wavelengths; alpha_q_per_km: attenuation at the quantum wavelength
    (defaults to the mean); excess_loss_db: lumped non-fibre loss on the
    scattered light."""

    alpha_mean_per_km: float = 0.0484
    alpha_q_per_km: float | None = None
    excess_loss_db: float = 0.0

    def __post_init__(self):
        if not self.alpha_mean_per_km > 0:
            raise InvalidInputError("mean attenuation must be positive")
        if not self.excess_loss_db >= 0:
            raise InvalidInputError("excess loss must be non-negative")
        if self.alpha_q_per_km is None:
            object.__setattr__(self, "alpha_q_per_km", self.alpha_mean_per_km)

    @property
    def excess_factor(self) -> float:
        return 10.0 ** (-self.excess_loss_db / 10.0)


def beta_coefficient(slopes: RamanSlopes, ch: int, q: int, bandwidth_hz: float) -> float:
    """Effective Raman coefficient (1/km) of channel ``ch`` into quantum channel ``q``.

    Linear in the absolute grid separation and in the filter bandwidth.
    """
    if ch == q:
        raise InvalidInputError("data channel coincides with the quantum channel")
    sep = abs(q - ch)
    if sep > MAX_LINEAR_SEPARATION:
        warnings.warn(f"channel {ch} is {sep} channels from the quantum channel; "
                      "the linear Raman model is extrapolating", stacklevel=2)
    slope = slopes.s if ch < q else slopes.a
    return slope * sep * (bandwidth_hz / slopes.ref_bandwidth_hz)


def propagation_kernel(direction: Direction, z_km, alpha_per_km: float):
    """Length-integrated scattering kernel in km.

    co: ``z exp(-alpha z)``; counter: ``(1 - exp(-2 alpha z)) / (2 alpha)``.
    """
    _check_direction(direction)
    z = np.asarray(z_km, dtype=float)
    if np.any(z < 0):
        raise InvalidInputError("fibre length must be non-negative")
    if direction == "co":
        k = z * np.exp(-alpha_per_km * z)
    else:
        k = -np.expm1(-2.0 * alpha_per_km * z) / (2.0 * alpha_per_km)
    return float(k) if k.ndim == 0 else k


def _photons_per_joule_gate(det: DetectionParams, f_q_hz: float, fiber: FiberParams) -> float:
    return det.eta * det.tau_s / grid.photon_energy(f_q_hz) * fiber.excess_factor


def srs_counts_single(direction: Direction, p0_w: float, z_km, beta_per_km: float,
                      fiber: FiberParams, det: DetectionParams, f_q_hz: float):
    """Raman counts per gate from one classical channel of launch power ``p0_w``."""
    kern = propagation_kernel(direction, z_km, fiber.alpha_mean_per_km)
    return p0_w * beta_per_km * kern * _photons_per_joule_gate(det, f_q_hz, fiber)


def weighted_beta_sum(plan: ChannelPlan, slopes: RamanSlopes, bandwidth_hz: float) -> float:
    """``sum_i beta_i P_i`` over the plan, in W/km."""
    total = 0.0
    for ch, p in plan.data_channels:
        total += beta_coefficient(slopes, ch, plan.quantum_channel, bandwidth_hz) * p
    return total


def srs_counts_multi(plan: ChannelPlan, z_km, slopes: RamanSlopes,
                     fiber: FiberParams, det: DetectionParams):
    """Total Raman counts per gate from every channel of ``plan``.

    ``z_km`` may be an array; the result then has the same shape.
    """
    if plan.direction != slopes.direction:
        raise InvalidInputError(
            f"plan is {plan.direction}-propagating but slopes are for {slopes.direction}")
    f_q = grid.channel_to_frequency(plan.quantum_channel)
    kern = propagation_kernel(plan.direction, z_km, fiber.alpha_mean_per_km)
    wsum = weighted_beta_sum(plan, slopes, det.filter_bandwidth_hz)
    return wsum * kern * _photons_per_joule_gate(det, f_q, fiber)


def counter_saturation(p0_w: float, beta_per_km: float, fiber: FiberParams,
                       det: DetectionParams, f_q_hz: float) -> float:
    """Long-fibre limit of the counter-propagating counts."""
    return (p0_w * beta_per_km / (2.0 * fiber.alpha_mean_per_km)
            * _photons_per_joule_gate(det, f_q_hz, fiber))


def co_peak_length(fiber: FiberParams) -> float:
    """Length (km) maximising the co-propagating kernel."""
    return 1.0 / fiber.alpha_mean_per_km


__all__ = [
    "DIRECTIONS", "MEASURED_SLOPES", "ChannelPlan", "DetectionParams", "FiberParams",
    "RamanSlopes", "beta_coefficient", "co_peak_length", "counter_saturation",
    "default_slopes", "propagation_kernel", "srs_counts_multi", "srs_counts_single",
    "weighted_beta_sum",
]
