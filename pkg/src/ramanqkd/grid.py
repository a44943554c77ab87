"""ITU-T 100 GHz DWDM grid, power and photon-energy conversions.

Channel ``n`` sits at ``190 THz + n * 100 GHz``, which puts channel 39 at
193.9 THz (1546.12 nm).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError

C_M_S = 299_792_458.0
H_J_S = 6.626_070_15e-34

GRID_ORIGIN_HZ = 190.0e12
GRID_SPACING_HZ = 100.0e9
CHANNEL_RANGE = (1, 80)


def _check_channel(ch, valid):
    lo, hi = CHANNEL_RANGE if valid is None else valid
    if isinstance(ch, bool) or int(ch) != ch:
        raise InvalidInputError(f"ITU channel must be an integer, got {ch!r}")
    if not lo <= ch <= hi:
        raise InvalidInputError(f"ITU channel {ch} outside valid range {lo}..{hi}")
    return int(ch)


def channel_to_frequency(ch: int, valid: tuple[int, int] | None = None) -> float:
    """Centre frequency of ITU channel ``ch`` in Hz."""
    ch = _check_channel(ch, valid)
    return GRID_ORIGIN_HZ + ch * GRID_SPACING_HZ


def frequency_to_channel(f_hz: float, valid: tuple[int, int] | None = None,
                         tol_hz: float = 1e6) -> int:
    """Inverse of :func:`channel_to_frequency`; ``f_hz`` must lie on the grid."""
    n = (f_hz - GRID_ORIGIN_HZ) / GRID_SPACING_HZ
    ch = round(n)
    if abs(n - ch) * GRID_SPACING_HZ > tol_hz:
        raise InvalidInputError(f"{f_hz} Hz is not on the 100 GHz grid")
    return _check_channel(ch, valid)


def channel_to_wavelength(ch: int, valid: tuple[int, int] | None = None) -> float:
    """Vacuum wavelength of ITU channel ``ch`` in metres."""
    return C_M_S / channel_to_frequency(ch, valid)


def frequency_shift(ch: int, quantum: int) -> float:
    """Shift ``f(quantum) - f(ch)`` in Hz, the sign convention of the channel tables."""
    return channel_to_frequency(quantum) - channel_to_frequency(ch)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def dbm_to_watts(p_dbm):
    """``1 mW * 10**(p_dbm / 10)``; accepts scalars or arrays."""
    p = np.asarray(p_dbm, dtype=float)
    if np.any(np.isnan(p)):
        raise InvalidInputError("power in dBm is NaN")
    return _out(1e-3 * 10.0 ** (p / 10.0))


def watts_to_dbm(p_w):
    p = np.asarray(p_w, dtype=float)
    if np.any(~(p > 0)):
        raise InvalidInputError("power must be positive to express in dBm")
    return _out(10.0 * np.log10(p / 1e-3))


def db_to_linear(db):
    return _out(10.0 ** (np.asarray(db, dtype=float) / 10.0))


def db_per_km_to_per_km(db_per_km: float) -> float:
    """Attenuation in dB/km to the natural-log coefficient in 1/km."""
    return db_per_km * math.log(10.0) / 10.0


def photon_energy(f_hz):
    """Photon energy ``h f`` in joules."""
    return H_J_S * f_hz
