"""Four-wave-mixing relevance estimates.

Nonlinear parameter, the ``gamma * P0 * L < 0.1`` negligibility rule, the
propagation-constant mismatch of a channel triple and the resulting
phase-matching efficiency.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import grid
from .errors import InvalidInputError

NEGLIGIBLE_THRESHOLD = 0.1


@dataclass(frozen=True)
class NonlinearParams:
    n2_m2_per_w: float = 2.6e-20
    a_eff_m2: float = 50e-12

    def __post_init__(self):
        if not (self.n2_m2_per_w > 0 and self.a_eff_m2 > 0):
            raise InvalidInputError("n2 and effective area must be positive")


@dataclass(frozen=True)
class DispersionParams:
    """Chromatic dispersion in SI units (s/m^2 and s/m^3).

    Use :meth:`from_engineering` to build from ps/(km nm) and ps/(km nm^2).
    """

    d_c: float = 16e-6
    d_slope: float = 0.0
    lambda_eval_m: float = 1550e-9

    def __post_init__(self):
        if not self.lambda_eval_m > 0:
            raise InvalidInputError("evaluation wavelength must be positive")

    @classmethod
    def from_engineering(cls, d_ps_km_nm: float, slope_ps_km_nm2: float = 0.0,
                         lambda_eval_nm: float = 1550.0) -> "DispersionParams":
        return cls(d_c=d_ps_km_nm * 1e-6, d_slope=slope_ps_km_nm2 * 1e3,
                   lambda_eval_m=lambda_eval_nm * 1e-9)


def nonlinear_gamma(nl: NonlinearParams, f_hz: float) -> float:
    """``n2 * omega / (c * A_eff)`` in 1/(W m)."""
    return nl.n2_m2_per_w * 2.0 * math.pi * f_hz / (grid.C_M_S * nl.a_eff_m2)


def effective_length(alpha_per_m: float, length_m: float) -> float:
    """Nonlinear effective length ``(1 - exp(-alpha L)) / alpha``."""
    return -math.expm1(-alpha_per_m * length_m) / alpha_per_m


def fwm_negligible(gamma: float, p0_w: float, length_m: float) -> tuple[bool, float]:
    """Return ``(gamma*P0*L < 0.1, 0.1 - gamma*P0*L)``."""
    if min(gamma, p0_w, length_m) < 0:
        raise InvalidInputError("gamma, power and length must be non-negative")
    product = gamma * p0_w * length_m
    return product < NEGLIGIBLE_THRESHOLD, NEGLIGIBLE_THRESHOLD - product


def delta_k(disp: DispersionParams, f_i: float, f_j: float, f_k: float) -> float:
    """Propagation-constant mismatch (1/m) of the mixing term ``f_i + f_j - f_k``.

    Uses the geometric-mean spacing ``sqrt(|f_i - f_k| |f_j - f_k|)``, the
    dispersion at ``lambda_k = c / f_k`` and an optional dispersion-slope
    correction.
    """
    if min(f_i, f_j, f_k) <= 0:
        raise InvalidInputError("frequencies must be positive")
    lam = grid.C_M_S / f_k
    df_eq = math.sqrt(abs(f_i - f_k) * abs(f_j - f_k))
    slope_term = lam**2 / (2.0 * grid.C_M_S) * df_eq * disp.d_slope
    return 2.0 * math.pi * lam**2 / grid.C_M_S * df_eq**2 * (disp.d_c + slope_term)


def fwm_efficiency(alpha_per_m: float, dk, length_m: float, strict: bool = False):
    """Phase-matching efficiency relative to perfect phase matching.

    The oscillating term uses ``sin^2(dk L / 2)``; ``strict=True`` uses
    ``sin^2(dk L)`` instead.
    """
    if not (alpha_per_m > 0 and length_m > 0):
        raise InvalidInputError("alpha and length must be positive")
    dk = np.asarray(dk, dtype=float)
    loss = math.exp(-alpha_per_m * length_m)
    phase = dk * length_m if strict else dk * length_m / 2.0
    osc = 4.0 * loss * np.sin(phase) ** 2 / (-math.expm1(-alpha_per_m * length_m)) ** 2
    eta = alpha_per_m**2 / (alpha_per_m**2 + dk**2) * (1.0 + osc)
    return float(eta) if eta.ndim == 0 else eta


@dataclass(frozen=True)
class MixingTerm:
    i: int
    j: int
    k: int
    product: int
    delta_k: float
    efficiency: float


def mixing_products(channels, disp: DispersionParams, alpha_per_m: float, length_m: float,
                    strict: bool = False, target: int | None = None) -> list[MixingTerm]:
    """All distinct products ``i + j - k`` of the given channels landing on the grid.

    Restricted to products equal to ``target`` when it is given. Each
    unordered pump pair ``{i, j}`` is listed once.
    """
    chans = sorted(set(int(c) for c in channels))
    out = []
    for i, j in itertools.combinations_with_replacement(chans, 2):
        for k in chans:
            if k in (i, j):
                continue
            prod = i + j - k
            if target is not None and prod != target:
                continue
            try:
                grid.channel_to_frequency(prod)
            except InvalidInputError:
                continue
            fi, fj, fk = (grid.channel_to_frequency(c) for c in (i, j, k))
            d = delta_k(disp, fi, fj, fk)
            out.append(MixingTerm(i, j, k, prod, d,
                                  fwm_efficiency(alpha_per_m, d, length_m, strict=strict)))
    return out
