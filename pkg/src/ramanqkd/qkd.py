"""Decoy-state BB84 key rate in the infinite-decoy limit.

Weak coherent source with Poisson photon statistics, two threshold detectors,
and a vacuum yield made of dark counts plus Raman noise weighted by the
duty-cycle factor of the classical modulation format. Rates are in secure
bits per signal interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, UndefinedQberError


class ModulationFormat(Enum):
    """Classical traffic format; the value is the duty-cycle factor kappa."""

    PSK = 1.0
    OOK_RZ = 0.25

    @property
    def kappa(self) -> float:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "ModulationFormat":
        key = name.strip().upper().replace("-", "_")
        if key in ("OOK", "OOKRZ"):
            key = "OOK_RZ"
        try:
            return cls[key]
        except KeyError:
            raise InvalidInputError(f"unknown modulation format {name!r}") from None


@dataclass(frozen=True)
class ErrorCorrection:
    """Error-correction inefficiency f(E).

    Piecewise-linear in E over ``table`` (pairs of ``(qber, f)``, clamped at
    the ends) when given, otherwise the constant ``fallback``. Neither is an
    authoritative reproduction of any published reconciliation code.
    """

    table: tuple[tuple[float, float], ...] | None = None
    fallback: float = 1.22

    def __post_init__(self):
        if self.table is not None:
            tbl = tuple(sorted((float(e), float(f)) for e, f in self.table))
            if len(tbl) < 2:
                raise InvalidInputError("f(E) table needs at least two points")
            if any(f < 1 for _, f in tbl):
                raise InvalidInputError("f(E) values below 1 beat the Shannon limit")
            object.__setattr__(self, "table", tbl)
        elif self.fallback < 1:
            raise InvalidInputError("f(E) below 1 beats the Shannon limit")

    def __call__(self, e):
        if self.table is None:
            return np.full_like(np.asarray(e, dtype=float), self.fallback) if np.ndim(e) \
                else self.fallback
        xs, ys = zip(*self.table)
        out = np.interp(e, xs, ys)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class QkdSystemParams:
    mu: float = 0.50
    eta_bob: float = 0.045
    eta_spd: float = 1.0
    p_dark: float = 0.85e-6
    misalignment: float = 0.033
    alpha_per_km: float = 0.0484
    ec: ErrorCorrection = field(default_factory=ErrorCorrection)

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidInputError("mean photon number must be positive")
        for name in ("eta_bob", "eta_spd"):
            if not 0 < getattr(self, name) <= 1:
                raise InvalidInputError(f"{name} must lie in (0, 1]")
        if not 0 <= self.misalignment < 0.5:
            raise InvalidInputError("misalignment must lie in [0, 0.5)")
        if not 0 <= self.p_dark < 1:
            raise InvalidInputError("dark-count probability must lie in [0, 1)")
        if not self.alpha_per_km >= 0:
            raise InvalidInputError("attenuation must be non-negative")

    @property
    def detection_efficiency(self) -> float:
        return self.eta_bob * self.eta_spd


class KeyRatePoint(NamedTuple):
    length_km: float
    q: float
    e: float
    y0: float
    r: float
    saturated: bool = False


def transmittance(params: QkdSystemParams, length_km):
    """Overall transmittance from Alice's output to a click at Bob."""
    length = np.asarray(length_km, dtype=float)
    if np.any(length < 0):
        raise InvalidInputError("length must be non-negative")
    out = np.exp(-params.alpha_per_km * length) * params.detection_efficiency
    return float(out) if out.ndim == 0 else out


def vacuum_yield(p_dark, kappa, p_srs):
    """Two detectors' dark counts plus duty-cycle-weighted Raman noise."""
    return 2.0 * p_dark + kappa * p_srs


def yield_n(y0, eta, n: int):
    """Yield of an ``n``-photon state."""
    if n < 0:
        raise InvalidInputError("photon number must be non-negative")
    if n == 0:
        return y0
    with np.errstate(divide="ignore"):  # eta == 1 gives log1p(-1) = -inf, which is fine
        return y0 - np.expm1(n * np.log1p(-eta))


def gain(y0, eta, mu):
    """Overall gain of a Poissonian source of mean ``mu``."""
    return y0 - np.expm1(-mu * eta)


def qber(y0, eta, mu, misalignment):
    q = gain(y0, eta, mu)
    if np.any(np.asarray(q) <= 0):
        raise UndefinedQberError("overall gain is zero; QBER undefined")
    return (0.5 * y0 - misalignment * np.expm1(-mu * eta)) / q


def binary_entropy(x):
    """Shannon binary entropy in bits, with ``H2(0) = H2(1) = 0``."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise InvalidInputError("binary entropy argument must lie in [0, 1]")
    inner = (x > 0) & (x < 1)
    xs = np.where(inner, x, 0.5)
    h = np.where(inner, -xs * np.log2(xs) - (1.0 - xs) * np.log2(1.0 - xs), 0.0)
    return float(h) if h.ndim == 0 else h


def key_rate_terms(params: QkdSystemParams, kappa: float, p_srs, length_km):
    """Vectorised evaluation; returns ``(q, e, y0, r, saturated)`` arrays."""
    eta, p_srs = np.broadcast_arrays(np.asarray(transmittance(params, length_km)),
                                     np.asarray(p_srs, dtype=float))
    y0 = vacuum_yield(params.p_dark, kappa, p_srs)
    q = gain(y0, eta, params.mu)
    e = qber(y0, eta, params.mu, params.misalignment)
    y1 = yield_n(y0, eta, 1)
    q1 = y1 * params.mu * math.exp(-params.mu)
    e1 = (0.5 * y0 + params.misalignment * eta) / y1
    e_clip = np.clip(e, 0.0, 1.0)
    r = 0.5 * (q1 * (1.0 - binary_entropy(np.clip(e1, 0.0, 1.0)))
               - q * params.ec(e_clip) * binary_entropy(e_clip))
    saturated = e > 0.5
    r = np.where(saturated, np.minimum(r, 0.0), r)
    return q, e, y0, r, saturated


def secure_key_rate(params: QkdSystemParams, modulation: ModulationFormat, p_srs: float,
                    length_km: float) -> KeyRatePoint:
    """Lower bound on the secure key rate at one distance.

    Negative rates are returned unclamped. When the QBER exceeds 1/2 the rate
    is forced non-positive and ``saturated`` is set.
    """
    if length_km < 0:
        raise InvalidInputError("length must be non-negative")
    q, e, y0, r, sat = key_rate_terms(params, modulation.kappa, p_srs, length_km)
    return KeyRatePoint(float(length_km), float(q), float(e), float(y0), float(r), bool(sat))
