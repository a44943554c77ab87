"""Extract Raman slopes from photon-counting data by linear least squares.

Each record is a count probability per gate measured for one channel plan at
one fibre length. Because the counts are linear in the two slopes, the fit is
a weighted linear least-squares problem

    counts - dark = s * X_s + a * X_a

where ``X_s`` (``X_a``) is the propagation kernel times the separation- and
power-weighted sum over the channels below (above) the quantum channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import grid
from .errors import IdentifiabilityError, InvalidInputError
from .raman import (ChannelPlan, DetectionParams, FiberParams, RamanSlopes, propagation_kernel,
                    srs_counts_multi)

EPS_COUNTS = 1e-12


@dataclass(frozen=True)
class CountRecord:
    plan: ChannelPlan
    z_km: float
    counts_per_gate: float
    n_gates: int = 1

    def __post_init__(self):
        if not self.counts_per_gate >= 0:
            raise InvalidInputError("counts per gate must be non-negative")
        if not self.z_km >= 0:
            raise InvalidInputError("fibre length must be non-negative")
        if not self.n_gates >= 1:
            raise InvalidInputError("n_gates must be at least 1")


@dataclass(frozen=True)
class FitResult:
    s_hat: float
    a_hat: float
    s_sigma: float
    a_sigma: float
    residual_norm: float
    dark_hat: float | None = None
    dark_sigma: float | None = None
    n_records: int = 0

    def slopes(self, direction, ref_bandwidth_hz: float = 10e9) -> RamanSlopes:
        return RamanSlopes(s=self.s_hat, a=self.a_hat, direction=direction,
                           ref_bandwidth_hz=ref_bandwidth_hz,
                           s_sigma=self.s_sigma, a_sigma=self.a_sigma)


def design_row(plan: ChannelPlan, z_km: float, det: DetectionParams, fiber: FiberParams,
               ref_bandwidth_hz: float = 10e9) -> tuple[float, float]:
    """Counts per unit slope, ``(X_s, X_a)``, for one plan and length."""
    q = plan.quantum_channel
    below = sum((q - ch) * p for ch, p in plan.data_channels if ch < q)
    above = sum((ch - q) * p for ch, p in plan.data_channels if ch > q)
    scale = (propagation_kernel(plan.direction, z_km, fiber.alpha_mean_per_km)
             * det.filter_bandwidth_hz / ref_bandwidth_hz
             * det.eta * det.tau_s / grid.photon_energy(grid.channel_to_frequency(q))
             * fiber.excess_factor)
    return below * scale, above * scale


def _record_key(r: CountRecord):
    return (r.z_km, r.plan.quantum_channel, r.plan.data_channels, r.counts_per_gate, r.n_gates)


def fit_slopes(records: Iterable[CountRecord], det: DetectionParams, fiber: FiberParams,
               p_dark_background: float = 0.0, weighting: str = "poisson",
               fit_intercept: bool = False, ref_bandwidth_hz: float = 10e9) -> FitResult:
    """Jointly fit the Stokes and anti-Stokes slopes to ``records``.

    ``weighting="poisson"`` weights each record by ``n_gates / counts`` (the
    inverse variance of a Poisson count probability) and reports absolute
    standard errors; ``"ols"`` is unweighted with errors scaled by the
    residual variance. With ``fit_intercept`` the dark level is a third free
    parameter and ``p_dark_background`` is ignored.
    """
    recs = sorted(records, key=_record_key)
    if len({r.z_km for r in recs}) < 2:
        raise InvalidInputError("records must span at least two fibre lengths")
    return _fit(recs, det, fiber, p_dark_background, weighting, fit_intercept, ref_bandwidth_hz)


def _fit(recs, det, fiber, p_dark_background, weighting, fit_intercept, ref_bandwidth_hz):
    if not recs:
        raise InvalidInputError("no records to fit")
    directions = {r.plan.direction for r in recs}
    if len(directions) > 1:
        raise InvalidInputError("records mix co- and counter-propagating data")
    if weighting not in ("poisson", "ols"):
        raise InvalidInputError(f"unknown weighting {weighting!r}")

    X = np.array([design_row(r.plan, r.z_km, det, fiber, ref_bandwidth_hz) for r in recs])
    y = np.array([r.counts_per_gate for r in recs])
    if weighting == "poisson":
        w = np.array([r.n_gates for r in recs]) / np.maximum(y, EPS_COUNTS)
    else:
        w = np.ones_like(y)

    missing = [name for name, col in zip("sa", X.T) if not np.any(col > 0)]
    if len(missing) == 2:
        raise IdentifiabilityError("no populated data channels in any record", "s,a")
    if missing:
        keep = 0 if missing[0] == "a" else 1
        sub = _solve(X[:, [keep]], y, w, p_dark_background, fit_intercept, weighting)
        side = "above" if missing[0] == "a" else "below"
        raise IdentifiabilityError(
            f"slope {missing[0]!r} is unidentifiable: no data channel {side} the quantum channel",
            missing[0], partial={"sa"[keep] + "_hat": sub[0][0], "sa"[keep] + "_sigma": sub[1][0]})

    beta, sig, rnorm = _solve(X, y, w, p_dark_background, fit_intercept, weighting)
    return FitResult(s_hat=beta[0], a_hat=beta[1], s_sigma=sig[0], a_sigma=sig[1],
                     residual_norm=rnorm,
                     dark_hat=beta[2] if fit_intercept else None,
                     dark_sigma=sig[2] if fit_intercept else None,
                     n_records=len(recs))


def _solve(X, y, w, dark, fit_intercept, weighting):
    if fit_intercept:
        X = np.column_stack([X, np.ones(len(y))])
        target = y
    else:
        target = y - dark
    # Columns differ by many orders of magnitude; normalise before solving.
    norms = np.linalg.norm(X, axis=0)
    sw = np.sqrt(w)
    A = X / norms * sw[:, None]
    b = target * sw
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise IdentifiabilityError("design matrix is rank deficient", "s,a")
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = b - A @ coef
    cov = np.linalg.inv(A.T @ A)
    if weighting == "ols":
        dof = max(len(y) - A.shape[1], 1)
        cov = cov * (resid @ resid) / dof
    beta = coef / norms
    sig = np.sqrt(np.diag(cov)) / norms
    rnorm = float(np.linalg.norm(resid) / np.linalg.norm(b)) if np.any(b) else 0.0
    return [float(v) for v in beta], [float(v) for v in sig], rnorm


def fit_slopes_by_length(records: Iterable[CountRecord], det: DetectionParams,
                         fiber: FiberParams, p_dark_background: float = 0.0,
                         weighting: str = "poisson",
                         ref_bandwidth_hz: float = 10e9) -> dict[float, FitResult]:
    """Separate fits per fibre length, each across all channel plans.

    A single plan cannot separate the two slopes (its below/above mix is the
    same at every length), so the spread between independent fits is taken
    over fibre spools instead.
    """
    groups: dict[float, list[CountRecord]] = {}
    for r in records:
        groups.setdefault(r.z_km, []).append(r)
    return {z: _fit(sorted(rs, key=_record_key), det, fiber, p_dark_background, weighting,
                    False, ref_bandwidth_hz)
            for z, rs in sorted(groups.items()) if z > 0}


def spread(fits: dict) -> dict[str, tuple[float, float]]:
    """Mean and sample standard deviation of the slopes of several fits."""
    s = np.array([f.s_hat for f in fits.values()])
    a = np.array([f.a_hat for f in fits.values()])
    ddof = 1 if len(s) > 1 else 0
    return {"s": (float(s.mean()), float(s.std(ddof=ddof))),
            "a": (float(a.mean()), float(a.std(ddof=ddof)))}


def synthesize_records(plans: Sequence[ChannelPlan], lengths_km: Sequence[float],
                       slopes: RamanSlopes, det: DetectionParams, fiber: FiberParams,
                       p_dark: float = 0.0, n_gates: int = 20_000_000,
                       rng: np.random.Generator | None = None) -> list[CountRecord]:
    """Count records predicted by the Raman model, Poisson-resampled when ``rng`` is given."""
    out = []
    for plan in plans:
        for z in lengths_km:
            p = p_dark + float(srs_counts_multi(plan, z, slopes, fiber, det))
            if rng is not None:
                p = rng.poisson(p * n_gates) / n_gates
            out.append(CountRecord(plan, float(z), p, n_gates))
    return out
