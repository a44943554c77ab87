"""Sweeps over distance, launch power and filter bandwidth.

A :class:`Scenario` bundles everything needed to evaluate the key rate at a
given fibre length: the channel plan, the QKD system, the receiver seen by the
Raman photons, the fibre and the classical modulation format. Raman noise is
recomputed at every length.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import grid
from .errors import AmbiguousRootError, InvalidInputError
from .qkd import KeyRatePoint, ModulationFormat, QkdSystemParams, key_rate_terms
from .raman import (ChannelPlan, DetectionParams, FiberParams, RamanSlopes, default_slopes,
                    srs_counts_multi)

SWEEP_VARIABLES = ("length_km", "power_dbm", "bandwidth_hz")

DEFAULT_MAX_LENGTH_KM = 200.0
DEFAULT_COARSE_STEP_KM = 1.0
DEFAULT_TOL_KM = 0.01


@dataclass(frozen=True)
class Scenario:
    """``slopes=None`` selects the measured slopes for the plan's direction.

    ``p_srs_override`` replaces the Raman model by a constant per-gate noise
    probability.
    """

    plan: ChannelPlan = field(default_factory=ChannelPlan)
    qkd: QkdSystemParams = field(default_factory=QkdSystemParams)
    detection: DetectionParams = field(default_factory=DetectionParams)
    fiber: FiberParams = field(default_factory=FiberParams)
    slopes: RamanSlopes | None = None
    modulation: ModulationFormat = ModulationFormat.PSK
    p_srs_override: float | None = None

    @property
    def direction(self):
        return self.plan.direction

    @property
    def effective_slopes(self) -> RamanSlopes:
        return self.slopes if self.slopes is not None else default_slopes(self.plan.direction)

    def with_direction(self, direction) -> "Scenario":
        slopes = self.slopes
        if slopes is not None and slopes.direction != direction:
            slopes = replace(slopes, direction=direction)
        return replace(self, plan=self.plan.with_direction(direction), slopes=slopes)

    def with_power_dbm(self, power_dbm: float) -> "Scenario":
        return replace(self, plan=self.plan.with_uniform_power(grid.dbm_to_watts(power_dbm)))

    def with_bandwidth(self, bandwidth_hz: float) -> "Scenario":
        return replace(self, detection=replace(self.detection, filter_bandwidth_hz=bandwidth_hz))

    def with_modulation(self, modulation: ModulationFormat) -> "Scenario":
        return replace(self, modulation=modulation)

    def without_raman(self) -> "Scenario":
        return replace(self, plan=replace(self.plan, data_channels=()))

    def p_srs(self, length_km):
        if self.p_srs_override is not None:
            return np.full_like(np.asarray(length_km, dtype=float), self.p_srs_override) \
                if np.ndim(length_km) else float(self.p_srs_override)
        return srs_counts_multi(self.plan, length_km, self.effective_slopes,
                                self.fiber, self.detection)

    def terms(self, length_km):
        return key_rate_terms(self.qkd, self.modulation.kappa, self.p_srs(length_km), length_km)

    def rate(self, length_km):
        return self.terms(length_km)[3]

    def point(self, length_km: float) -> KeyRatePoint:
        q, e, y0, r, sat = self.terms(float(length_km))
        return KeyRatePoint(float(length_km), float(q), float(e), float(y0), float(r), bool(sat))


class MaxDistance(NamedTuple):
    length_km: float
    flag: str  # "ok", "infeasible" (R(0) <= 0) or "beyond_range"


def max_distance(scenario: Scenario, l_max_km: float = DEFAULT_MAX_LENGTH_KM,
                 coarse_step_km: float = DEFAULT_COARSE_STEP_KM,
                 tol_km: float = DEFAULT_TOL_KM) -> MaxDistance:
    """Largest length with a positive key rate.

    A coarse scan brackets the single + to - sign change, then bisection
    narrows it to ``tol_km``. The returned length always has R > 0. More than
    one sign change on the coarse grid raises :class:`AmbiguousRootError`.
    """
    if not (coarse_step_km > 0 and tol_km > 0 and l_max_km > 0):
        raise InvalidInputError("scan range, step and tolerance must be positive")
    n = int(math.floor(l_max_km / coarse_step_km + 1e-9))
    coarse = coarse_step_km * np.arange(n + 1)
    positive = scenario.rate(coarse) > 0
    changes = np.count_nonzero(positive[1:] != positive[:-1])
    if changes > 1 or (changes == 1 and not positive[0]):
        where = coarse[1:][positive[1:] != positive[:-1]]
        raise AmbiguousRootError(
            f"key rate changes sign {changes} times (near {', '.join(f'{x:g}' for x in where)} km)")
    if not positive[0]:
        return MaxDistance(0.0, "infeasible")
    if changes == 0:
        return MaxDistance(float(coarse[-1]), "beyond_range")
    idx = int(np.argmin(positive))
    lo, hi = float(coarse[idx - 1]), float(coarse[idx])
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        if scenario.rate(mid) > 0:
            lo = mid
        else:
            hi = mid
    return MaxDistance(lo, "ok")


def grid_values(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid ``start, start+step, ..., <= stop``."""
    if not step > 0:
        raise InvalidInputError("step must be positive")
    if start > stop:
        raise InvalidInputError("start must not exceed stop")
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidInputError(f"unknown sweep variable {self.variable!r}")
        grid_values(self.start, self.stop, self.step)

    @property
    def values(self) -> np.ndarray:
        return grid_values(self.start, self.stop, self.step)


@dataclass
class SweepResult:
    variable: str
    abscissa: np.ndarray
    columns: dict[str, list]
    metadata: dict

    def __len__(self):
        return len(self.abscissa)

    def rows(self):
        names = list(self.columns)
        for i, x in enumerate(self.abscissa):
            yield (float(x), *(self.columns[n][i] for n in names))


def _map(fn, items, workers):
    if workers is None or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def keyrate_curve(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Key rate, gain, QBER and vacuum yield along a length grid."""
    if spec.variable != "length_km":
        raise InvalidInputError("keyrate_curve sweeps length_km")
    xs = spec.values
    points = _map(spec.scenario.point, [float(x) for x in xs], workers)
    cols = {name: [getattr(p, name) for p in points] for name in ("q", "e", "y0", "r")}
    cols["saturated"] = [p.saturated for p in points]
    return SweepResult(spec.variable, xs, cols, describe(spec))


def max_distance_vs_power(scenario: Scenario, powers_dbm, workers: int | None = None,
                          **kwargs) -> SweepResult:
    """Maximum distance with every channel set to each launch power in turn."""
    xs = np.asarray(powers_dbm, dtype=float)
    found = _map(lambda p: max_distance(scenario.with_power_dbm(p), **kwargs),
                 [float(x) for x in xs], workers)
    return SweepResult("power_dbm", xs,
                       {"max_distance_km": [m.length_km for m in found],
                        "flag": [m.flag for m in found]},
                       {"scenario": scenario_dict(scenario), **kwargs})


def max_distance_vs_bandwidth(scenario: Scenario, bandwidths_hz, workers: int | None = None,
                              **kwargs) -> SweepResult:
    xs = np.asarray(bandwidths_hz, dtype=float)
    found = _map(lambda b: max_distance(scenario.with_bandwidth(b), **kwargs),
                 [float(x) for x in xs], workers)
    return SweepResult("bandwidth_hz", xs,
                       {"max_distance_km": [m.length_km for m in found],
                        "flag": [m.flag for m in found]},
                       {"scenario": scenario_dict(scenario), **kwargs})


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    if spec.variable == "length_km":
        return keyrate_curve(spec, workers)
    if spec.variable == "power_dbm":
        res = max_distance_vs_power(spec.scenario, spec.values, workers)
    else:
        res = max_distance_vs_bandwidth(spec.scenario, spec.values, workers)
    res.metadata = describe(spec)
    return res


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.name
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def scenario_dict(scenario: Scenario) -> dict:
    d = _plain(scenario)
    d["slopes"] = _plain(scenario.effective_slopes)
    return d


def describe(spec: SweepSpec) -> dict:
    return {"variable": spec.variable, "start": spec.start, "stop": spec.stop,
            "step": spec.step, "scenario": scenario_dict(spec.scenario)}
