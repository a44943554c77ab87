"""Raman noise, four-wave mixing and decoy-state key rates for QKD sharing a
fibre with DWDM telecom channels."""

from .errors import (AmbiguousRootError, ConfigError, IdentifiabilityError, InvalidInputError,
                     NumericalError, UndefinedQberError)
from .grid import channel_to_frequency, dbm_to_watts, photon_energy
from .plans import PRESETS, parse_plan, preset
from .qkd import ErrorCorrection, KeyRatePoint, ModulationFormat, QkdSystemParams, secure_key_rate
from .raman import (MEASURED_SLOPES, ChannelPlan, DetectionParams, FiberParams, RamanSlopes,
                    srs_counts_multi, srs_counts_single)
from .scan import Scenario, SweepSpec, keyrate_curve, max_distance, max_distance_vs_power

__version__ = "0.1.0"
