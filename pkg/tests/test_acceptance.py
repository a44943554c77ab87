"""Acceptance criteria, one test per criterion or sub-criterion.

Each test prints a single PASS/FAIL line; the lines are also collected in an
"acceptance criteria" section at the end of the pytest run.
"""

import io
import itertools
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from ramanqkd import cli, csvio, grid, qkd
from ramanqkd.calib import fit_slopes, synthesize_records
from ramanqkd.fwm import (DispersionParams, NonlinearParams, delta_k, fwm_efficiency,
                          fwm_negligible, nonlinear_gamma)
from ramanqkd.plans import PRESET_NAMES, preset
from ramanqkd.qkd import ModulationFormat, QkdSystemParams
from ramanqkd.raman import (MEASURED_SLOPES, ChannelPlan, DetectionParams, FiberParams, srs_counts_multi,
                            srs_counts_single)
from ramanqkd.scan import Scenario, max_distance

F_Q = grid.channel_to_frequency(39)


# 1 ---------------------------------------------------------------------------

def test_c1_kernel_matches_quadrature(verdict):
    rng = np.random.default_rng(1)
    det = DetectionParams()
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        p0 = 10 ** rng.uniform(-5, -2)
        beta = 10 ** rng.uniform(-12, -10)
        alpha = rng.uniform(0.03, 0.08)
        z = rng.uniform(0.5, 150.0)
        fiber = FiberParams(alpha)
        scale = det.eta * det.tau_s / grid.photon_energy(F_Q)
        for direction in ("co", "counter"):
            if direction == "co":
                f = lambda x: beta * p0 * math.exp(-alpha * x) * math.exp(-alpha * (z - x))
            else:
                f = lambda x: beta * p0 * math.exp(-2 * alpha * x)
            ref = quad(f, 0.0, z, epsabs=0.0, epsrel=1e-13, limit=200)[0] * scale
            got = srs_counts_single(direction, p0, z, beta, fiber, det, F_Q)
            worst = max(worst, abs(got - ref) / ref)
    elapsed = time.perf_counter() - t0
    verdict("1 closed-form counts vs quadrature (rel < 1e-9, < 1 s)",
            worst < 1e-9 and elapsed < 1.0, f"max rel err {worst:.2e}, {elapsed:.3f} s")


# 2 ---------------------------------------------------------------------------

def test_c2_linearity(verdict, fiber, det):
    z = np.array([5.0, 25.0, 60.0])
    ok = True
    worst = 0.0
    for direction in ("co", "counter"):
        base = preset("G", -10.5, direction)
        ref = srs_counts_multi(base, z, MEASURED_SLOPES[direction], fiber, det)
        for k in (0.5, 2.0, 10.0):
            got = srs_counts_multi(base.scaled(k), z, MEASURED_SLOPES[direction], fiber, det)
            err = np.max(np.abs(got - k * ref) / (k * ref))
            worst = max(worst, err)
            ok &= err < 8 * np.finfo(float).eps
    powers = np.logspace(-6, -1, 21)
    counts = [float(srs_counts_multi(preset("D", direction="co").with_uniform_power(p), 30.0,
                                     MEASURED_SLOPES["co"], fiber, det)) for p in powers]
    slope = np.polyfit(np.log(powers), np.log(counts), 1)[0]
    ok &= abs(slope - 1.0) <= 1e-6
    verdict("2 counts linear in launch power (k in 0.5, 2, 10; log-log slope 1 +/- 1e-6)",
            bool(ok), f"max rel dev {worst:.1e}, slope {slope:.9f}")


# 3 ---------------------------------------------------------------------------

CAL_DET = DetectionParams(eta=cli.CALIB_ETA, tau_s=2.5e-9, filter_bandwidth_hz=10e9)
CAL_LENGTHS = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0]


def test_c3_fit_round_trip(verdict):
    fiber = FiberParams()
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    noiseless_err = 0.0
    covered = {}
    for direction in ("co", "counter"):
        truth = MEASURED_SLOPES[direction]
        plans = [preset(n, cli.CALIB_POWER_DBM, direction) for n in PRESET_NAMES]
        recs = synthesize_records(plans, CAL_LENGTHS, truth, CAL_DET, fiber, p_dark=cli.CALIB_DARK)
        fit = fit_slopes(recs, CAL_DET, fiber, p_dark_background=cli.CALIB_DARK)
        noiseless_err = max(noiseless_err, abs(fit.s_hat / truth.s - 1), abs(fit.a_hat / truth.a - 1))
        hits = 0
        for _ in range(100):
            noisy = synthesize_records(plans, CAL_LENGTHS, truth, CAL_DET, fiber,
                                       p_dark=cli.CALIB_DARK, n_gates=20_000_000, rng=rng)
            f = fit_slopes(noisy, CAL_DET, fiber, p_dark_background=cli.CALIB_DARK)
            hits += (abs(f.s_hat - truth.s) < 3 * f.s_sigma) and (abs(f.a_hat - truth.a) < 3 * f.a_sigma)
        covered[direction] = hits
    elapsed = time.perf_counter() - t0
    ok = noiseless_err < 1e-3 and min(covered.values()) >= 99 and elapsed < 30
    verdict("3 slope fit round trip (noiseless < 0.1%, >= 99/100 within 3 sigma, < 30 s)", ok,
            f"noiseless rel err {noiseless_err:.1e}, co {covered['co']}/100, "
            f"counter {covered['counter']}/100, {elapsed:.1f} s")


# 4 ---------------------------------------------------------------------------

FWM_DISP = DispersionParams.from_engineering(16.0)
FWM_ALPHA = grid.db_per_km_to_per_km(0.2) / 1e3
FWM_L = 7.5e3


def test_c4a_fwm_suppression_ratio(verdict):
    f = [grid.channel_to_frequency(c) for c in (37, 38, 39)]
    dk = delta_k(FWM_DISP, *f)
    ratio = fwm_efficiency(FWM_ALPHA, dk, FWM_L) / fwm_efficiency(FWM_ALPHA, 0.0, FWM_L)
    ok = 2.2e-6 <= ratio <= 2.2e-4
    verdict("4a FWM suppression ratio within one decade of 2.2e-5", ok,
            f"dk {dk:.4e} 1/m, ratio {ratio:.3e}")


def test_c4b_fwm_phase_matched_unity(verdict):
    vals = [fwm_efficiency(a, 0.0, L) for a in (FWM_ALPHA, 1e-5, 1e-4) for L in (1e3, FWM_L, 8e4)]
    verdict("4b FWM efficiency at dk = 0 equals 1 exactly", all(v == 1.0 for v in vals),
            f"values {sorted(set(vals))}")


def test_c4c_fwm_negligible_60km(verdict):
    gamma = nonlinear_gamma(NonlinearParams(), F_Q)
    negligible, margin = fwm_negligible(gamma, 1e-3, 60e3)
    verdict("4c gamma*P0*L < 0.1 for 1 mW over 60 km", negligible,
            f"gamma {gamma:.4e} 1/(W m), product {0.1 - margin:.4f}")


# 5 ---------------------------------------------------------------------------

def test_c5_decoy_identities(verdict):
    rng = np.random.default_rng(5)
    worst_series = worst_qe = 0.0
    for _ in range(200):
        y0 = 10 ** rng.uniform(-8, -2)
        eta = 10 ** rng.uniform(-5, -0.5)
        mu = rng.uniform(0.05, 1.0)
        g = rng.uniform(0.0, 0.1)
        series = math.fsum(qkd.yield_n(y0, eta, n) * math.exp(-mu) * mu**n / math.factorial(n)
                           for n in range(61))
        q = qkd.gain(y0, eta, mu)
        worst_series = max(worst_series, abs(q - series) / series)
        lhs = q * qkd.qber(y0, eta, mu, g)
        rhs = 0.5 * y0 - g * math.expm1(-mu * eta)
        worst_qe = max(worst_qe, abs(lhs - rhs) / rhs)
    h = (qkd.binary_entropy(0.5), qkd.binary_entropy(0.0))
    ok = worst_series < 1e-12 and worst_qe < 1e-15 and h == (1.0, 0.0)
    verdict("5 decoy identities (Poisson series 1e-12, Q*E 1e-15, H2 landmarks)", ok,
            f"series {worst_series:.1e}, Q*E {worst_qe:.1e}, H2 {h}")


# 6 ---------------------------------------------------------------------------

DIRECTIONS = ("co", "counter")
BANDWIDTHS_GHZ = (1.0, 10.0, 100.0)
MODULATIONS = (ModulationFormat.PSK, ModulationFormat.OOK_RZ)
POWERS_DBM = tuple(float(p) for p in range(-10, 1))


@pytest.fixture(scope="module")
def surface():
    t0 = time.perf_counter()
    out = {}
    for d, bw, mod, p in itertools.product(DIRECTIONS, BANDWIDTHS_GHZ, MODULATIONS, POWERS_DBM):
        for name in PRESET_NAMES + ("none",):
            sc = Scenario(preset(name, p, d), qkd=QkdSystemParams(),
                          detection=DetectionParams(filter_bandwidth_hz=bw * 1e9), modulation=mod)
            out[name, d, bw, mod, p] = max_distance(sc).length_km
    return out, time.perf_counter() - t0


def _keys():
    return itertools.product(DIRECTIONS, BANDWIDTHS_GHZ, MODULATIONS, POWERS_DBM)


def test_c6a_configs_ordered(verdict, surface):
    md, elapsed = surface
    bad = [(a, b, *k) for k in _keys() for a, b in zip(PRESET_NAMES, PRESET_NAMES[1:])
           if not md[(a, *k)] > md[(b, *k)]]
    verdict("6a max distance strictly decreases A -> G", not bad and elapsed < 60,
            f"{len(bad)} violations, grid {elapsed:.1f} s")


def test_c6b_filter_ordered(verdict, surface):
    md, _ = surface
    bad = [(n, d, m, p) for n in PRESET_NAMES for d, m, p in itertools.product(DIRECTIONS, MODULATIONS, POWERS_DBM)
           if not md[n, d, 1.0, m, p] > md[n, d, 10.0, m, p] > md[n, d, 100.0, m, p]]
    verdict("6b 1 GHz > 10 GHz > 100 GHz filter", not bad, f"{len(bad)} violations")


def test_c6c_ook_not_worse(verdict, surface):
    md, _ = surface
    bad = [(n, d, bw, p) for n in PRESET_NAMES for d, bw, p in itertools.product(DIRECTIONS, BANDWIDTHS_GHZ, POWERS_DBM)
           if not md[n, d, bw, ModulationFormat.OOK_RZ, p] >= md[n, d, bw, ModulationFormat.PSK, p]]
    verdict("6c OOK-RZ >= PSK for every populated plan", not bad, f"{len(bad)} violations")


def test_c6d_co_not_worse(verdict, surface):
    md, _ = surface
    bad = [(n, bw, m.name, p) for n in PRESET_NAMES
           for bw, m, p in itertools.product(BANDWIDTHS_GHZ, MODULATIONS, POWERS_DBM)
           if not md[n, "co", bw, m, p] >= md[n, "counter", bw, m, p]]
    example = ""
    if bad:
        n, bw, m, p = bad[0]
        mod = ModulationFormat[m]
        example = (f"; e.g. {n} {bw:g} GHz {m} {p:g} dBm: co {md[n, 'co', bw, mod, p]:.2f} km"
                   f" < counter {md[n, 'counter', bw, mod, p]:.2f} km")
    total = len(PRESET_NAMES) * len(BANDWIDTHS_GHZ) * len(MODULATIONS) * len(POWERS_DBM)
    verdict("6d co >= counter for every populated plan", not bad,
            f"{len(bad)}/{total} violations{example}")


def test_c6e_baseline_dominates(verdict, surface):
    md, _ = surface
    bad = [(n, *k) for n in PRESET_NAMES for k in _keys() if not md[("none", *k)] > md[(n, *k)]]
    verdict("6e no-Raman baseline beats every populated plan", not bad,
            f"{len(bad)} violations, baseline {md['none', 'co', 10.0, ModulationFormat.PSK, 0.0]:.2f} km")


def test_c6f_power_monotone(verdict, surface):
    md, _ = surface
    bad = [(n, d, bw, m) for n in PRESET_NAMES
           for d, bw, m in itertools.product(DIRECTIONS, BANDWIDTHS_GHZ, MODULATIONS)
           if np.any(np.diff([md[n, d, bw, m, p] for p in POWERS_DBM]) > 0)]
    verdict("6f max distance non-increasing in power over -10..0 dBm", not bad,
            f"{len(bad)} violations")


# 7 ---------------------------------------------------------------------------

def _dense_root(sc, step=0.1, l_max=200.0):
    L = np.round(np.arange(0.0, l_max + step / 2, step), 10)
    r = sc.rate(L)
    pos = np.nonzero(r > 0)[0]
    if len(pos) == 0:
        return 0.0
    i = pos[-1]
    if i == len(L) - 1:
        return float(L[-1])
    return float(L[i] + step * r[i] / (r[i] - r[i + 1]))


def test_c7_bisection_matches_dense_grid(verdict):
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(20):
        chans = sorted(rng.choice([c for c in range(25, 54) if c != 39], size=rng.integers(1, 9),
                                  replace=False).tolist())
        direction = str(rng.choice(DIRECTIONS))
        plan = ChannelPlan(39, tuple((int(c), grid.dbm_to_watts(rng.uniform(-15, 3))) for c in chans),
                           direction)
        sc = Scenario(plan, qkd=QkdSystemParams(mu=rng.uniform(0.3, 0.7)),
                      detection=DetectionParams(filter_bandwidth_hz=10 ** rng.uniform(9, 11)),
                      modulation=MODULATIONS[rng.integers(2)])
        worst = max(worst, abs(max_distance(sc).length_km - _dense_root(sc)))
    verdict("7 bisection vs dense 0.1 km scan within 0.02 km (20 configs)", worst <= 0.02,
            f"max deviation {worst:.4f} km")


# 8 ---------------------------------------------------------------------------

def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, stdout=out, stderr=err)
    assert code == 0, err.getvalue()
    return out.getvalue()


def test_c8_determinism(verdict, tmp_path):
    recs = synthesize_records([preset(n, cli.CALIB_POWER_DBM, "co") for n in PRESET_NAMES],
                              CAL_LENGTHS, MEASURED_SLOPES["co"], CAL_DET, FiberParams(),
                              p_dark=cli.CALIB_DARK, rng=np.random.default_rng(3))
    rec_path = tmp_path / "records.csv"
    rec_path.write_text(csvio.write_count_records(recs), encoding="utf-8")
    cases = {
        "noise": [["noise", "--plan", "G", "--direction", "counter"]] * 2,
        "keyrate": [["keyrate", "--plan", "D", "--workers", w] for w in ("1", "4")],
        "maxdist": [["maxdist", "--plan", "C", "--bandwidth-ghz", "1,10,100", "--workers", w]
                    for w in ("1", "4")],
        "fit": [["fit", "--records", str(rec_path), "--per-length"]] * 2,
        "fwm": [["fwm", "--channels", "37,38,39"]] * 2,
    }
    differing = [name for name, (a, b) in cases.items() if _run(a) != _run(b)]
    verdict("8 byte-identical CSV on rerun and across worker counts", not differing,
            f"subcommands checked: {', '.join(cases)}; differing: {differing or 'none'}")
