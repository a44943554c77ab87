"""Command-line front end.

Subcommands: ``noise``, ``fit``, ``fwm``, ``keyrate`` and ``maxdist``. Each
writes a CSV (to ``--output`` or standard output) whose ``#`` header echoes a
canonical command line that regenerates the file.

Exit codes: 0 success, 2 configuration or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys

from . import calib, csvio, fwm, grid, scan
from .errors import ConfigError, InvalidInputError, NumericalError
from .plans import parse_plan
from .qkd import ErrorCorrection, ModulationFormat, QkdSystemParams
from .raman import DetectionParams, FiberParams, RamanSlopes, default_slopes, srs_counts_multi

PROG = "ramanqkd"

# Measurement conditions of the calibration runs, used as `fit` defaults:
# 15 % detector efficiency behind 8.4 dB of filtering loss, 2.5 ns gates.
CALIB_ETA = 0.15 * 10 ** (-8.4 / 10)
CALIB_GATE_NS = 2.5
CALIB_POWER_DBM = -10.5
CALIB_DARK = 3.6e-5

OVERRIDE_KEYS = {
    "qkd.mu", "qkd.eta_bob", "qkd.eta_spd", "qkd.p_dark", "qkd.misalignment",
    "qkd.alpha_per_km", "qkd.ec_fallback", "qkd.ec_table",
    "detection.eta", "detection.gate_ns", "detection.bandwidth_ghz", "detection.p_dark",
    "fiber.alpha_mean_per_km", "fiber.alpha_q_per_km", "fiber.excess_loss_db",
    "slopes.s_per_km", "slopes.a_per_km", "slopes.ref_bandwidth_ghz",
}


class CliError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: {message}")


def parse_range(text: str) -> list[float]:
    """``"v"``, ``"a,b,c"`` or ``"start:stop:step"`` (inclusive) to a list of floats."""
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            return [float(x) for x in scan.grid_values(*parts)]
        return [float(x) for x in text.split(",")]
    except (ValueError, InvalidInputError):
        raise CliError(f"bad range {text!r}; expected v, a,b,c or start:stop:step") from None


def _float(text, name):
    try:
        v = float(text)
    except ValueError:
        raise CliError(f"{name}: expected a number, got {text!r}") from None
    if math.isnan(v):
        raise CliError(f"{name}: NaN not allowed")
    return v


def parse_overrides(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise CliError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (x.strip() for x in item.split("=", 1))
        if key not in OVERRIDE_KEYS:
            raise CliError(f"unknown parameter {key!r}; known: {', '.join(sorted(OVERRIDE_KEYS))}")
        out[key] = value
    return out


def _ec_table(text):
    pairs = []
    for chunk in text.split(","):
        e, f = chunk.split(":")
        pairs.append((float(e), float(f)))
    return tuple(pairs)


def build_params(args, direction, defaults=None):
    """Resolve ``(qkd, detection, fiber, slopes)`` from flags and ``--set`` overrides."""
    d = {"eta": None, "gate_ns": 1.0, "bandwidth_ghz": 10.0, "p_dark": 0.85e-6}
    d.update(defaults or {})
    ov = parse_overrides(getattr(args, "set", None))

    def get(key, fallback):
        return _float(ov[key], key) if key in ov else fallback

    try:
        ec = ErrorCorrection(
            table=_ec_table(ov["qkd.ec_table"]) if "qkd.ec_table" in ov else None,
            fallback=get("qkd.ec_fallback", 1.22))
        qkd = QkdSystemParams(
            mu=get("qkd.mu", 0.5), eta_bob=get("qkd.eta_bob", 0.045),
            eta_spd=get("qkd.eta_spd", 1.0), p_dark=get("qkd.p_dark", 0.85e-6),
            misalignment=get("qkd.misalignment", 0.033),
            alpha_per_km=get("qkd.alpha_per_km", 0.0484), ec=ec)
        bw = parse_range(args.bandwidth_ghz)[0] if getattr(args, "bandwidth_ghz", None) \
            else d["bandwidth_ghz"]
        gate = _float(args.gate_ns, "--gate-ns") if getattr(args, "gate_ns", None) else d["gate_ns"]
        eta_default = d["eta"] if d["eta"] is not None else qkd.detection_efficiency
        det = DetectionParams(
            eta=get("detection.eta", eta_default),
            tau_s=get("detection.gate_ns", gate) * 1e-9,
            filter_bandwidth_hz=get("detection.bandwidth_ghz", bw) * 1e9,
            p_dark=get("detection.p_dark", d["p_dark"]))
        alpha = get("fiber.alpha_mean_per_km", 0.0484)
        fiber = FiberParams(alpha_mean_per_km=alpha,
                            alpha_q_per_km=get("fiber.alpha_q_per_km", alpha),
                            excess_loss_db=get("fiber.excess_loss_db", 0.0))
        base = default_slopes(direction)
        slopes = RamanSlopes(
            s=get("slopes.s_per_km", base.s), a=get("slopes.a_per_km", base.a),
            direction=direction,
            ref_bandwidth_hz=get("slopes.ref_bandwidth_ghz", base.ref_bandwidth_hz / 1e9) * 1e9,
            s_sigma=0.0 if "slopes.s_per_km" in ov else base.s_sigma,
            a_sigma=0.0 if "slopes.a_per_km" in ov else base.a_sigma)
    except (ValueError, InvalidInputError) as exc:
        raise CliError(str(exc)) from None
    return qkd, det, fiber, slopes


def canonical_command(parser: argparse.ArgumentParser, args, subcommand: str) -> str:
    """Command line with every option spelled out, excluding output routing."""
    parts = [PROG, subcommand]
    for action in parser._actions:
        if not action.option_strings or action.dest in ("help", "output", "workers"):
            continue
        flag = max(action.option_strings, key=len)
        value = getattr(args, action.dest, None)
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                parts.append(flag)
        elif isinstance(action, argparse._AppendAction):
            parts += [f"{flag}={v}" for v in value or ()]
        elif value is not None:
            parts.append(f"{flag}={value}")
    return shlex.join(parts)


def _header(command: str, meta: dict) -> list[str]:
    lines = [f"command: {command}"]
    lines += [f"{k} = {v}" for k, v in csvio.flatten(meta)]
    return lines


def _add_common(p, power_default="0"):
    p.add_argument("--plan", default="D", help="preset A..G, 'none', or a plan file")
    p.add_argument("--direction", choices=("co", "counter"), default="co")
    p.add_argument("--power-dbm", default=power_default, help="launch power per channel")
    p.add_argument("--bandwidth-ghz", default="10", help="quantum-channel filter FWHM")
    p.add_argument("--gate-ns", default="1", help="detection gate length")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a parameter, e.g. qkd.mu=0.4 or fiber.excess_loss_db=1")
    p.add_argument("-o", "--output", help="CSV path (default: standard output)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("noise", help="Raman counts per gate versus fibre length")
    _add_common(p)
    p.add_argument("--length-km", default="0:60:10")

    p = sub.add_parser("keyrate", help="secure key rate versus fibre length")
    _add_common(p)
    p.add_argument("--modulation", default="psk", help="psk or ook-rz")
    p.add_argument("--length-km", default="0:200:1")
    p.add_argument("--clock-hz", default=None, help="signal rate; adds a bits/s column")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("maxdist", help="maximum distance versus per-channel power")
    _add_common(p, power_default="-10:0:1")
    p.add_argument("--modulation", default="psk", help="psk or ook-rz")
    p.add_argument("--max-length-km", default="200")
    p.add_argument("--tol-km", default="0.01")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fit", help="extract Raman slopes from count records")
    p.add_argument("--records", required=True, help="CSV with " + ",".join(csvio.COUNT_RECORD_COLUMNS))
    p.add_argument("--power-dbm", default=str(CALIB_POWER_DBM))
    p.add_argument("--bandwidth-ghz", default="10")
    p.add_argument("--gate-ns", default=str(CALIB_GATE_NS))
    p.add_argument("--dark-per-gate", default=str(CALIB_DARK))
    p.add_argument("--weighting", choices=("poisson", "ols"), default="poisson")
    p.add_argument("--fit-intercept", action="store_true")
    p.add_argument("--per-length", action="store_true", help="also fit each fibre length separately")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("-o", "--output")

    p = sub.add_parser("fwm", help="four-wave-mixing phase-matching report")
    p.add_argument("--channels", default="37,38,39", help="i,j,k; k is the quantum channel")
    p.add_argument("--dc-ps-km-nm", default="16")
    p.add_argument("--slope-ps-km-nm2", default="0")
    p.add_argument("--length-km", default="7.5")
    p.add_argument("--alpha-db-km", default="0.2")
    p.add_argument("--n2-m2-w", default="2.6e-20")
    p.add_argument("--aeff-um2", default="50")
    p.add_argument("--power-dbm", default="0")
    p.add_argument("--strict-phase", action="store_true", help="use sin^2(dk L) instead of sin^2(dk L/2)")
    p.add_argument("-o", "--output")
    return parser


def _scenario(args, direction):
    power = None
    if args.command != "maxdist":
        power = _float(args.power_dbm, "--power-dbm")
    qkd, det, fiber, slopes = build_params(args, direction)
    plan = parse_plan(args.plan, power_dbm=power if power is not None else 0.0,
                      direction=direction)
    mod = ModulationFormat.parse(args.modulation) if hasattr(args, "modulation") else ModulationFormat.PSK
    return scan.Scenario(plan, qkd, det, fiber, slopes, mod)


def cmd_noise(args, command):
    sc = _scenario(args, args.direction)
    zs = parse_range(args.length_km)
    if any(z < 0 for z in zs):
        raise CliError("--length-km values must be non-negative")
    rows = [(z, float(srs_counts_multi(sc.plan, z, sc.effective_slopes, sc.fiber, sc.detection)))
            for z in zs]
    meta = {"scenario": scan.scenario_dict(sc)}
    text = csvio.render_csv(("length_km", "counts_per_gate"), rows, _header(command, meta))
    summary = [f"plan {sc.plan.name or args.plan}: {len(sc.plan.data_channels)} channels, "
               f"{sc.direction}-propagating",
               f"max counts/gate {max(r[1] for r in rows):.4g} over {len(rows)} lengths"]
    return text, summary


def cmd_keyrate(args, command):
    sc = _scenario(args, args.direction)
    zs = parse_range(args.length_km)
    spec = scan.SweepSpec("length_km", zs[0], zs[-1], (zs[1] - zs[0]) if len(zs) > 1 else 1.0, sc)
    if len(zs) > 1 and not all(math.isclose(a, b) for a, b in zip(zs, spec.values)):
        raise CliError("--length-km must be a start:stop:step range or a single value")
    res = scan.keyrate_curve(spec, workers=args.workers)
    cols = ["length_km", "q", "e", "y0", "r"]
    rows = [row[:5] for row in res.rows()]
    if args.clock_hz is not None:
        clock = _float(args.clock_hz, "--clock-hz")
        cols.append("r_bits_per_s")
        rows = [(*row, row[4] * clock) for row in rows]
    text = csvio.render_csv(cols, rows, _header(command, res.metadata))
    md = scan.max_distance(sc)
    summary = [f"plan {sc.plan.name or args.plan}, {sc.direction}, {sc.modulation.name}, "
               f"{sc.detection.filter_bandwidth_hz / 1e9:g} GHz",
               f"maximum distance {md.length_km:.2f} km ({md.flag})"]
    return text, summary


def cmd_maxdist(args, command):
    powers = parse_range(args.power_dbm)
    bws = parse_range(args.bandwidth_ghz)
    base = _scenario(args, args.direction)
    kw = {"l_max_km": _float(args.max_length_km, "--max-length-km"),
          "tol_km": _float(args.tol_km, "--tol-km")}
    rows = []
    baseline = {}
    for bw in bws:
        sc = base.with_bandwidth(bw * 1e9)
        res = scan.max_distance_vs_power(sc, powers, workers=args.workers, **kw)
        for p, L, flag in res.rows():
            rows.append((bw, p, L, flag))
        baseline[bw] = scan.max_distance(sc.without_raman(), **kw)
    meta = {"scenario": scan.scenario_dict(base), "search": kw}
    text = csvio.render_csv(("bandwidth_ghz", "power_dbm", "max_distance_km", "flag"), rows,
                            _header(command, meta))
    summary = [f"{len(rows)} points; no-Raman baseline {next(iter(baseline.values())).length_km:.2f} km"]
    return text, summary


def cmd_fit(args, command):
    power = _float(args.power_dbm, "--power-dbm")
    dark = _float(args.dark_per_gate, "--dark-per-gate")
    records = csvio.read_count_records(args.records, power)
    if not records:
        raise CliError(f"{args.records}: no data rows")
    direction = records[0].plan.direction
    _, det, fiber, slopes = build_params(
        args, direction, {"eta": CALIB_ETA, "gate_ns": CALIB_GATE_NS, "p_dark": dark})
    kw = {"p_dark_background": dark, "weighting": args.weighting,
          "fit_intercept": args.fit_intercept, "ref_bandwidth_hz": slopes.ref_bandwidth_hz}
    joint = calib.fit_slopes(records, det, fiber, **kw)
    rows = [("joint", "s_per_km", joint.s_hat, joint.s_sigma),
            ("joint", "a_per_km", joint.a_hat, joint.a_sigma)]
    if joint.dark_hat is not None:
        rows.append(("joint", "dark_per_gate", joint.dark_hat, joint.dark_sigma))
    rows.append(("joint", "residual_norm", joint.residual_norm, 0.0))
    if args.per_length:
        fits = calib.fit_slopes_by_length(records, det, fiber, dark, args.weighting,
                                          slopes.ref_bandwidth_hz)
        for name, f in fits.items():
            scope = f"length_km={name!r}"
            rows += [(scope, "s_per_km", f.s_hat, f.s_sigma), (scope, "a_per_km", f.a_hat, f.a_sigma)]
        sp = calib.spread(fits)
        rows += [("spread", "s_per_km", *sp["s"]), ("spread", "a_per_km", *sp["a"])]
    meta = {"detection": det, "fiber": fiber, "direction": direction, "n_records": len(records)}
    meta = {k: scan._plain(v) for k, v in meta.items()}
    text = csvio.render_csv(("scope", "parameter", "estimate", "sigma"), rows, _header(command, meta))
    summary = [f"{direction}: s = {joint.s_hat:.4g} +/- {joint.s_sigma:.2g} /km, "
               f"a = {joint.a_hat:.4g} +/- {joint.a_sigma:.2g} /km ({len(records)} records)"]
    return text, summary


def cmd_fwm(args, command):
    try:
        chans = [int(c) for c in args.channels.split(",")]
    except ValueError:
        raise CliError(f"--channels: expected comma-separated integers, got {args.channels!r}") from None
    if len(chans) != 3:
        raise CliError("--channels takes exactly three channels i,j,k")
    try:
        freqs = [grid.channel_to_frequency(c) for c in chans]
        disp = fwm.DispersionParams.from_engineering(
            _float(args.dc_ps_km_nm, "--dc-ps-km-nm"), _float(args.slope_ps_km_nm2, "--slope-ps-km-nm2"))
        nl = fwm.NonlinearParams(_float(args.n2_m2_w, "--n2-m2-w"),
                                 _float(args.aeff_um2, "--aeff-um2") * 1e-12)
    except InvalidInputError as exc:
        raise CliError(str(exc)) from None
    length_m = _float(args.length_km, "--length-km") * 1e3
    alpha = grid.db_per_km_to_per_km(_float(args.alpha_db_km, "--alpha-db-km")) / 1e3
    p0 = grid.dbm_to_watts(_float(args.power_dbm, "--power-dbm"))
    gamma = fwm.nonlinear_gamma(nl, freqs[2])
    ok, margin = fwm.fwm_negligible(gamma, p0, length_m)
    dk = fwm.delta_k(disp, *freqs)
    eff = fwm.fwm_efficiency(alpha, dk, length_m, strict=args.strict_phase)
    eff0 = fwm.fwm_efficiency(alpha, 0.0, length_m, strict=args.strict_phase)
    rows = [("given", *chans, chans[0] + chans[1] - chans[2], dk, eff, eff / eff0)]
    for t in fwm.mixing_products(chans, disp, alpha, length_m, strict=args.strict_phase):
        rows.append(("product", t.i, t.j, t.k, t.product, t.delta_k, t.efficiency, t.efficiency / eff0))
    meta = {"gamma_per_w_m": gamma, "gamma_p0_l": gamma * p0 * length_m, "negligible": ok,
            "margin": margin, "alpha_per_m": alpha, "effective_length_m": fwm.effective_length(alpha, length_m)}
    text = csvio.render_csv(("role", "i", "j", "k", "product", "delta_k_per_m", "eta_fwm",
                             "suppression_ratio"), rows, _header(command, meta))
    summary = [f"gamma = {gamma:.4g} 1/(W m); gamma*P0*L = {gamma * p0 * length_m:.4g} "
               f"({'negligible' if ok else 'NOT negligible'})",
               f"channels {args.channels}: delta_k = {dk:.4g} 1/m, eta_FWM = {eff:.4g}, "
               f"suppression ratio = {eff / eff0:.3g}"]
    return text, summary


COMMANDS = {"noise": cmd_noise, "keyrate": cmd_keyrate, "maxdist": cmd_maxdist,
            "fit": cmd_fit, "fwm": cmd_fwm}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        command = canonical_command(subparser, args, args.command)
        text, summary = COMMANDS[args.command](args, command)
        csvio.write_text(text, args.output, stdout)
    except (ConfigError, InvalidInputError) as exc:
        print(f"{PROG}: error: {exc}", file=stderr)
        return 2
    except NumericalError as exc:
        print(f"{PROG}: numerical failure: {exc}", file=stderr)
        return 3
    if args.output is not None:
        for line in summary:
            print(line, file=stdout)
    return 0

