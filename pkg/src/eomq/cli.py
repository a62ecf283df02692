"""Command-line front end: ``eomq <subcommand> [--config FILE] [flags]``.

Parameters come from an optional JSON config file (an object whose keys are
the subcommand's option names, with dashes or underscores) and are
overridden by explicit flags. Unknown config keys are rejected. Output goes
to ``--out`` (default stdout) as CSV with a header row or as JSON; every
float is written with 17 significant digits.

Exit codes: 0 success, 2 bad configuration, 3 numerical contract violation
(a JSON error record naming the invariant is written to stderr).
Set ``EOMQ_LOG_LEVEL`` (e.g. ``INFO``) for progress logging.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import amp_mod, phase_mod, qkd, quantum_channel, wavepacket
from .errors import ContractViolation
from .mode_space import TwoPortState
from .splitters import make_splitter

log = logging.getLogger("eomq")


class ConfigError(ValueError):
    pass


def _fmt(x):
    return "%.17g" % x


def _json_text(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_text(v, indent + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return _fmt(x)
    if isinstance(obj, complex):
        return _json_text({"re": obj.real, "im": obj.imag}, indent)
    return json.dumps(str(obj))


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- parameter plumbing ----------------------------------------------------

def _add(p, name, type_=float, default=None, choices=None, help_=None, flag=False):
    dest = name.replace("-", "_")
    if flag:
        p.add_argument(f"--{name}", dest=dest, action="store_const", const=True, default=None, help=help_)
    else:
        p.add_argument(f"--{name}", dest=dest, type=type_, choices=choices, default=None, help=help_)
    p.set_defaults(**{f"_default_{dest}": default})
    p._eomq_keys = getattr(p, "_eomq_keys", {})
    p._eomq_keys[dest] = type_ if not flag else bool


def _eom_options(p):
    _add(p, "preset", str, None, amp_mod.PRESETS, "standard Y-branch biasing")
    _add(p, "m", float, None, help_="modulation index for presets (both arms)")
    _add(p, "input-splitter", str, "yb_split", ("dc", "yb_split", "yb_combine"))
    _add(p, "output-splitter", str, "yb_combine", ("dc", "yb_split", "yb_combine"))
    _add(p, "k-in", float, 0.5, help_="input splitter coupling")
    _add(p, "k-out", float, 0.5, help_="output splitter coupling")
    for arm in ("1", "2"):
        _add(p, f"m{arm}", float, 0.0, help_=f"arm {arm} modulation index")
        _add(p, f"theta{arm}", float, 0.0, help_=f"arm {arm} RF phase [rad]")
        _add(p, f"phi-b{arm}", float, 0.0, help_=f"arm {arm} bias phase [rad]")
    _add(p, "asymmetric", flag=True, default=False, help_="arm 1 is a plain waveguide")


def _packet_options(p, n=128):
    _add(p, "samples", int, n, help_="grid size (power of two)")
    _add(p, "dt", float, 1.0, help_="sample spacing [s]")
    _add(p, "width", float, 8.0, help_="Gaussian rms width [s]")
    _add(p, "chirp", float, 0.0, help_="quadratic phase [rad/s^2]")


def _resolve(parser, ns):
    keys = parser._eomq_keys
    params = {k: getattr(ns, f"_default_{k}") for k in keys}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        for raw, value in data.items():
            key = raw.replace("-", "_")
            if key not in keys:
                raise ConfigError(f"unknown config key {raw!r}")
            typ = keys[key]
            if value is not None and typ in (int, float) and not isinstance(value, (int, float)):
                raise ConfigError(f"config key {raw!r} must be a number")
            params[key] = value
    for key in keys:
        v = getattr(ns, key)
        if v is not None:
            params[key] = v
    return params


def _eom_config(p):
    if p["preset"]:
        if p["m"] is None:
            raise ConfigError("--preset needs --m")
        return amp_mod.preset(p["preset"], p["m"])
    if p["m"] is not None:
        raise ConfigError("--m only applies with --preset; use --m1/--m2")
    return amp_mod.EomConfig(
        make_splitter(p["input_splitter"], p["k_in"]),
        make_splitter(p["output_splitter"], p["k_out"]),
        phase_mod.ToneConfig(p["m1"], p["theta1"], p["phi_b1"]),
        phase_mod.ToneConfig(p["m2"], p["theta2"], p["phi_b2"]),
        bool(p["asymmetric"]),
    )


def _packet(p):
    return wavepacket.gaussian(p["samples"], p["dt"], p["width"], chirp=p["chirp"])


# -- subcommands -----------------------------------------------------------

def cmd_sidebands(p):
    if p["m"] is None:
        raise ConfigError("sidebands needs --m")
    cfg = phase_mod.ToneConfig(p["m"], p["theta"], p["phi_b"])
    sb = phase_mod.sideband_spectrum(cfg, p["band"])
    rows = [r for r in sb.rows() if r[3] > p["min_power"]]
    header = ["offset_tones", "re_amplitude", "im_amplitude", "power_fraction"]
    return header, rows, {"m": cfg.m, "sidebands": [dict(zip(header, r)) for r in rows]}


def cmd_eom(p):
    cfg = _eom_config(p)
    if p["timeseries"]:
        n = p["timeseries"]
        phase = 2 * np.pi * np.arange(n) / n
        cm = amp_mod.classical_matrix(cfg, phase, omega0=1.0)
        header = ["omega0_t_rad"] + [f"{part}_m{ab}" for ab in ("11", "12", "21", "22") for part in ("re", "im")]
        rows = cm.rows()
        return header, rows, {"samples": [dict(zip(header, r)) for r in rows]}
    lat = amp_mod.default_window(cfg)
    q0 = lat.carrier_index
    out = amp_mod.eom_one_photon(cfg, p["input_port"], q0, lat)
    band = p["band"] if p["band"] is not None else max(
        phase_mod.carson_band(t.effective_m) + 2 for t in cfg.arms
    )
    rows = []
    for port in (1, 2):
        for n in range(-band, band + 1):
            amp = out.amplitude([(port, q0 + n, 1)])
            rows.append((port, n, abs(amp) ** 2, amp.real, amp.imag))
    header = ["port", "offset_tones", "power_fraction", "re_amplitude", "im_amplitude"]
    return header, rows, {
        "total_probability": out.norm() ** 2,
        "sidebands": [dict(zip(header, r)) for r in rows],
    }


def cmd_hom(p):
    pk = _packet(p)
    t = pk.times
    if p["alpha"] == "none":
        alpha = np.zeros(pk.n)
    else:
        alpha = np.where(t < t[pk.n // 2], 0.0, math.pi)
    p11, p22, p12 = wavepacket.hom_density_grids(pk, alpha)
    rows = [
        (float(t[j]), float(t[k]), float(p11[j, k]), float(p22[j, k]), float(p12[j, k]))
        for j in range(pk.n)
        for k in range(pk.n)
    ]
    dt2 = pk.dt**2
    totals = {
        "same_port_1": float(p11.sum() * dt2),
        "same_port_2": float(p22.sum() * dt2),
        "cross_port": float(p12.sum() * dt2),
    }
    header = ["t1_s", "t2_s", "p11_per_s2", "p22_per_s2", "p12_per_s2"]
    return header, rows, {"totals": totals, "alpha": p["alpha"]}


def cmd_qkd(p):
    if p["seed"] is None:
        raise ConfigError("qkd needs --seed (no wall-clock default)")
    rates = p["rates"]
    if isinstance(rates, str):
        try:
            rates = json.loads(rates)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--rates is not JSON: {exc}") from exc
    stats = qkd.run_session(p["trials"], rates, p["seed"], p["force_basis"], p["workers"])
    d = stats.to_dict()
    d["expected_qber"] = qkd.expected_qber(rates, p["force_basis"])
    rows = [(c["label"], c["bob_basis"], c["detector"], c["count"]) for c in d["counts"]]
    return ["label", "bob_basis", "detector", "count"], rows, d


def cmd_kraus(p):
    cfg = _eom_config(p)
    lat = amp_mod.default_window(cfg)
    q0 = lat.carrier_index
    n = p["photons"]
    if n not in (1, 2):
        raise ConfigError("--photons must be 1 or 2")
    vec = np.zeros(lat.size, dtype=complex)
    vec[lat.index(q0)] = 1.0
    rho = quantum_channel.OnePhotonDensity.pure(lat, vec)
    report = quantum_channel.kraus_consistency(rho, cfg)
    out = quantum_channel.channel_output(cfg, TwoPortState.fock([(1, q0, n)]), lat)
    blocks = quantum_channel.block_decompose(out, 1, n)
    rows = [(k, w) for k, w in enumerate(blocks.weights)]
    return ["photons_in_port_1", "weight"], rows, {"kraus": report, "blocks": blocks.summary()}


def cmd_correlate(p):
    cfg = _eom_config(p)
    pk = _packet(p)
    omega0 = 2 * np.pi * p["tone_bins"] / (pk.n * pk.dt)
    j = p["t1_index"]
    rows = []
    for k in range(pk.n):
        try:
            g = wavepacket.g1_correlation(cfg, pk, (p["port_a"], p["port_b"]), pk.times[j], pk.times[k], omega0)
            rows.append((float(pk.times[k]), g.real, g.imag, 1))
        except ContractViolation:
            rows.append((float(pk.times[k]), float("nan"), float("nan"), 0))
    header = ["t2_s", "re_g1", "im_g1", "defined"]
    return header, rows, {"t1_s": float(pk.times[j]), "g1": [dict(zip(header, r)) for r in rows]}


def cmd_wavepacket(p):
    cfg = _eom_config(p)
    if p["input"]:
        with open(p["input"]) as fh:
            text = fh.read()
        pk = wavepacket.Wavepacket.from_json(text) if p["input"].endswith(".json") else wavepacket.Wavepacket.from_csv(text)
        pk = pk.normalized()
    else:
        pk = _packet(p)
    omega0 = 2 * np.pi * p["tone_bins"] / (pk.n * pk.dt)
    out, rad = wavepacket.modulate_wavepacket(cfg, pk, omega0)
    rows = [
        (float(t), a.real, a.imag, b.real, b.imag)
        for t, a, b in zip(pk.times, out.samples, rad.samples)
    ]
    header = ["t_s", "re_phi_out", "im_phi_out", "re_phi_rad", "im_phi_rad"]
    return header, rows, {
        "p_output": out.norm_sq(),
        "p_radiated": rad.norm_sq(),
        "output": out.to_dict(),
        "radiated": rad.to_dict(),
    }


COMMANDS = {}


def build_parser():
    parser = argparse.ArgumentParser(prog="eomq", description="Quantum electro-optic modulator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def new(name, func, help_, fmt="csv"):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON file of parameters")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp._eomq_keys = {}
        COMMANDS[name] = (sp, func)
        return sp

    sp = new("sidebands", cmd_sidebands, "classical sideband spectrum of a phase modulator")
    _add(sp, "m", float, None, help_="modulation index")
    _add(sp, "theta", float, 0.0, help_="RF phase [rad]")
    _add(sp, "phi-b", float, 0.0, help_="bias phase [rad]")
    _add(sp, "band", int, None, help_="largest |offset| (default: guard band)")
    _add(sp, "min-power", float, 0.0, help_="drop rows with power <= this")

    sp = new("eom", cmd_eom, "single-photon sideband table of an amplitude modulator")
    _eom_options(sp)
    _add(sp, "input-port", int, 1, (1, 2))
    _add(sp, "band", int, None, help_="largest |offset| reported")
    _add(sp, "timeseries", int, 0, help_="emit m_ab over one RF period with this many samples")

    sp = new("hom", cmd_hom, "two-photon coincidence densities with a phase-modulated input")
    _packet_options(sp, 32)
    _add(sp, "alpha", str, "none", ("none", "step"), "phase on input 1: none or a 0/pi step")

    sp = new("qkd", cmd_qkd, "frequency-coded BB84 Monte Carlo session", fmt="json")
    _add(sp, "trials", int, 1_000_000)
    _add(sp, "seed", int, None, help_="required")
    _add(sp, "rates", str, None, help_="JSON object or list of send rates for +1,-1,+2,-2")
    _add(sp, "force-basis", int, None, (1, 2))
    _add(sp, "workers", int, 1)

    sp = new("kraus", cmd_kraus, "channel and Kraus checks for carrier input", fmt="json")
    _eom_options(sp)
    _add(sp, "photons", int, 1)

    sp = new("correlate", cmd_correlate, "first-order coherence after modulation", fmt="json")
    _eom_options(sp)
    _packet_options(sp)
    _add(sp, "tone-bins", int, 4, help_="RF tone in DFT bins")
    _add(sp, "port-a", int, 1, (1, 2))
    _add(sp, "port-b", int, 1, (1, 2))
    _add(sp, "t1-index", int, 64)

    sp = new("wavepacket", cmd_wavepacket, "amplitude-modulate a single-photon wavepacket")
    _eom_options(sp)
    _packet_options(sp)
    _add(sp, "tone-bins", int, 4, help_="RF tone in DFT bins")
    _add(sp, "input", str, None, help_="packet file (.json or .csv)")
    return parser


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_record(kind, message, invariant=None):
    rec = {"error": kind, "message": message}
    if invariant:
        rec["invariant"] = invariant
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def run(argv=None):
    level = os.environ.get("EOMQ_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(message)s")
    parser = build_parser()
    ns = parser.parse_args(argv)
    sp, func = COMMANDS[ns.command]
    try:
        params = _resolve(sp, ns)
        log.info("running %s with %s", ns.command, params)
        header, rows, doc = func(params)
    except ContractViolation as exc:
        _error_record("contract_violation", str(exc), exc.invariant)
        return 3
    except (ConfigError, ValueError, TypeError) as exc:
        sp.print_usage(sys.stderr)
        _error_record("bad_config", str(exc))
        return 2
    text = _json_text(doc) + "\n" if ns.format == "json" else _csv_text(header, rows)
    _emit(text, ns.out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
