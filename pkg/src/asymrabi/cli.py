"""Command-line driver: ``python -m asymrabi <command> --config run.ini --out DIR``.

Commands: ``simulate``, ``spectrum``, ``rabi-map``, ``estimate``.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import dynamics as dyn
from .model import DriveParams, SystemParams, compute_kappa, derived, rabi_frequency
from .rwa import rwa_validity
from .scenarios import PRESETS, estimate, get_preset, to_dimensionless
from .spectrum import classify_peaks, dipole_from_trajectory, periodogram

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEPABLE = {
    "e_amp": ("drive", "e_amp"),
    "omega": ("drive", "omega"),
    "omega0": ("system", "omega0"),
    "d_aa": ("system", "d_aa"),
    "d_bb": ("system", "d_bb"),
    "d_ab": ("system", "d_ab"),
}

INITS = {
    "excited": dyn.InitialState.excited,
    "ground": dyn.InitialState.ground,
    "superposition": dyn.InitialState.superposition,
}


class ConfigError(ValueError):
    pass


@dataclass
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int

    def values(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class RunConfig:
    sys: Optional[SystemParams] = None
    drive: Optional[DriveParams] = None
    preset: Optional[str] = None
    preset_field: Optional[float] = None
    m: int = 1
    init: str = "excited"
    t_end: Optional[float] = None
    rabi_periods: float = 3.0
    strategy: str = "auto"
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    samples_per_period: int = 32
    samples_per_rabi: int = 256
    window: str = "hann"
    spectrum_rabi_periods: float = 64.0
    n_max: int = 4
    floor: float = 1e-6
    sweep: Optional[Sweep] = None
    m_max: int = 3
    rabi_hz: float = 1e12
    static_field: Optional[float] = None
    count: Optional[float] = None

    @property
    def options(self):
        return dyn.SolverOptions(self.rtol, self.atol, self.method)

    @property
    def sampling(self):
        return dyn.SamplingPlan(self.samples_per_period, self.samples_per_rabi)

    def initial_state(self):
        return INITS[self.init]()


def _num(value):
    return repr(float(value))


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key) or cp.get(section, key).strip() == "":
        return default
    raw = cp.get(section, key).strip()
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def _int(raw):
    v = float(raw)
    if v != int(v):
        raise ValueError("expected an integer")
    return int(v)


def load_config(path=None, overrides=(), preset=None) -> RunConfig:
    cp = configparser.ConfigParser()
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            cp.read(path)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())
    if preset is not None:
        if not cp.has_section("run"):
            cp.add_section("run")
        cp.set("run", "preset", preset)
    return parse_config(cp)


def parse_config(cp) -> RunConfig:
    cfg = RunConfig()
    cfg.preset = _get(cp, "run", "preset", str, None)
    explicit = cp.has_section("system") or cp.has_section("drive")
    if cfg.preset is not None and explicit:
        raise ConfigError("give either [system]/[drive] parameters or a preset, not both")
    if cfg.preset is not None and cfg.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}; choose from {sorted(PRESETS)}")
    try:
        if explicit:
            cfg.sys = SystemParams(
                omega0=_get(cp, "system", "omega0", float, 1.0),
                d_aa=_get(cp, "system", "d_aa", float, 0.0),
                d_bb=_get(cp, "system", "d_bb", float, 0.0),
                d_ab=_get(cp, "system", "d_ab", float, 1.0),
                tau=_get(cp, "system", "tau", float, None),
            )
            cfg.drive = DriveParams(
                e_amp=_get(cp, "drive", "e_amp", float, 0.0),
                omega=_get(cp, "drive", "omega", float, cfg.sys.omega0),
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.preset_field = _get(cp, "run", "preset_field", float, None)
    cfg.m = _get(cp, "run", "m", _int, 1)
    if cfg.m < 1:
        raise ConfigError("[run] m must be >= 1")
    cfg.init = _get(cp, "run", "init", str, "excited")
    if cfg.init not in INITS:
        raise ConfigError(f"[run] init must be one of {sorted(INITS)}")
    cfg.t_end = _get(cp, "run", "t_end", float, None)
    cfg.rabi_periods = _get(cp, "run", "rabi_periods", float, cfg.rabi_periods)
    cfg.strategy = _get(cp, "run", "strategy", str, "auto")
    if cfg.strategy not in ("auto", "direct", "floquet"):
        raise ConfigError("[run] strategy must be auto, direct or floquet")
    cfg.rtol = _get(cp, "run", "rtol", float, cfg.rtol)
    cfg.atol = _get(cp, "run", "atol", float, cfg.atol)
    cfg.method = _get(cp, "run", "method", str, cfg.method)
    cfg.samples_per_period = _get(cp, "run", "samples_per_period", _int, cfg.samples_per_period)
    cfg.samples_per_rabi = _get(cp, "run", "samples_per_rabi", _int, cfg.samples_per_rabi)
    try:
        cfg.options
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.window = _get(cp, "spectrum", "window", str, cfg.window)
    cfg.spectrum_rabi_periods = _get(cp, "spectrum", "rabi_periods", float, cfg.spectrum_rabi_periods)
    cfg.n_max = _get(cp, "spectrum", "n_max", _int, cfg.n_max)
    cfg.floor = _get(cp, "spectrum", "floor", float, cfg.floor)
    if cp.has_section("sweep"):
        param = _get(cp, "sweep", "parameter", str, "e_amp")
        if param not in SWEEPABLE:
            raise ConfigError(f"[sweep] parameter must be one of {sorted(SWEEPABLE)}")
        cfg.sweep = Sweep(param, _get(cp, "sweep", "start", float, 0.0),
                          _get(cp, "sweep", "stop", float, 1.0), _get(cp, "sweep", "points", _int, 101))
        if cfg.sweep.points < 2:
            raise ConfigError("[sweep] points must be >= 2")
    cfg.m_max = _get(cp, "rabi_map", "m_max", _int, cfg.m_max)
    cfg.rabi_hz = _get(cp, "estimate", "rabi_hz", float, cfg.rabi_hz)
    cfg.static_field = _get(cp, "estimate", "static_field", float, None)
    cfg.count = _get(cp, "estimate", "count", float, None)
    return cfg


def resolve_params(cfg: RunConfig):
    """``(sys, drive)`` in internal units, from explicit values or a preset."""
    if cfg.sys is not None:
        return cfg.sys, cfg.drive
    if cfg.preset is None:
        raise ConfigError("config needs [system]/[drive] sections or a preset")
    sys_, drive, _ = to_dimensionless(get_preset(cfg.preset), cfg.preset_field)
    return sys_, drive


def dump_config(cfg: RunConfig, sys_, drive) -> str:
    """Fully resolved config as INI text; reloading it reproduces the run."""
    cp = configparser.ConfigParser()
    cp["system"] = {"omega0": _num(sys_.omega0), "d_aa": _num(sys_.d_aa), "d_bb": _num(sys_.d_bb),
                    "d_ab": _num(sys_.d_ab)}
    if sys_.tau is not None:
        cp["system"]["tau"] = _num(sys_.tau)
    cp["drive"] = {"e_amp": _num(drive.e_amp), "omega": _num(drive.omega)}
    run = {"m": str(cfg.m), "init": cfg.init, "rabi_periods": _num(cfg.rabi_periods),
           "strategy": cfg.strategy, "rtol": _num(cfg.rtol), "atol": _num(cfg.atol), "method": cfg.method,
           "samples_per_period": str(cfg.samples_per_period), "samples_per_rabi": str(cfg.samples_per_rabi)}
    if cfg.t_end is not None:
        run["t_end"] = _num(cfg.t_end)
    cp["run"] = run
    cp["spectrum"] = {"window": cfg.window, "rabi_periods": _num(cfg.spectrum_rabi_periods),
                      "n_max": str(cfg.n_max), "floor": _num(cfg.floor)}
    if cfg.sweep is not None:
        cp["sweep"] = {"parameter": cfg.sweep.parameter, "start": _num(cfg.sweep.start),
                       "stop": _num(cfg.sweep.stop), "points": str(cfg.sweep.points)}
    cp["rabi_map"] = {"m_max": str(cfg.m_max)}
    cp["estimate"] = {"rabi_hz": _num(cfg.rabi_hz)}
    if cfg.static_field is not None:
        cp["estimate"]["static_field"] = _num(cfg.static_field)
    if cfg.count is not None:
        cp["estimate"]["count"] = _num(cfg.count)
    from io import StringIO
    buf = StringIO()
    cp.write(buf)
    return buf.getvalue()


def write_table(path, columns, rows):
    """Columnar text: one ``#`` header naming columns and units, then rows."""
    with open(path, "w") as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for row in rows:
            fh.write(" ".join(v if isinstance(v, str) else format(float(v), ".17g") for v in row) + "\n")


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _with_param(sys_, drive, name, value):
    section, key = SWEEPABLE[name]
    if section == "drive":
        return sys_, replace(drive, **{key: value})
    return replace(sys_, **{key: value}), drive


def _horizon(cfg, sys_, drive, periods):
    if cfg.t_end is not None:
        return cfg.t_end
    w = derived(sys_, drive, cfg.m).omega_gen
    if w == 0:
        return periods * 100 * drive.period
    return periods * 2 * math.pi / w


def _integrate(cfg, sys_, drive, t_end):
    strategy = cfg.strategy
    if strategy == "auto":
        strategy = "direct" if t_end <= 200 * drive.period else "floquet"
    if strategy == "direct":
        return dyn.integrate_exact(sys_, drive, cfg.initial_state(), t_end, cfg.sampling, cfg.options)
    return dyn.integrate_floquet(sys_, drive, cfg.initial_state(), t_end, cfg.sampling, cfg.options)


def _sweep_point(args):
    cfg, sys_, drive, value = args
    sys_, drive = _with_param(sys_, drive, cfg.sweep.parameter, value)
    p = derived(sys_, drive, cfg.m)
    freq, eff = dyn.floquet_rabi(sys_, drive, cfg.options)
    return [value, p.kappa, p.omega_r, p.omega_gen, freq, eff]


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def cmd_simulate(cfg: RunConfig, out: Path, jobs: int = 1) -> dict:
    sys_, drive = resolve_params(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dump_config(cfg, sys_, drive))
    if cfg.sweep is not None:
        rows = _map(_sweep_point, [(cfg, sys_, drive, v) for v in cfg.sweep.values()], jobs)
        write_table(out / "sweep.dat", [cfg.sweep.parameter, "kappa", "omega_r", "omega_gen",
                                        "floquet_freq", "floquet_rabi"], rows)
        return {"sweep_points": len(rows)}
    t_end = _horizon(cfg, sys_, drive, cfg.rabi_periods)
    traj = _integrate(cfg, sys_, drive, t_end)
    pa, pb = dyn.population(traj)
    write_table(out / "trajectory.dat", ["t", "re_c_a", "im_c_a", "re_c_b", "im_c_b"],
                zip(traj.times, traj.c_a.real, traj.c_a.imag, traj.c_b.real, traj.c_b.imag))
    write_table(out / "populations.dat", ["t", "p_a", "p_b"], zip(traj.times, pa, pb))
    p = derived(sys_, drive, cfg.m)
    validity = rwa_validity(sys_, drive, cfg.m)
    report = {
        "kappa": p.kappa, "m": p.m, "delta": p.delta, "omega_r": p.omega_r, "omega_gen": p.omega_gen,
        "norm_drift": traj.norm_drift, "samples": len(traj),
        "method": traj.meta.get("method"),
        "extracted_frequency": dyn.oscillation_frequency(traj.times, pa, drive.period),
        "validity": validity.as_dict(),
    }
    write_json(out / "report.json", report)
    return report


def cmd_spectrum(cfg: RunConfig, out: Path, jobs: int = 1) -> dict:
    sys_, drive = resolve_params(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dump_config(cfg, sys_, drive))
    p = derived(sys_, drive, cfg.m)
    t_end = _horizon(cfg, sys_, drive, cfg.spectrum_rabi_periods)
    traj = _integrate(cfg, sys_, drive, t_end)
    series = dipole_from_trajectory(traj, sys_)
    rep = periodogram(series, cfg.window, resolve=p.omega_gen or None, floor=cfg.floor)
    rep = classify_peaks(rep, p, drive.omega, cfg.n_max)
    write_table(out / "spectrum.dat", ["freq", "power", "amplitude"], zip(rep.freqs, rep.power, rep.amplitude))
    write_table(out / "peaks.dat", ["freq", "amplitude", "kind", "n", "member"],
                [(pk.freq, pk.amplitude, pk.kind, "-" if pk.n is None else str(pk.n), pk.member or "-")
                 for pk in rep.peaks])
    report = {
        "kappa": p.kappa, "m": p.m, "omega_r": p.omega_r, "omega_gen": p.omega_gen,
        "norm_drift": traj.norm_drift, "resolution": rep.resolution, "dc_offset": series.dc_offset,
        "peaks": [{"freq": pk.freq, "amplitude": pk.amplitude, "label": pk.label} for pk in rep.peaks],
    }
    write_json(out / "report.json", report)
    return report


def _map_point(args):
    sys_, drive, e, m_max = args
    d = replace(drive, e_amp=e)
    return [e, compute_kappa(sys_, d)] + [rabi_frequency(sys_, d, m) for m in range(1, m_max + 1)]


def rabi_minima(sys_, drive, e_values, m, values):
    """Interior minima of ``|Omega_R(E)|``, refined to a zero where it changes sign."""
    mags = np.abs(values)
    found = []
    f = lambda e: rabi_frequency(sys_, replace(drive, e_amp=e), m)
    for i in range(1, len(e_values) - 1):
        if not (mags[i] <= mags[i - 1] and mags[i] < mags[i + 1]):
            continue
        lo, hi = e_values[i - 1], e_values[i + 1]
        if np.sign(f(lo)) != np.sign(f(hi)):
            a, b = (lo, e_values[i]) if np.sign(f(lo)) != np.sign(f(e_values[i])) else (e_values[i], hi)
            e_min = a if f(a) == 0 else (b if f(b) == 0 else brentq(f, a, b, xtol=1e-14, rtol=1e-14))
        else:
            e_min = minimize_scalar(lambda e: abs(f(e)), bounds=(lo, hi), method="bounded",
                                    options={"xatol": 1e-12}).x
        d = replace(drive, e_amp=e_min)
        found.append((m, e_min, compute_kappa(sys_, d), rabi_frequency(sys_, d, m)))
    return found


def cmd_rabi_map(cfg: RunConfig, out: Path, jobs: int = 1) -> dict:
    sys_, drive = resolve_params(cfg)
    if cfg.sweep is None or cfg.sweep.parameter != "e_amp":
        raise ConfigError("rabi-map needs a [sweep] over parameter = e_amp")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dump_config(cfg, sys_, drive))
    e_values = cfg.sweep.values()
    rows = _map(_map_point, [(sys_, drive, e, cfg.m_max) for e in e_values], jobs)
    cols = ["e_amp", "kappa"] + [f"omega_r_m{m}" for m in range(1, cfg.m_max + 1)]
    write_table(out / "rabi_map.dat", cols, rows)
    table = np.array(rows)
    minima = []
    for m in range(1, cfg.m_max + 1):
        minima += rabi_minima(sys_, drive, e_values, m, table[:, 1 + m])
    write_table(out / "minima.dat", ["m", "e_amp", "kappa", "omega_r"], minima)
    return {"points": len(rows), "minima": [{"m": m, "e_amp": e, "kappa": k, "omega_r": w} for m, e, k, w in minima]}


def cmd_estimate(cfg: RunConfig, out: Path, jobs: int = 1) -> dict:
    if cfg.preset is None:
        raise ConfigError("estimate needs --preset NAME or [run] preset")
    out.mkdir(parents=True, exist_ok=True)
    report = estimate(cfg.preset, rabi_hz=cfg.rabi_hz, static_field=cfg.static_field, count=cfg.count)
    cp_text = f"[run]\npreset = {cfg.preset}\n\n[estimate]\nrabi_hz = {_num(cfg.rabi_hz)}\n"
    if cfg.static_field is not None:
        cp_text += f"static_field = {_num(cfg.static_field)}\n"
    if cfg.count is not None:
        cp_text += f"count = {_num(cfg.count)}\n"
    (out / "config.ini").write_text(cp_text + "\n")
    write_json(out / "estimate.json", report)
    return report


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "rabi-map": cmd_rabi_map,
    "estimate": cmd_estimate,
}


def _summary(command, report):
    lines = []
    if command == "estimate":
        for k in sorted(report):
            v = report[k]
            lines.append(f"{k:>28}: {v:.4g}" if isinstance(v, float) else f"{k:>28}: {v}")
    elif command == "rabi-map":
        lines.append(f"{report['points']} sweep points")
        for mn in report["minima"]:
            lines.append(f"m={mn['m']}: |Omega_R| minimum at E = {mn['e_amp']:.10g}, kappa = {mn['kappa']:.10g}")
    elif command == "spectrum":
        lines.append(f"Omega = {report['omega_gen']:.6g}, norm drift = {report['norm_drift']:.2e}")
        for pk in report["peaks"]:
            lines.append(f"  {pk['freq']:.8f}  {pk['amplitude']:.4e}  {pk['label']}")
    elif "sweep_points" in report:
        lines.append(f"{report['sweep_points']} sweep points written")
    else:
        lines.append(f"Omega_R = {report['omega_r']:.6g}, Omega = {report['omega_gen']:.6g}, "
                     f"extracted = {report['extracted_frequency']:.6g}")
        lines.append(f"norm drift = {report['norm_drift']:.2e}")
        v = report["validity"]
        lines.append(f"strong coupling: {v['strong_coupling']}, RWA hierarchy: {v['rwa_hierarchy']}, "
                     f"isolated: {v['isolated']}")
        lines += [f"  warning: {msg}" for msg in v["messages"]]
    return "\n".join(lines)


def build_parser():
    ap = argparse.ArgumentParser(prog="asymrabi", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--preset")
    ap.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.override, args.preset)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = COMMANDS[args.command](cfg, args.out, max(1, args.jobs))
    except (dyn.IntegrationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, KeyError, ValueError) as exc:
        # parameter validation surfaces as ValueError
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(_summary(args.command, report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
