"""``pumpnet`` command-line front end.

Exit codes: 0 ok, 2 bad input or schema, 3 no mode found, 4 gain target
unreachable, 5 design targets infeasible.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .amplifier import SIGNAL_DETUNING, Amplifier
from .designfile import DesignFile
from .errors import InfeasibleDesignError, SchemaError, UnreachableGainError
from .network import TwoPortResponse
from .synthesis import evaluate_design, flux_sweep, objective, optimize
from .threeport import Embedding

EXIT_OK, EXIT_SCHEMA, EXIT_NO_MODE, EXIT_UNREACHABLE, EXIT_INFEASIBLE = 0, 2, 3, 4, 5
TWO_PI = 2.0 * math.pi


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".12g")


def write_table(rows, columns, fmt, out):
    if fmt == "json":
        data = [{c: (None if isinstance(r[c], float) and math.isnan(r[c]) else r[c]) for c in columns} for r in rows]
        out.write(json.dumps(data, indent=2) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])


def _emit(args, rows, columns):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_table(rows, columns, args.format, fh)
    else:
        buf = io.StringIO()
        write_table(rows, columns, args.format, buf)
        sys.stdout.write(buf.getvalue())


def _load(path) -> DesignFile:
    try:
        return DesignFile.load(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_SCHEMA) from None


def _parse_window(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must be 'lo,hi' in Hz") from None
    if not (0 < lo < hi):
        raise argparse.ArgumentTypeError("window needs 0 < lo < hi")
    return lo, hi


def _amplifier(df: DesignFile) -> Amplifier:
    emb = Embedding(TwoPortResponse(df.signal.ladder()), TwoPortResponse(df.pump.ladder()))
    return Amplifier(emb, df.dipole())


def _target_mode(amp, df, window=None):
    w = window if window is not None else df.window
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mode = amp.mode_near(df.targets.omega0_target, w)
    if mode is None:
        raise CliError(f"no mode between {w[0] / TWO_PI:.6g} and {w[1] / TWO_PI:.6g} Hz", EXIT_NO_MODE)
    return mode


def cmd_modes(args):
    df = _load(args.design)
    amp = _amplifier(df)
    window = df.window if args.window is None else (TWO_PI * args.window[0], TWO_PI * args.window[1])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        modes = amp.modes(window)
    if not modes:
        raise CliError("no mode in window", EXIT_NO_MODE)
    rows = [{"omega_hz": m.omega / TWO_PI, "kappa_hz": m.kappa / TWO_PI, "p_j": m.p_j,
             "kappa_sig_hz": m.kappa_signal / TWO_PI, "kappa_pump_hz": m.kappa_pump / TWO_PI}
            for m in sorted(modes, key=lambda m: m.omega)]
    _emit(args, rows, ["omega_hz", "kappa_hz", "p_j", "kappa_sig_hz", "kappa_pump_hz"])


def cmd_gain_sweep(args):
    df = _load(args.design)
    amp = _amplifier(df)
    mode = _target_mode(amp, df)
    detuning = TWO_PI * df.analysis.get("detuning_hz", SIGNAL_DETUNING / TWO_PI)
    op = amp.operating_point(mode, detuning)
    gain_db = args.pump_gain_db if args.pump_gain_db is not None else df.analysis.get("gain_db", 20.0)
    span = args.span if args.span is not None else df.sweeps.get("gain", {}).get("span_hz", 200e6)
    points = args.points if args.points is not None else df.sweeps.get("gain", {}).get("points", 401)
    if args.unpumped:
        pump = amp.pump_state(op, 0.0)
    else:
        try:
            pump = amp.solve_pump_for_gain(op, 10.0 ** (gain_db / 10.0))
        except UnreachableGainError as exc:
            raise CliError(str(exc), EXIT_UNREACHABLE) from None
    eta = amp.pump_efficiency(op.omega_p)
    bound_dbm = 10.0 * math.log10(1e3 / eta) if eta > 0 else math.inf
    # odd grid centred on the signal frequency so the solved point is sampled
    half = points // 2
    freqs = op.omega_s / TWO_PI + np.linspace(-0.5 * span, 0.5 * span, 2 * half + 1)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for f in freqs:
            r11, t21 = amp.signal_transfer(op, pump, TWO_PI * f)
            rows.append({"freq_hz": float(f), "gain_db": 20.0 * math.log10(abs(r11)),
                         "transmission_db": 20.0 * math.log10(max(abs(t21), 1e-300)),
                         "eta_pc": eta, "leakage_bound_dbm_per_pjp": bound_dbm})
    _emit(args, rows, ["freq_hz", "gain_db", "transmission_db", "eta_pc", "leakage_bound_dbm_per_pjp"])
    if args.report:
        r = amp.figures_of_merit(mode, 10.0 ** (gain_db / 10.0), df.analysis.get("eta_nl"), detuning)
        Path(args.report).write_text(json.dumps(r.to_dict(), indent=2) + "\n")


def _default_path(design, suffix):
    p = Path(design)
    return str(p.with_name(p.stem + suffix))


def cmd_design(args):
    df = _load(args.design)
    if df.signal.n_params + df.pump.n_params == 0:
        raise CliError("design file has no free parameters (both networks are fixed ladders)", EXIT_SCHEMA)
    seed = args.seed if args.seed is not None else df.seed
    budget = args.budget if args.budget is not None else df.budget
    if budget < 100:
        raise CliError("budget must be >= 100", EXIT_SCHEMA)
    code = EXIT_OK
    try:
        res = optimize(df.signal, df.pump, df.dipole(), df.targets, budget=budget, seed=seed, restarts=df.restarts)
    except InfeasibleDesignError as exc:
        res = exc.closest
        code = EXIT_INFEASIBLE
    out = DesignFile(res.signal, res.pump, df.dipole_spec, df.targets, df.analysis, df.sweeps,
                     {**df.optimizer, "seed": seed, "budget": budget})
    Path(args.out or _default_path(args.design, ".optimized.json")).write_text(out.dumps())
    report = {"penalty": res.penalty, "meets_targets": res.meets, "evaluations": len(res.trace),
              "restarts": [{"restart": r.restart, "penalty": r.penalty, "evaluations": r.evaluations,
                            "meets_targets": r.meets} for r in res.restarts],
              "report": res.report.to_dict()}
    Path(args.report or _default_path(args.design, ".report.json")).write_text(json.dumps(report, indent=2) + "\n")
    Path(args.trace or _default_path(args.design, ".trace.csv")).write_text(res.trace_csv())
    if code != EXIT_OK:
        raise CliError("no restart met the design targets; closest design written", code)


def cmd_flux_sweep(args):
    df = _load(args.design)
    if df.snail is None:
        raise CliError("flux sweep needs a SNAIL-array dipole", EXIT_SCHEMA)
    spec = df.sweeps.get("flux", {})
    n = args.points if args.points is not None else spec.get("points", 11)
    if n < 2:
        raise CliError("need at least 2 flux points", EXIT_SCHEMA)
    fluxes = np.linspace(spec.get("start", 0.0), spec.get("stop", 0.5), n)
    pts = flux_sweep(df.signal, df.pump, df.snail, fluxes, df.targets)
    if all(p.is_gap for p in pts):
        raise CliError("mode not found at any flux point", EXIT_NO_MODE)
    rows = [{"phi_ext": p.phi_ext, "omega_hz": p.omega_a / TWO_PI, "kappa_hz": p.kappa_a / TWO_PI, "p_j": p.p_j}
            for p in pts]
    _emit(args, rows, ["phi_ext", "omega_hz", "kappa_hz", "p_j"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pumpnet", description="Analyse and synthesize pump-coupled three-wave-mixing amplifiers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def table_opts(p):
        p.add_argument("design", help="design file (JSON)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", help="write the table here instead of stdout")

    p = sub.add_parser("modes", help="list resonant modes")
    table_opts(p)
    p.add_argument("--window", type=_parse_window, help="search window 'lo,hi' in Hz")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("gain-sweep", help="gain and transmission versus signal frequency at a solved pump")
    table_opts(p)
    p.add_argument("--pump-gain-db", type=float, help="gain to solve the pump for (default 20)")
    p.add_argument("--span", type=float, help="sweep span in Hz")
    p.add_argument("--points", type=int, help="number of sweep points (rounded up to odd)")
    p.add_argument("--unpumped", action="store_true", help="sweep with the pump off")
    p.add_argument("--report", help="also write the figures of merit as JSON here")
    p.set_defaults(func=cmd_gain_sweep)

    p = sub.add_parser("design", help="optimize the filter prototypes")
    p.add_argument("design", help="design file (JSON)")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--out", help="optimized design file (default <stem>.optimized.json)")
    p.add_argument("--report", help="report JSON (default <stem>.report.json)")
    p.add_argument("--trace", help="evaluation trace CSV (default <stem>.trace.csv)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("flux-sweep", help="track the mode across external flux")
    table_opts(p)
    p.add_argument("--points", type=int)
    p.set_defaults(func=cmd_flux_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SchemaError as exc:
        print(f"pumpnet: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except CliError as exc:
        print(f"pumpnet: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
