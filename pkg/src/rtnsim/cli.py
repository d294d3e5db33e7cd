"""Command-line front end.

Subcommands ``noise-trace``, ``spectrum``, ``evolve`` and ``sweep`` read a
JSON config (``--config``) and write CSV/JSON files under ``--out``.  On
failure a single line ``error category=<kind> message=<text>`` goes to
stderr and the exit code is nonzero.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import config as configmod
from .errors import RtnSimError
from .montecarlo import default_grid, run_ensemble
from .noise import generate_trajectory, sampled_trace, stream
from .protocol import max_concurrence, sweep_prep, sweep_R
from .spectral import Spectrum, average_psd, fit_power_law, lorentzian_psd

EXIT_CODES = {"io": 3, "numerical": 4}

SELF_TEST_C = 4e-3
SELF_TEST_ALPHA = 0.89


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_noise_trace(cfg) -> list:
    """One telegraph realization sampled on a uniform grid (values in rad/ns)."""
    sec = cfg.noise_trace
    traj = generate_trajectory(cfg.noise.params(), sec.duration_ns, stream(cfg.master_seed, 0))
    t, v = sampled_trace(traj, sec.sample_step_ns)
    path = f"{cfg.output_prefix}_noise_trace.csv"
    return [write_csv(path, ["t_ns", "value"], zip(t, v))]


def _tag(x: float) -> str:
    return f"{x:g}".replace(".", "p")


def cmd_spectrum(cfg, self_test: bool = False) -> list:
    sec = cfg.spectrum
    taus = sec.tau_c_ns if sec.tau_c_ns is not None else [cfg.noise.tau_c_ns]
    j0_sq = cfg.noise.amplitude() ** 2
    written = []
    for idx, tau in enumerate(taus):
        params = cfg.noise.params(tau_c_ns=float(tau))
        spec = average_psd(params, sec.n_realizations, sec.dt_ns, sec.duration_ns,
                           stream(cfg.master_seed, idx), sampling=sec.sampling)
        ref = j0_sq * lorentzian_psd(float(tau), spec.frequencies)
        stem = f"{cfg.output_prefix}_spectrum" if len(taus) == 1 else \
            f"{cfg.output_prefix}_spectrum_tc{_tag(float(tau))}"
        written.append(write_csv(f"{stem}.csv", ["f_per_ns", "psd", "lorentzian_ref"],
                                 zip(spec.frequencies, spec.psd, ref)))
        if sec.fit_band_per_ns is not None:
            fit = fit_power_law(spec, *map(float, sec.fit_band_per_ns))
            written.append(write_json(f"{stem}_fit.json", fit.as_dict()))
    if self_test:
        written.append(_power_law_self_test(cfg))
    return written


def _power_law_self_test(cfg) -> str:
    band = cfg.spectrum.fit_band_per_ns or [1e-3, 1.0]
    f = np.geomspace(band[0], band[1], 64)
    synthetic = Spectrum(f, SELF_TEST_C / f ** SELF_TEST_ALPHA)
    fit = fit_power_law(synthetic, *band)
    ok = abs(fit.alpha - SELF_TEST_ALPHA) < 1e-10 and abs(fit.c - SELF_TEST_C) < 1e-10 * SELF_TEST_C
    out = fit.as_dict()
    out.update(expected_c=SELF_TEST_C, expected_alpha=SELF_TEST_ALPHA, passed=bool(ok))
    path = write_json(f"{cfg.output_prefix}_spectrum_selftest.json", out)
    if not ok:
        raise RtnSimError(f"power-law self test failed: {out}")
    return path


def cmd_evolve(cfg) -> list:
    proto = cfg.protocol.build()
    grid = default_grid(proto.duration, cfg.ensemble.sample_step_ns)
    res = run_ensemble(proto, cfg.noise.params(), cfg.ensemble_config(tuple(grid)))
    path = f"{cfg.output_prefix}_evolve.csv"
    return [write_csv(path, ["t_ns", "ddse", "concurrence", "ddse_stderr"],
                      zip(res.times, res.ddse, res.concurrence, res.ddse_stderr))]


def cmd_sweep(cfg, mode: str | None = None) -> list:
    sec = cfg.sweep
    mode = mode or sec.mode
    noise = cfg.noise.params()
    ens = cfg.ensemble_config()
    if mode == "R":
        tau_prep = sec.tau_prep_ns if sec.tau_prep_ns is not None else cfg.protocol.tau_prep_ns
        rows = sweep_R(sec.values, tau_prep, noise, ens, cfg.protocol.db_mode)
    elif mode == "prep":
        R = sec.R if sec.R is not None else cfg.protocol.R
        rows = sweep_prep(sec.values, R, noise, ens, cfg.protocol.db_mode)
    else:
        raise configmod.ConfigError(f"sweep mode must be 'R' or 'prep', got {mode!r}")
    path = f"{cfg.output_prefix}_sweep_{mode}.csv"
    return [write_csv(path, ["swept_value", "max_concurrence", "t_star_ns", "stderr"],
                      [(r.swept_value, r.max_concurrence, r.t_star, r.stderr) for r in rows])]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtnsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", help="output path prefix (overrides output_prefix)")
        p.add_argument("--workers", type=int, help="worker threads (overrides config)")
        return p

    common(sub.add_parser("noise-trace", help="one RTN realization as CSV"))
    sp = common(sub.add_parser("spectrum", help="averaged RTN power spectrum"))
    sp.add_argument("--self-test", action="store_true",
                    help="also fit synthetic c/f^alpha data and check exact recovery")
    common(sub.add_parser("evolve", help="ensemble DDSE/concurrence versus time"))
    sw = common(sub.add_parser("sweep", help="maximum concurrence versus R or tau_prep"))
    sw.add_argument("--mode", choices=["R", "prep"], help="sweep variable (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = configmod.load(args.config)
        if args.out is not None:
            cfg.output_prefix = args.out
        if args.workers is not None:
            if args.workers < 1:
                raise configmod.ConfigError("--workers must be >= 1")
            cfg.workers = args.workers
        if args.command == "noise-trace":
            written = cmd_noise_trace(cfg)
        elif args.command == "spectrum":
            written = cmd_spectrum(cfg, self_test=args.self_test)
        elif args.command == "evolve":
            written = cmd_evolve(cfg)
        else:
            written = cmd_sweep(cfg, args.mode)
    except RtnSimError as exc:
        print(f"error category={exc.category} message={exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 2)
    except OSError as exc:
        where = exc.filename if exc.filename is not None else ""
        print(f"error category=io message={exc.strerror or exc}: {where}", file=sys.stderr)
        return EXIT_CODES["io"]
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
