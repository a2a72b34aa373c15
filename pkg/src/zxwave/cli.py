"""Command-line entry point.

Subcommands: optimize, validate-tables, ber, psd, report. All artifacts are
written atomically into the configured output directory; summary.json echoes
the fully resolved configuration so a run can be reproduced from its outputs.

Exit codes: 0 success, 2 configuration error, 3 infeasible coefficients,
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from . import harness, io, optimizer, spectrum, tables
from .config import RunConfig, load_config, resolve_coefficients
from .errors import ConfigError, InfeasibleError
from .harness import SweepConfig, containment_report
from .optimizer import DesignProblem, SearchConfig
from .zxmap import build_machine, zx_params

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _echo_config(cfg: RunConfig) -> dict:
    payload = dataclasses.asdict(cfg)
    payload["system"] = dataclasses.asdict(cfg.system)
    return payload


def _summary(cfg: RunConfig, extra: dict) -> dict:
    out = {"config": _echo_config(cfg)}
    out.update(extra)
    return out


def _load(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return RunConfig()


def cmd_validate_tables(args) -> int:
    for m_rx in args.m_rx:
        coeffs = tables.bundled_coefficients(m_rx)
        problem = DesignProblem(params=coeffs.params)
        report = optimizer.verify_table(problem, coeffs)
        status = "feasible" if report.feasible else "INFEASIBLE"
        print(f"m_rx={m_rx}: gamma={report.gamma:.4g} norm_sq={report.norm_sq:.6f} "
              f"eta={report.eta:.4f} ({status})")
        if not report.feasible:
            return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load(args)
    params = zx_params(cfg.system.m_rx)
    problem = DesignProblem(params=params, f_c=cfg.system.f_c,
                            eta_min=cfg.system.eta_min,
                            t_symbol=cfg.system.t_symbol)
    search = SearchConfig(seed=cfg.optimizer_seed, n_restarts=cfg.optimizer_restarts)
    t0 = time.perf_counter()
    solution = optimizer.solve(problem, search)
    runtime = time.perf_counter() - t0
    os.makedirs(cfg.output_dir, exist_ok=True)
    coeff_path = os.path.join(cfg.output_dir, f"coefficients_mrx{params.m_rx}.txt")
    tables.write_coefficient_matrix(coeff_path, solution.coeffs)
    io.write_json(os.path.join(cfg.output_dir, "design.json"), _summary(cfg, {
        "gamma": solution.gamma,
        "eta": solution.eta,
        "norm_sq": solution.norm_sq,
        "feasible": solution.feasible,
        "evaluations": solution.search_log.evaluations,
        "coefficients": solution.coeffs.g.tolist(),
        "runtime_s": runtime,
    }))
    print(f"gamma={solution.gamma:.5f} eta={solution.eta:.4f} "
          f"norm_sq={solution.norm_sq:.6f} feasible={solution.feasible} "
          f"({runtime:.1f}s, {solution.search_log.evaluations} evaluations)")
    if not solution.feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_ber(args) -> int:
    cfg = _load(args)
    coeffs = resolve_coefficients(cfg)
    sweep = cfg.sweep_config()
    curve = harness.ber_sweep(sweep, coeffs, jobs=args.jobs)
    rows = [(p.snr_db, p.bits, p.errors, p.ber, p.ci_lo, p.ci_hi) for p in curve.points]
    path = os.path.join(cfg.output_dir, "ber.csv")
    io.write_csv(path, ("snr_db", "bits", "errors", "ber", "ci_lo", "ci_hi"), rows)
    report = containment_report(coeffs, cfg.system.f_c, cfg.system.t_symbol)
    io.write_json(os.path.join(cfg.output_dir, "summary.json"), _summary(cfg, {
        "eta": report.eta,
        "total_power": report.total_power,
        "gamma": coeffs.min_entry,
        "runtime_s": curve.runtime_s,
        "ber_csv": path,
    }))
    print(f"wrote {path} ({len(rows)} points, {curve.runtime_s:.1f}s)")
    return EXIT_OK


def cmd_psd(args) -> int:
    cfg = _load(args)
    if args.m_rx is not None:
        cfg = dataclasses.replace(
            cfg,
            system=dataclasses.replace(cfg.system, m_rx=args.m_rx),
            coeff_source=f"table-mrx{args.m_rx}")
    if args.frames is not None:
        cfg = dataclasses.replace(cfg, psd_frames=args.frames)
    coeffs = resolve_coefficients(cfg)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, 999]))
    est = harness.empirical_psd(coeffs, cfg.psd_frames, rng,
                                n_intervals=cfg.psd_intervals,
                                t_symbol=cfg.system.t_symbol)
    rows = [(f * cfg.system.t_symbol, a, e)
            for f, a, e in zip(est.freqs, est.analytic_db, est.empirical_db)]
    path = os.path.join(cfg.output_dir, "psd.csv")
    io.write_csv(path, ("f_t", "analytic_db", "empirical_db"), rows)

    machine = build_machine(coeffs.params, coeffs)
    ac = spectrum.autocorrelation(machine)
    filt = spectrum.rectangular_filter(cfg.system.t_symbol, coeffs.params.m_rx)
    grid = np.linspace(-spectrum.REPORT_BAND, spectrum.REPORT_BAND,
                       spectrum.DEFAULT_PSD_GRID) / cfg.system.t_symbol
    curve = spectrum.analytic_psd(ac, filt, grid, coeffs.params.m_rx,
                                  cfg.system.t_symbol)
    apath = os.path.join(cfg.output_dir, "psd_analytic.csv")
    io.write_csv(apath, ("f_t", "psd_linear", "psd_db"),
                 spectrum.psd_to_rows(curve, cfg.system.t_symbol))
    print(f"wrote {path} and {apath} ({est.n_frames} frames)")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _load(args)
    coeffs = resolve_coefficients(cfg)
    problem = DesignProblem(params=coeffs.params, f_c=cfg.system.f_c,
                            eta_min=cfg.system.eta_min,
                            t_symbol=cfg.system.t_symbol,
                            energy_budget=max(coeffs.norm_sq, 1.0))
    rep = optimizer.evaluate(coeffs, problem)
    cont = containment_report(coeffs, cfg.system.f_c, cfg.system.t_symbol)
    refs = tables.export_reference_curves(os.path.join(cfg.output_dir, "reference"))
    io.write_json(os.path.join(cfg.output_dir, "summary.json"), _summary(cfg, {
        "gamma": rep.gamma,
        "eta": rep.eta,
        "norm_sq": rep.norm_sq,
        "feasible": rep.feasible,
        "total_power": cont.total_power,
        "inband_power": cont.inband_power,
        "reference_curves": refs,
    }))
    print(f"gamma={rep.gamma:.4g} eta={rep.eta:.4f} feasible={rep.feasible}; "
          f"{len(refs)} reference curves exported")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zxwave",
        description="Zero-crossing waveform design and 1-bit MIMO link simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate-tables", help="check the bundled coefficient sets")
    p_val.add_argument("--m-rx", type=int, nargs="+", default=[2, 3], dest="m_rx")
    p_val.set_defaults(func=cmd_validate_tables)

    p_opt = sub.add_parser("optimize", help="solve the coefficient design problem")
    p_opt.add_argument("--config", help="TOML run configuration")
    p_opt.set_defaults(func=cmd_optimize)

    p_ber = sub.add_parser("ber", help="Monte-Carlo BER sweep")
    p_ber.add_argument("--config", help="TOML run configuration")
    p_ber.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_ber.set_defaults(func=cmd_ber)

    p_psd = sub.add_parser("psd", help="empirical vs analytic spectrum")
    p_psd.add_argument("--config", help="TOML run configuration")
    p_psd.add_argument("--m-rx", type=int, default=None, dest="m_rx")
    p_psd.add_argument("--frames", type=int, default=None)
    p_psd.set_defaults(func=cmd_psd)

    p_rep = sub.add_parser("report", help="containment summary + reference data export")
    p_rep.add_argument("--config", help="TOML run configuration")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
