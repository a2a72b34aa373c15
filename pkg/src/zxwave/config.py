"""Declarative run configuration (TOML)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:                       # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .harness import DEFAULT_BITS_PER_RAIL, SweepConfig
from .tables import bundled_coefficients, read_coefficient_matrix
from .zxmap import CoefficientSet

COEFF_SOURCES = ("table-mrx2", "table-mrx3", "file", "optimize-fresh")


@dataclass(frozen=True)
class SystemConfig:
    m_rx: int = 3
    t_symbol: float = 1.0
    f_c: float = 0.65                 # in units of 1/T
    eta_min: float = 0.95
    e0: float = 1.0
    n_t: int = 8
    n_u: int = 2


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig = SystemConfig()
    snr_grid_db: tuple = tuple(range(-10, 32, 2))
    bits_per_rail: int | None = None
    min_bits: int = 2_000_000
    min_errors: int = 200
    max_bits: int = 100_000_000
    master_seed: int = 1234
    channel_normalization: str = "frobenius"
    chaining: str = "raw"
    coeff_source: str = "table-mrx3"
    coeff_file: str | None = None
    output_dir: str = "out"
    psd_frames: int = 10_000
    psd_intervals: int = 120
    optimizer_seed: int = 20241
    optimizer_restarts: int = 64

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            snr_grid_db=tuple(self.snr_grid_db),
            n_t=self.system.n_t,
            n_u=self.system.n_u,
            bits_per_rail=self.bits_per_rail,
            min_bits=self.min_bits,
            min_errors=self.min_errors,
            max_bits=self.max_bits,
            master_seed=self.master_seed,
            e0=self.system.e0,
            f_c=self.system.f_c,
            t_symbol=self.system.t_symbol,
            channel_normalization=self.channel_normalization,
            chaining=self.chaining,
        )


def _take(table: dict, key: str, default):
    value = table.get(key, default)
    if default is not None and value is not None and not isinstance(value, type(default)):
        if isinstance(default, float) and isinstance(value, int):
            return float(value)
        if isinstance(default, tuple) and isinstance(value, list):
            return tuple(value)
        raise ConfigError(f"config key {key!r}: expected {type(default).__name__}, got {type(value).__name__}")
    if isinstance(value, list):
        return tuple(value)
    return value


def load_config(path) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    sys_tab = raw.get("system", {})
    system = SystemConfig(
        m_rx=_take(sys_tab, "m_rx", 3),
        t_symbol=_take(sys_tab, "t_symbol", 1.0),
        f_c=_take(sys_tab, "f_c", 0.65),
        eta_min=_take(sys_tab, "eta_min", 0.95),
        e0=_take(sys_tab, "e0", 1.0),
        n_t=_take(sys_tab, "n_t", 8),
        n_u=_take(sys_tab, "n_u", 2),
    )
    sweep = raw.get("sweep", {})
    run_tab = raw.get("run", {})
    coeff_source = _take(run_tab, "coeff_source", f"table-mrx{system.m_rx}")
    if coeff_source not in COEFF_SOURCES:
        raise ConfigError(f"coeff_source must be one of {COEFF_SOURCES}, got {coeff_source!r}")
    coeff_file = run_tab.get("coeff_file")
    if coeff_source == "file":
        if not coeff_file:
            raise ConfigError("coeff_source='file' requires coeff_file")
        if not os.path.exists(coeff_file):
            raise ConfigError(f"coefficient file not found: {coeff_file}")
    opt_tab = raw.get("optimizer", {})
    return RunConfig(
        system=system,
        snr_grid_db=_take(sweep, "snr_grid_db", tuple(range(-10, 32, 2))),
        bits_per_rail=sweep.get("bits_per_rail"),
        min_bits=_take(sweep, "min_bits", 2_000_000),
        min_errors=_take(sweep, "min_errors", 200),
        max_bits=_take(sweep, "max_bits", 100_000_000),
        master_seed=_take(sweep, "master_seed", 1234),
        channel_normalization=_take(sweep, "channel_normalization", "frobenius"),
        chaining=_take(sweep, "chaining", "raw"),
        coeff_source=coeff_source,
        coeff_file=coeff_file,
        output_dir=_take(run_tab, "output_dir", "out"),
        psd_frames=_take(run_tab, "psd_frames", 10_000),
        psd_intervals=_take(run_tab, "psd_intervals", 120),
        optimizer_seed=_take(opt_tab, "seed", 20241),
        optimizer_restarts=_take(opt_tab, "restarts", 64),
    )


def resolve_coefficients(cfg: RunConfig) -> CoefficientSet:
    """Coefficient set named by the config; 'optimize-fresh' is handled by the CLI."""
    source = cfg.coeff_source
    if source == "table-mrx2":
        coeffs = bundled_coefficients(2)
    elif source == "table-mrx3":
        coeffs = bundled_coefficients(3)
    elif source == "file":
        coeffs = read_coefficient_matrix(cfg.coeff_file, cfg.system.m_rx)
    else:
        raise ConfigError("optimize-fresh coefficients must be produced by the optimize command")
    if coeffs.params.m_rx != cfg.system.m_rx:
        raise ConfigError(
            f"coefficient source {source!r} is for m_rx={coeffs.params.m_rx}, "
            f"config says m_rx={cfg.system.m_rx}")
    return coeffs
