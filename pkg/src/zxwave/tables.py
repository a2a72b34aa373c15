"""Bundled coefficient sets and literature reference curves.

The coefficient sets are the spectrally-contained designs used throughout the
test and acceptance suites: unit energy budget, containment floor 0.95 at
f_c = 0.65/T, minimum entry 0.1. Reference BER curves for the comparison
methods ship as CSV files under ``data/`` and are plotting-only inputs.
"""

from __future__ import annotations

import csv
from importlib import resources

import numpy as np

from .errors import ConfigError
from .zxmap import CoefficientSet, zx_params

# m_rx = 3: 4 patterns x 3 samples, ||G||^2 ~ 1.0, min entry 0.1
MRX3_COEFFS = np.array(
    [
        [0.4566, 0.4809, 0.4006],
        [0.2631, 0.1000, 0.1014],
        [0.1334, 0.1000, 0.2312],
        [0.1000, 0.2875, 0.3692],
    ]
)

# m_rx = 2: 8 patterns x 4 samples, ||G||^2 ~ 1.0, min entry 0.1
MRX2_COEFFS = np.array(
    [
        [0.2719, 0.3751, 0.3715, 0.2378],
        [0.2081, 0.2129, 0.1000, 0.1000],
        [0.1719, 0.1000, 0.1000, 0.1440],
        [0.1000, 0.1000, 0.1832, 0.1572],
        [0.1000, 0.1000, 0.1000, 0.1000],
        [0.1000, 0.2030, 0.1000, 0.1000],
        [0.1000, 0.2507, 0.2551, 0.1655],
        [0.1000, 0.1000, 0.1000, 0.1647],
    ]
)


def bundled_coefficients(m_rx: int) -> CoefficientSet:
    params = zx_params(m_rx)
    if m_rx == 3:
        return CoefficientSet(g=MRX3_COEFFS.copy(), params=params)
    if m_rx == 2:
        return CoefficientSet(g=MRX2_COEFFS.copy(), params=params)
    raise ConfigError(f"no bundled coefficients for m_rx={m_rx}")


#: reference BER curves (literature comparison data, for plotting only)
REFERENCE_CURVES = (
    "reference_ber_mrx2_proposed.csv",
    "reference_ber_mrx3_proposed.csv",
    "reference_ber_mrx3_mmddt.csv",
    "reference_ber_mrx3_zx_random.csv",
    "reference_ber_mrx3_zx_golay.csv",
)


def reference_curve(name: str) -> tuple[np.ndarray, np.ndarray]:
    """Load one bundled reference curve as (snr_db, ber) arrays."""
    if name not in REFERENCE_CURVES:
        raise ConfigError(f"unknown reference curve {name!r}")
    text = resources.files("zxwave.data").joinpath(name).read_text()
    rows = list(csv.DictReader(text.splitlines()))
    snr = np.array([float(r["snr_db"]) for r in rows])
    ber = np.array([float(r["ber"]) for r in rows])
    return snr, ber


def export_reference_curves(directory) -> list[str]:
    """Copy the bundled reference CSVs into a directory; returns the paths."""
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    for name in REFERENCE_CURVES:
        text = resources.files("zxwave.data").joinpath(name).read_text()
        path = os.path.join(directory, name)
        with open(path, "w") as fh:
            fh.write(text)
        written.append(path)
    return written


def read_coefficient_matrix(path, m_rx: int) -> CoefficientSet:
    """Read the plain-text matrix format: one row per pattern, space-separated."""
    params = zx_params(m_rx)
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.split()])
    g = np.array(rows, dtype=float)
    if g.shape != (params.n_patterns, params.q):
        raise ConfigError(
            f"coefficient file {path}: shape {g.shape}, expected "
            f"({params.n_patterns}, {params.q}) for m_rx={m_rx}")
    return CoefficientSet(g=g, params=params)


def write_coefficient_matrix(path, coeffs: CoefficientSet) -> None:
    with open(path, "w") as fh:
        for row in coeffs.g:
            fh.write(" ".join(f"{v:.10g}" for v in row) + "\n")
