"""Analytic second-order statistics of the mapped stream.

The mapped sequence is block-cyclostationary; averaging the block phase gives
a stationary autocorrelation that follows directly from the Moore machine:
block correlations are Gamma' Pi Q^k Gamma, and sample-lag values interleave
two adjacent block correlations. The transmit spectrum is the sequence
spectrum shaped by the rectangular pulse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .zxmap import MooreMachine

#: band (in units of 1/T) over which spectra are reported and over which the
#: containment denominator integrates by default; see `containment`.
REPORT_BAND = 3.0

DEFAULT_ETA_GRID = 4097        # 4096 Simpson panels over [-f_c, f_c]
DEFAULT_PSD_GRID = 8193        # plotted band [-REPORT_BAND, REPORT_BAND]


@dataclass(frozen=True)
class Autocorrelation:
    """Sample-lag autocorrelation c_l for l = 0..L (even in l)."""

    values: np.ndarray
    q: int                      # block length of the underlying machine
    truncation_eps: float

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.values.size)

    @property
    def c0(self) -> float:
        return float(self.values[0])

    def value_at(self, lag: int) -> float:
        """c_|lag|; zero beyond the stored truncation point."""
        lag = abs(int(lag))
        return float(self.values[lag]) if lag < self.values.size else 0.0


@dataclass(frozen=True)
class FilterSpec:
    """Unit-energy rectangular pulse of width t_symbol / m_rx."""

    width: float
    kind: str = "rectangular"
    energy: float = 1.0

    def transfer_sq(self, freqs) -> np.ndarray:
        """|G(f)|^2 = width * sinc^2(f * width)."""
        return self.width * np.sinc(np.asarray(freqs) * self.width) ** 2


def rectangular_filter(t_symbol: float, m_rx: int) -> FilterSpec:
    return FilterSpec(width=t_symbol / m_rx)


@dataclass(frozen=True)
class PsdCurve:
    freqs: np.ndarray
    values: np.ndarray
    total_power: float          # exact closed form, c0 * m_rx / t_symbol
    containment: float | None = None


def block_correlation(machine: MooreMachine, kappa: int) -> np.ndarray:
    """q x q correlation matrix between block samples kappa blocks apart."""
    k = abs(int(kappa))
    step = np.linalg.matrix_power(machine.q_matrix, k)
    return machine.gamma.T @ (machine.pi[:, None] * (step @ machine.gamma))


def _block_correlations(machine: MooreMachine, n_blocks: int) -> np.ndarray:
    """R^k for k = 0..n_blocks, computed by repeated propagation."""
    gamma = machine.gamma
    weighted = machine.pi[:, None] * gamma
    out = np.empty((n_blocks + 1, machine.q, machine.q))
    prop = gamma
    for k in range(n_blocks + 1):
        out[k] = weighted.T @ prop
        prop = machine.q_matrix @ prop
    return out


def autocorrelation(machine: MooreMachine, l_max: int | None = None,
                    truncation_eps: float = 1e-14,
                    max_blocks: int = 128) -> Autocorrelation:
    """Average autocorrelation of the mapped stream.

    For lag l = k*q + r the value interleaves the in-block part of R^k with
    the spill-over into R^(k+1), averaged over the q block phases. When
    `l_max` is omitted the series is truncated at the first block multiple
    where the block correlation magnitude falls below `truncation_eps`
    (the chain mixes geometrically), capped at `max_blocks` blocks.
    """
    q = machine.q
    if l_max is not None:
        if l_max < q:
            raise ValueError(f"l_max must be at least the block length q={q}")
        n_blocks = int(np.ceil((l_max + 1) / q))
    else:
        n_blocks = max_blocks

    corr = _block_correlations(machine, n_blocks + 1)

    if l_max is None:
        # geometric mixing: stop once a whole block correlation is negligible
        mags = np.max(np.abs(corr), axis=(1, 2))
        below = np.nonzero(mags < truncation_eps)[0]
        n_blocks = int(below[0]) if below.size else max_blocks
        n_blocks = max(n_blocks, 1)
        n_lags = n_blocks * q
    else:
        n_lags = l_max + 1

    values = np.empty(n_lags)
    for lag in range(n_lags):
        k, r = divmod(lag, q)
        total = 0.0
        for i in range(1, q - r + 1):
            total += corr[k][i - 1, r + i - 1]
        for i in range(q - r + 1, q + 1):
            total += corr[k + 1][i - 1, r + i - q - 1]
        values[lag] = total / q
    return Autocorrelation(values=values, q=q, truncation_eps=truncation_eps)


def sequence_psd(autocorr: Autocorrelation, freqs, m_rx: int,
                 t_symbol: float = 1.0) -> np.ndarray:
    """Spectrum of the sample stream: (m_rx/T) * sum_l c_l cos(2 pi l T f / m_rx).

    c_l is real and even, so the exponential series reduces to cosines.
    """
    freqs = np.asarray(freqs, dtype=float)
    c = autocorr.values
    lags = np.arange(1, c.size)
    phases = 2.0 * np.pi * np.outer(freqs, lags) * (t_symbol / m_rx)
    return (m_rx / t_symbol) * (c[0] + 2.0 * (np.cos(phases) @ c[1:]))


def analytic_psd(autocorr: Autocorrelation, filt: FilterSpec, freq_grid,
                 m_rx: int, t_symbol: float = 1.0) -> PsdCurve:
    """Transmit-signal PSD: sequence spectrum times the pulse energy spectrum.

    The total power has the closed form c0 * m_rx / T because the unit-energy
    rectangular pulse is orthogonal to its own shifts by multiples of T/m_rx.
    """
    freqs = np.asarray(freq_grid, dtype=float)
    if not np.allclose(freqs, -freqs[::-1], atol=1e-12):
        raise ValueError("frequency grid must be symmetric about 0")
    s_x = sequence_psd(autocorr, freqs, m_rx, t_symbol)
    values = s_x * filt.transfer_sq(freqs)
    total = autocorr.c0 * m_rx / t_symbol
    return PsdCurve(freqs=freqs, values=values, total_power=total)


def _symmetric_band_power(autocorr: Autocorrelation, filt: FilterSpec, m_rx: int,
                          t_symbol: float, f_lim: float, n_points: int) -> float:
    freqs = np.linspace(-f_lim, f_lim, n_points)
    s = sequence_psd(autocorr, freqs, m_rx, t_symbol) * filt.transfer_sq(freqs)
    return float(simpson(s, x=freqs))


def containment(autocorr: Autocorrelation, filt: FilterSpec, f_c: float,
                m_rx: int, t_symbol: float = 1.0,
                reference_band: float | None = REPORT_BAND,
                grid_points: int = DEFAULT_ETA_GRID) -> float:
    """Fraction of transmit power within [-f_c, f_c].

    The numerator is a composite-Simpson integral of the PSD. The denominator
    is the power inside the fixed reference band `reference_band`/T (the
    band over which spectra are reported); passing ``reference_band=None``
    normalizes by the exact infinite-band total c0 * m_rx / T instead. The
    reference-band convention is what the bundled coefficient sets were
    designed against; see the README for the distinction.
    """
    if f_c <= 0:
        raise ValueError("f_c must be positive")
    inband = _symmetric_band_power(autocorr, filt, m_rx, t_symbol, f_c, grid_points)
    if reference_band is None:
        total = autocorr.c0 * m_rx / t_symbol
    else:
        ref = reference_band / t_symbol
        if f_c > ref:
            raise ValueError(f"f_c={f_c} lies outside the reference band {ref}")
        total = _symmetric_band_power(autocorr, filt, m_rx, t_symbol, ref,
                                      max(grid_points, DEFAULT_PSD_GRID))
    return inband / total


def psd_to_rows(curve: PsdCurve, t_symbol: float = 1.0):
    """CSV rows (f*T, linear PSD, dB normalized to the peak)."""
    peak = float(np.max(curve.values))
    floor = peak * 1e-300
    db = 10.0 * np.log10(np.maximum(curve.values, floor) / peak)
    for f, lin, d in zip(curve.freqs, curve.values, db):
        yield f * t_symbol, lin, d
