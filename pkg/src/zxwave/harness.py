"""Monte-Carlo BER sweeps and empirical spectrum estimation.

Frame geometry follows the bits-per-frame convention: each user's complex
frame carries `bits_per_rail` bits on each of its two rails (blocks dealt
alternately real/imaginary by the encoder), one fresh channel realization per
frame. Every SNR point runs from its own seed derived from the master seed,
so curves are reproducible point by point regardless of execution order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import mimosim, spectrum
from .detector import detect_complex
from .errors import InfeasibleError
from .optimizer import DesignProblem, evaluate
from .zxmap import CoefficientSet, build_machine, encode_complex

#: bits carried by one rail of one user's frame (30 Nyquist intervals)
DEFAULT_BITS_PER_RAIL = {2: 45, 3: 60}


@dataclass(frozen=True)
class SweepConfig:
    snr_grid_db: tuple
    n_t: int = 8
    n_u: int = 2
    bits_per_rail: int | None = None       # default per oversampling factor
    min_bits: int = 2_000_000
    min_errors: int = 200
    max_bits: int = 100_000_000
    master_seed: int = 1234
    e0: float = 1.0
    f_c: float = 0.65
    t_symbol: float = 1.0
    channel_normalization: str = "frobenius"
    chaining: str = "raw"
    batch_frames: int = 256
    noiseless: bool = False                # diagnostic: zero noise injection

    def rail_bits(self, m_rx: int) -> int:
        if self.bits_per_rail is not None:
            return self.bits_per_rail
        return DEFAULT_BITS_PER_RAIL[m_rx]


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits: int
    errors: int
    ber: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class BerCurve:
    points: tuple
    config: SweepConfig
    runtime_s: float


@dataclass(frozen=True)
class EmpiricalPsd:
    freqs: np.ndarray             # physical frequency (units 1/T)
    empirical_db: np.ndarray      # peak-normalized
    analytic_db: np.ndarray       # Eq-style transmit PSD on the same bins
    n_frames: int


@dataclass(frozen=True)
class ContainmentReport:
    eta: float
    total_power: float            # exact closed form
    inband_power: float


def wilson_interval(errors: int, bits: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval for the error probability."""
    if bits == 0:
        return 0.0, 1.0
    p = errors / bits
    denom = 1 + z ** 2 / bits
    center = (p + z ** 2 / (2 * bits)) / denom
    half = z * np.sqrt(p * (1 - p) / bits + z ** 2 / (4 * bits ** 2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def frame_geometry(coeffs: CoefficientSet, bits_per_rail: int) -> tuple[int, int]:
    """(n_intervals, n_tot) per rail for the given bit load."""
    params = coeffs.params
    if bits_per_rail % params.bits_per_block != 0:
        raise ValueError(f"bits_per_rail={bits_per_rail} is not a whole number of "
                         f"{params.bits_per_block}-bit blocks")
    n_blocks = bits_per_rail // params.bits_per_block
    n_tot = n_blocks * params.q
    if n_tot % params.m_rx != 0:
        raise ValueError("frame does not tile the Nyquist grid")
    return n_tot // params.m_rx, n_tot


def _point_rng(master_seed: int, point_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, point_index]))


def _simulate_point(config: SweepConfig, coeffs: CoefficientSet, snr_db: float,
                    point_index: int) -> BerPoint:
    params = coeffs.params
    n_intervals, n_tot = frame_geometry(coeffs, config.rail_bits(params.m_rx))
    noise = mimosim.snr_to_n0(config.e0, snr_db, n_intervals, config.t_symbol,
                              config.f_c)
    if config.noiseless:
        noise = mimosim.NoiseSpec(n0=0.0, per_sample_variance=0.0)
    rng = _point_rng(config.master_seed, point_index)
    bits_per_frame = 2 * config.rail_bits(params.m_rx)   # per user

    bits_total = 0
    errors_total = 0
    while True:
        for _ in range(config.batch_frames):
            channel = mimosim.generate_channel(
                rng, config.n_u, config.n_t,
                normalization=config.channel_normalization)
            tx_bits = []
            frames = []
            for _u in range(config.n_u):
                b = rng.integers(0, 2, bits_per_frame)
                tx_bits.append(b)
                frames.append(encode_complex(b, coeffs))
            received = mimosim.transmit_frame(frames, channel, noise, rng,
                                              config.e0, coeffs)
            for b, rx in zip(tx_bits, received):
                decoded = detect_complex(rx.signs, params, chaining=config.chaining)
                errors_total += int(np.sum(decoded != b))
                bits_total += b.size
        if bits_total >= config.max_bits:
            break
        if bits_total >= config.min_bits and errors_total >= config.min_errors:
            break
        if config.noiseless and bits_total >= config.min_bits:
            break
    lo, hi = wilson_interval(errors_total, bits_total)
    return BerPoint(snr_db=snr_db, bits=bits_total, errors=errors_total,
                    ber=errors_total / bits_total, ci_lo=lo, ci_hi=hi)


def ber_sweep(config: SweepConfig, coeffs: CoefficientSet,
              check_feasibility: bool = True, jobs: int = 1) -> BerCurve:
    """Monte-Carlo BER across the SNR grid.

    Refuses to run infeasible coefficient sets (guards against comparing
    designs that do not meet the spectral contract). Points are independent
    work items with derived seeds; `jobs > 1` runs them in worker processes.
    """
    if check_feasibility:
        problem = DesignProblem(params=coeffs.params, f_c=config.f_c,
                                t_symbol=config.t_symbol,
                                energy_budget=max(coeffs.norm_sq, 1.0))
        report = evaluate(coeffs, problem)
        if not report.feasible:
            raise InfeasibleError(
                f"coefficient set infeasible (eta={report.eta:.4f} < {problem.eta_min})")
    t0 = time.perf_counter()
    tasks = list(enumerate(config.snr_grid_db))
    if jobs > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_simulate_point, config, coeffs, snr, idx)
                       for idx, snr in tasks]
            points = [f.result() for f in futures]
    else:
        points = [_simulate_point(config, coeffs, snr, idx) for idx, snr in tasks]
    return BerCurve(points=tuple(points), config=config,
                    runtime_s=time.perf_counter() - t0)


def empirical_psd(coeffs: CoefficientSet, n_frames: int, rng,
                  n_intervals: int = 120, fine_factor: int = 3,
                  t_symbol: float = 1.0) -> EmpiricalPsd:
    """Averaged periodogram of the transmit waveform vs the analytic curve.

    Each frame contributes both rails of one user. The waveform is the
    rectangular-pulse synthesis of the mapped samples on a `fine_factor` x
    grid, transformed with a bare DFT and averaged as |F|^2 / n_samples;
    both curves are reported in dB normalized to their own peak.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be positive")
    params = coeffs.params
    m_rx = params.m_rx
    n_tot = n_intervals * m_rx
    if n_tot % params.q != 0:
        raise ValueError("frame length must be a whole number of blocks")
    n_blocks = n_tot // params.q
    bits_per_frame = 2 * n_blocks * params.bits_per_block

    nfft = n_tot * fine_factor
    acc = np.zeros(nfft)
    for _ in range(n_frames):
        bits = rng.integers(0, 2, bits_per_frame)
        real, imag = encode_complex(bits, coeffs)
        for rail in (real, imag):
            waveform = np.repeat(rail.coeffs, fine_factor)
            acc += np.abs(np.fft.fft(waveform)) ** 2
    periodogram = np.fft.fftshift(acc) / (2.0 * n_frames * n_tot)
    freqs = np.fft.fftshift(np.fft.fftfreq(nfft, d=t_symbol / (m_rx * fine_factor)))

    machine = build_machine(params, coeffs)
    ac = spectrum.autocorrelation(machine)
    filt = spectrum.rectangular_filter(t_symbol, m_rx)
    # DFT bins of an even-length transform are not symmetric about 0, so the
    # analytic curve is evaluated directly instead of through analytic_psd
    analytic = spectrum.sequence_psd(ac, freqs, m_rx, t_symbol) * filt.transfer_sq(freqs)

    emp_db = 10.0 * np.log10(periodogram / periodogram.max())
    ana = np.maximum(analytic, analytic.max() * 1e-300)
    ana_db = 10.0 * np.log10(ana / ana.max())
    return EmpiricalPsd(freqs=freqs, empirical_db=emp_db, analytic_db=ana_db,
                        n_frames=n_frames)


def containment_report(coeffs: CoefficientSet, f_c: float = 0.65,
                       t_symbol: float = 1.0,
                       reference_band: float | None = spectrum.REPORT_BAND) -> ContainmentReport:
    machine = build_machine(coeffs.params, coeffs)
    ac = spectrum.autocorrelation(machine)
    filt = spectrum.rectangular_filter(t_symbol, coeffs.params.m_rx)
    eta = spectrum.containment(ac, filt, f_c, coeffs.params.m_rx, t_symbol,
                               reference_band=reference_band)
    total = ac.c0 * coeffs.params.m_rx / t_symbol
    inband = spectrum._symmetric_band_power(ac, filt, coeffs.params.m_rx,
                                            t_symbol, f_c,
                                            spectrum.DEFAULT_ETA_GRID)
    return ContainmentReport(eta=eta, total_power=total, inband_power=inband)
