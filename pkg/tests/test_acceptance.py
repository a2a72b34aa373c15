"""Acceptance gate: every criterion prints one pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`. The Monte-Carlo criteria are
deterministic for the seeds fixed here.
"""

import itertools
import time

import numpy as np
import pytest

from zxwave.detector import DetectionWindow, detect_block
from zxwave.harness import SweepConfig, ber_sweep, empirical_psd
from zxwave.optimizer import DesignProblem, SearchConfig, evaluate, solve
from zxwave.spectrum import (analytic_psd, autocorrelation, containment,
                             rectangular_filter)
from zxwave.tables import bundled_coefficients
from zxwave.zxmap import build_machine, encode, sign_codebook, zx_params

MASTER_SEED = 20250

# published operating points: snr_db -> (ber, relative tolerance)
BER_TARGETS_MRX3 = {0.0: (0.292285833333333, 0.05),
                    10.0: (0.0627008333333333, 0.10),
                    16.0: (0.00342583333333333, 0.15)}
BER_TARGETS_MRX2 = {0.0: (0.259522222222222, 0.05),
                    10.0: (0.00698888888888889, 0.15)}
ORDERING_SNRS = (0.0, 4.0, 8.0, 12.0)


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" -- {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def ber_curves():
    curves = {}
    for m_rx, targets in ((3, BER_TARGETS_MRX3), (2, BER_TARGETS_MRX2)):
        grid = sorted(set(targets) | set(ORDERING_SNRS))
        config = SweepConfig(snr_grid_db=tuple(grid), min_bits=2_000_000,
                             min_errors=200, master_seed=MASTER_SEED + m_rx)
        curves[m_rx] = ber_sweep(config, bundled_coefficients(m_rx))
    return curves


def test_table_feasibility():
    t0 = time.perf_counter()
    t5 = bundled_coefficients(3)
    rep5 = evaluate(t5, DesignProblem(params=t5.params))
    ok = (0.999 <= rep5.norm_sq <= 1.001 and t5.min_entry == 0.1
          and rep5.eta >= 0.95)
    t4 = bundled_coefficients(2)
    rep4 = evaluate(t4, DesignProblem(params=t4.params))
    ok = ok and t4.min_entry == 0.1 and rep4.eta >= 0.95 and t4.g.size == 32
    report("table feasibility", ok,
           f"mrx3: |g|^2={rep5.norm_sq:.6f} eta={rep5.eta:.4f}; "
           f"mrx2: eta={rep4.eta:.4f} ({time.perf_counter() - t0:.2f}s)")


def test_autocorrelation_oracle():
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    for m_rx in (2, 3):
        coeffs = bundled_coefficients(m_rx)
        params = coeffs.params
        machine = build_machine(params, coeffs)
        ac = autocorrelation(machine)
        n_samples = 1_000_000
        n_blocks = n_samples // params.q + 1
        frame = encode(rng.integers(0, 2, n_blocks * params.bits_per_block),
                       +1, coeffs)
        s = frame.coeffs
        for lag in range(4 * params.q + 1):
            emp = np.dot(s[:s.size - lag], s[lag:]) / (s.size - lag)
            worst = max(worst, abs(emp - ac.value_at(lag)))
    machine3 = build_machine(zx_params(3), bundled_coefficients(3))
    c0 = autocorrelation(machine3).c0
    closed = bundled_coefficients(3).norm_sq / 12.0
    ok = worst < 1e-3 and abs(c0 - closed) < 1e-12
    report("autocorrelation oracle", ok,
           f"max |analytic-empirical| = {worst:.2e}; |c0 - closed| = {abs(c0 - closed):.1e}")


def test_ber_reproduction(ber_curves):
    lines = []
    ok = True
    for m_rx, targets in ((3, BER_TARGETS_MRX3), (2, BER_TARGETS_MRX2)):
        by_snr = {p.snr_db: p for p in ber_curves[m_rx].points}
        for snr, (target, tol) in targets.items():
            p = by_snr[snr]
            rel = p.ber / target - 1.0
            point_ok = abs(rel) <= tol and p.bits >= 2_000_000 and p.errors >= 200
            ok = ok and point_ok
            lines.append(f"mrx{m_rx}@{snr:g}dB: {p.ber:.4e} vs {target:.4e} "
                         f"({rel:+.1%}, tol {tol:.0%})")
    report("ber reproduction", ok, "; ".join(lines))


def test_ber_ordering(ber_curves):
    by2 = {p.snr_db: p for p in ber_curves[2].points}
    by3 = {p.snr_db: p for p in ber_curves[3].points}
    ok = True
    lines = []
    for snr in ORDERING_SNRS:
        p2, p3 = by2[snr], by3[snr]
        ok = ok and p2.ber <= p3.ber and min(p2.bits, p3.bits) >= 1_000_000
        lines.append(f"{snr:g}dB: {p2.ber:.3e} <= {p3.ber:.3e}")
    report("ber ordering (mrx2 <= mrx3)", ok, "; ".join(lines))


def test_psd_agreement():
    t0 = time.perf_counter()
    coeffs = bundled_coefficients(3)
    rng = np.random.default_rng(MASTER_SEED + 7)
    est = empirical_psd(coeffs, 10_000, rng)
    band = np.abs(est.freqs) <= 0.65
    dev = float(np.abs(est.empirical_db[band] - est.analytic_db[band]).max())

    machine = build_machine(coeffs.params, coeffs)
    ac = autocorrelation(machine)
    filt = rectangular_filter(1.0, 3)
    from scipy.integrate import simpson
    freqs = np.linspace(-40.0, 40.0, 2 ** 17 + 1)
    curve = analytic_psd(ac, filt, freqs, m_rx=3)
    numeric = float(simpson(curve.values, x=freqs))
    power_rel = abs(numeric / curve.total_power - 1.0)
    ok = dev <= 1.0 and power_rel <= 0.005
    report("psd agreement", ok,
           f"max in-band dev {dev:.3f} dB; wide-band power off by {power_rel:.2%} "
           f"({time.perf_counter() - t0:.1f}s)")


def test_optimizer_reproduction():
    t0 = time.perf_counter()
    problem = DesignProblem(params=zx_params(3))   # budget 1, eta 0.95, fc 0.65
    solution = solve(problem, SearchConfig())
    elapsed = time.perf_counter() - t0
    ok = solution.feasible and solution.gamma >= 0.0999 and elapsed < 300
    report("optimizer reproduction", ok,
           f"gamma={solution.gamma:.4f} eta={solution.eta:.4f} "
           f"feasible={solution.feasible} in {elapsed:.0f}s")


@pytest.mark.parametrize("m_rx", [2, 3])
def test_noise_free_loopback(m_rx):
    coeffs = bundled_coefficients(m_rx)
    bits_per_frame = 2 * SweepConfig.rail_bits(
        SweepConfig(snr_grid_db=(0.0,)), m_rx)
    config = SweepConfig(snr_grid_db=(0.0,), noiseless=True,
                         min_bits=10_000 * bits_per_frame * 2, min_errors=0,
                         master_seed=MASTER_SEED + 11, batch_frames=512)
    curve = ber_sweep(config, coeffs)
    point = curve.points[0]
    frames = point.bits // (2 * bits_per_frame)
    ok = point.errors == 0 and frames >= 10_000
    report(f"noise-free loopback (m_rx={m_rx})", ok,
           f"{frames} frames, {point.errors} bit errors")


@pytest.mark.parametrize("m_rx", [2, 3])
def test_exhaustive_detector_enumeration(m_rx):
    params = zx_params(m_rx)
    ok = True
    for polarity in (-1, 1):
        codebook = sign_codebook(params, polarity)
        valid = {tuple(cw.tolist()) for _, cw in codebook}
        for combo in itertools.product((-1, 1), repeat=params.q):
            window = DetectionWindow(rho_prev=polarity,
                                     block_signs=np.array(combo))
            first = detect_block(window, codebook)
            second = detect_block(window, codebook)
            deterministic = (first.label == second.label
                             and first.distance == second.distance)
            soundness = (first.distance == 0) == (combo in valid)
            ok = ok and deterministic and soundness
    report(f"exhaustive detector enumeration (m_rx={m_rx})", ok,
           f"{2 ** params.q} windows per polarity")
