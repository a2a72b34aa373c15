"""Per-rail block detection by minimum Hamming distance over valid codewords.

Each received block is scored against the sign codebook for its entering
polarity; the window conceptually prepends the previous block's last received
sample, which matches the codebook's own leading polarity and therefore never
contributes to the distance. Ties resolve to the lowest codeword index. The
running polarity defaults to the raw received sample (`chaining="raw"`); the
variant that chains the detected codeword's last sign is kept for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .zxmap import (ZxParams, build_sign_tables, interleave_rail_bits,
                    rows_to_bits, sign_codebook)

CHAINING_MODES = ("raw", "detected")


@dataclass(frozen=True)
class DetectionWindow:
    rho_prev: int                  # last sample of the previous block (or pilot)
    block_signs: np.ndarray        # length-q sign vector


@dataclass(frozen=True)
class BlockDecision:
    label: str
    codeword: np.ndarray
    distance: int


def hamming(a, b) -> int:
    """Number of disagreeing positions between two sign vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.sum(a != b))


def detect_block(window: DetectionWindow, codebook) -> BlockDecision:
    """Minimum-distance decision for one block against one polarity's codebook."""
    distances = [hamming(window.block_signs, cw) for _, cw in codebook]
    best = int(np.argmin(distances))           # first occurrence wins ties
    label, codeword = codebook[best]
    return BlockDecision(label=label, codeword=codeword, distance=distances[best])


def _detect_rows_raw(blocks: np.ndarray, rho_b: int, signs: np.ndarray) -> np.ndarray:
    # raw chaining reads the entering polarity straight off the received
    # stream, so every block decides independently
    q = signs.shape[1]
    rho_prev = np.concatenate(([rho_b], blocks[:-1, -1]))
    corr = blocks @ signs.T
    dist = np.where(rho_prev[:, None] > 0, (q - corr) / 2, (q + corr) / 2)
    return np.argmin(dist, axis=1)


def _detect_rows_chained(blocks: np.ndarray, rho_b: int, signs: np.ndarray) -> np.ndarray:
    q = signs.shape[1]
    corr = blocks @ signs.T
    rows = np.empty(blocks.shape[0], dtype=np.intp)
    polarity = rho_b
    for j in range(blocks.shape[0]):
        dist = (q - corr[j]) / 2 if polarity > 0 else (q + corr[j]) / 2
        r = int(np.argmin(dist))
        rows[j] = r
        polarity = polarity * int(signs[r, -1])
    return rows


def detect_frame(signs_seq, rho_b: int, params: ZxParams,
                 chaining: str = "raw") -> np.ndarray:
    """Decode one rail's sign sequence back to bits."""
    if chaining not in CHAINING_MODES:
        raise ValueError(f"unknown chaining mode {chaining!r}")
    if rho_b not in (-1, 1):
        raise ValueError("rho_b must be -1 or +1")
    seq = np.asarray(signs_seq, dtype=float)
    q = params.q
    if seq.size % q != 0:
        raise ValueError(f"sequence length {seq.size} is not a multiple of the block length {q}")
    blocks = seq.reshape(-1, q)
    table = build_sign_tables(params)
    signs = table.signs.astype(float)
    if chaining == "raw":
        rows = _detect_rows_raw(blocks, rho_b, signs)
    else:
        rows = _detect_rows_chained(blocks, rho_b, signs)
    return rows_to_bits(rows, params)


def detect_complex(received_signs: np.ndarray, params: ZxParams,
                   rho_b_real: int = 1, rho_b_imag: int = 1,
                   chaining: str = "raw") -> np.ndarray:
    """Decode both rails of a complex frame and restore the encoder's bit order."""
    real_bits = detect_frame(received_signs.real, rho_b_real, params, chaining)
    imag_bits = detect_frame(received_signs.imag, rho_b_imag, params, chaining)
    return interleave_rail_bits(real_bits, imag_bits, params)


def full_codebook(params: ZxParams, entering_polarity: int):
    """Codebook accessor used by block-level callers; label order is Gray order."""
    return sign_codebook(params, entering_polarity)
