"""Zero-crossing mapping: bits to signed coefficient segments, and the
equivalent finite-state (Moore) machine of the mapping.

Information is carried by the position of sign changes inside each mapped
block. A block of ``bits_per_block`` input bits selects one of ``n_patterns``
sign patterns; the running polarity ``rho`` (sign of the last emitted sample)
decides whether the pattern or its negation is emitted, so consecutive blocks
always chain without spurious sign flips. Real and imaginary rails of a
complex frame are built independently from interleaved blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SUPPORTED_M_RX = (2, 3)

# Sign patterns of the positive-polarity rows, in bit-label order. Row i is
# emitted (times the running polarity) when the block's bits equal LABELS[i].
# The last column is the polarity handed to the next block.
_SIGNS_MRX3 = np.array(
    [
        [+1, +1, +1],
        [+1, +1, -1],
        [+1, -1, -1],
        [-1, -1, -1],
    ],
    dtype=np.int8,
)
_LABELS_MRX3 = ("00", "01", "11", "10")

_SIGNS_MRX2 = np.array(
    [
        [+1, +1, +1, +1],
        [+1, +1, +1, -1],
        [+1, +1, -1, -1],
        [+1, -1, -1, -1],
        [+1, -1, -1, +1],
        [-1, -1, -1, +1],
        [-1, -1, -1, -1],
        [-1, -1, +1, +1],
    ],
    dtype=np.int8,
)
_LABELS_MRX2 = ("000", "001", "011", "010", "110", "111", "101", "100")


@dataclass(frozen=True)
class ZxParams:
    """Geometry of the mapping for one oversampling factor."""

    m_rx: int
    q: int                 # samples per mapped block
    bits_per_block: int
    n_patterns: int        # sign patterns per polarity
    n_states: int          # 2 * n_patterns
    n_coeffs: int          # free positive coefficients, n_patterns * q
    p_transition: float    # probability of each valid state transition

    @property
    def r_in(self) -> int:
        """Input alphabet size per Nyquist interval."""
        return self.m_rx + 1


def zx_params(m_rx: int) -> ZxParams:
    """Parameters for a supported oversampling factor.

    m_rx=3 maps 2 bits into one 3-sample block (one Nyquist interval);
    m_rx=2 maps 3 bits into one 4-sample block (two Nyquist intervals).
    """
    if m_rx == 3:
        n_patterns, q, bpb = 4, 3, 2
    elif m_rx == 2:
        n_patterns, q, bpb = 8, 4, 3
    else:
        raise ConfigError(f"unsupported oversampling factor m_rx={m_rx}; supported: {SUPPORTED_M_RX}")
    return ZxParams(
        m_rx=m_rx,
        q=q,
        bits_per_block=bpb,
        n_patterns=n_patterns,
        n_states=2 * n_patterns,
        n_coeffs=n_patterns * q,
        p_transition=1.0 / n_patterns,
    )


@dataclass(frozen=True)
class SignTable:
    """Sign patterns of the positive-polarity rows plus their bit labels."""

    signs: np.ndarray              # (n_patterns, q) in {-1, +1}
    labels: tuple[str, ...]

    @property
    def next_polarity(self) -> np.ndarray:
        """Polarity handed to the following block, per row."""
        return self.signs[:, -1]


def build_sign_tables(params: ZxParams) -> SignTable:
    if params.m_rx == 3:
        return SignTable(signs=_SIGNS_MRX3.copy(), labels=_LABELS_MRX3)
    if params.m_rx == 2:
        return SignTable(signs=_SIGNS_MRX2.copy(), labels=_LABELS_MRX2)
    raise ConfigError(f"unsupported oversampling factor m_rx={params.m_rx}")


@dataclass(frozen=True)
class CoefficientSet:
    """Strictly positive waveform amplitudes, one row per sign pattern.

    Signs live in the sign tables; the full signed set is {+G, -G}.
    """

    g: np.ndarray                  # (n_patterns, q), all entries > 0
    params: ZxParams

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        expected = (self.params.n_patterns, self.params.q)
        if g.shape != expected:
            raise ValueError(f"coefficient matrix shape {g.shape} does not match {expected}")
        if not np.all(g > 0):
            raise ValueError("coefficient entries must be strictly positive")
        object.__setattr__(self, "g", g)

    @classmethod
    def from_flat(cls, values, params: ZxParams, energy_budget: float | None = None) -> "CoefficientSet":
        g = np.asarray(values, dtype=float).reshape(params.n_patterns, params.q)
        cs = cls(g=g, params=params)
        if energy_budget is not None and cs.norm_sq > energy_budget * (1 + 1e-9):
            raise ValueError(f"coefficient energy {cs.norm_sq:.6g} exceeds budget {energy_budget:.6g}")
        return cs

    @property
    def norm_sq(self) -> float:
        """Squared Frobenius norm of the positive-row matrix."""
        return float(np.sum(self.g ** 2))

    @property
    def min_entry(self) -> float:
        return float(self.g.min())

    @property
    def mean_sample_power(self) -> float:
        """Average per-sample power of the mapped stream (uniform symbols)."""
        return self.norm_sq / self.params.n_coeffs

    def scaled(self, alpha: float) -> "CoefficientSet":
        return CoefficientSet(g=self.g * alpha, params=self.params)


@dataclass(frozen=True)
class MooreMachine:
    """Equivalent Moore machine of the mapping for a fixed coefficient set.

    State s < n_patterns is (pattern s, polarity +1); state s + n_patterns is
    (pattern s, polarity -1). The output of a state is its full signed block;
    transitions consume one bit label and land on the state whose pattern
    index matches the label and whose polarity equals the last emitted sign.
    """

    params: ZxParams
    gamma: np.ndarray              # (n_states, q) signed outputs
    transition: np.ndarray         # (n_states, n_patterns) next state per label index
    q_matrix: np.ndarray           # (n_states, n_states) row-stochastic
    pi: np.ndarray                 # stationary distribution, uniform

    @property
    def q(self) -> int:
        return self.params.q


def build_machine(params: ZxParams, coeffs: CoefficientSet) -> MooreMachine:
    if coeffs.params.m_rx != params.m_rx:
        raise ValueError("coefficient set was built for a different oversampling factor")
    table = build_sign_tables(params)
    n_pat, q = params.n_patterns, params.q
    n_s = params.n_states

    signed_rows = table.signs * coeffs.g
    gamma = np.vstack([signed_rows, -signed_rows])

    transition = np.empty((n_s, n_pat), dtype=np.intp)
    q_matrix = np.zeros((n_s, n_s))
    for s in range(n_s):
        polarity = 1.0 if s < n_pat else -1.0
        last_sign = polarity * table.signs[s % n_pat, -1]
        offset = 0 if last_sign > 0 else n_pat
        for j in range(n_pat):
            transition[s, j] = j + offset
            q_matrix[s, j + offset] = params.p_transition

    pi = np.full(n_s, 1.0 / n_s)
    return MooreMachine(params=params, gamma=gamma, transition=transition,
                        q_matrix=q_matrix, pi=pi)


@dataclass(frozen=True)
class EncodedFrame:
    """One real rail of a mapped frame."""

    coeffs: np.ndarray             # (n_blocks * q,) signed samples
    sign_codewords: np.ndarray     # (n_blocks, q) in {-1, +1}
    rho_b: int                     # pilot polarity, not part of the samples
    bit_count: int
    rows: np.ndarray = field(repr=False, default=None)  # (n_blocks,) pattern indices

    @property
    def n_samples(self) -> int:
        return self.coeffs.size


def _labels_to_rows(params: ZxParams) -> np.ndarray:
    # row index r carries the Gray code of r as its bit label, so the
    # label-integer -> row lookup is the inverse Gray map
    n = params.n_patterns
    rows_for_label = np.empty(n, dtype=np.intp)
    for r in range(n):
        rows_for_label[r ^ (r >> 1)] = r
    return rows_for_label


def bits_to_rows(bits: np.ndarray, params: ZxParams) -> np.ndarray:
    """Group a flat 0/1 array into blocks and map each to its pattern index."""
    bits = np.asarray(bits, dtype=np.intp).ravel()
    bpb = params.bits_per_block
    if bits.size % bpb != 0:
        raise ValueError(f"bit count {bits.size} is not a multiple of the block size {bpb}")
    weights = 1 << np.arange(bpb - 1, -1, -1)
    label_ints = bits.reshape(-1, bpb) @ weights
    return _labels_to_rows(params)[label_ints]


def rows_to_bits(rows: np.ndarray, params: ZxParams) -> np.ndarray:
    """Inverse of :func:`bits_to_rows`."""
    rows = np.asarray(rows, dtype=np.intp)
    gray = rows ^ (rows >> 1)
    shifts = np.arange(params.bits_per_block - 1, -1, -1)
    return ((gray[:, None] >> shifts) & 1).ravel().astype(np.int8)


def encode(bits, rho_b: int, coeffs: CoefficientSet) -> EncodedFrame:
    """Map one rail's bits into a signed coefficient sequence.

    Each block emits ``rho * signs[row] * g[row]`` where ``rho`` is the
    running polarity (the pilot ``rho_b`` for the first block, thereafter the
    sign of the previously emitted sample). The pilot itself is never part of
    the output samples.
    """
    if rho_b not in (-1, 1):
        raise ValueError("rho_b must be -1 or +1")
    params = coeffs.params
    table = build_sign_tables(params)
    rows = bits_to_rows(bits, params)

    last_signs = table.signs[rows, -1].astype(float)
    polarity = rho_b * np.concatenate(([1.0], np.cumprod(last_signs)[:-1]))
    codewords = polarity[:, None] * table.signs[rows]
    segments = codewords * coeffs.g[rows]
    return EncodedFrame(
        coeffs=segments.ravel(),
        sign_codewords=codewords.astype(np.int8),
        rho_b=int(rho_b),
        bit_count=rows.size * params.bits_per_block,
        rows=rows,
    )


def encode_complex(bits, coeffs: CoefficientSet, rho_b_real: int = 1,
                   rho_b_imag: int = 1) -> tuple[EncodedFrame, EncodedFrame]:
    """Split a bit stream over the two rails of a complex frame.

    Blocks are dealt alternately: even-indexed blocks feed the real rail,
    odd-indexed the imaginary one, so both rails carry the same bit load.
    """
    params = coeffs.params
    bits = np.asarray(bits, dtype=np.intp).ravel()
    bpb = params.bits_per_block
    if bits.size % (2 * bpb) != 0:
        raise ValueError(f"bit count {bits.size} is not a multiple of two blocks ({2 * bpb} bits)")
    blocks = bits.reshape(-1, bpb)
    real = encode(blocks[0::2].ravel(), rho_b_real, coeffs)
    imag = encode(blocks[1::2].ravel(), rho_b_imag, coeffs)
    return real, imag


def interleave_rail_bits(real_bits: np.ndarray, imag_bits: np.ndarray,
                         params: ZxParams) -> np.ndarray:
    """Merge per-rail bit streams back into the order consumed by
    :func:`encode_complex`."""
    bpb = params.bits_per_block
    re = np.asarray(real_bits).reshape(-1, bpb)
    im = np.asarray(imag_bits).reshape(-1, bpb)
    if re.shape != im.shape:
        raise ValueError("rails carry different bit counts")
    out = np.empty((re.shape[0] * 2, bpb), dtype=re.dtype)
    out[0::2] = re
    out[1::2] = im
    return out.ravel()


def sign_codebook(params: ZxParams, entering_polarity: int) -> list[tuple[str, np.ndarray]]:
    """Valid sign codewords for one entering polarity, in bit-label order."""
    if entering_polarity not in (-1, 1):
        raise ValueError("entering_polarity must be -1 or +1")
    table = build_sign_tables(params)
    return [(label, entering_polarity * table.signs[i])
            for i, label in enumerate(table.labels)]
