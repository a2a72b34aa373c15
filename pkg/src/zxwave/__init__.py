"""Zero-crossing waveform toolkit for 1-bit quantized oversampled MIMO links."""

from .zxmap import (CoefficientSet, EncodedFrame, MooreMachine, SignTable,
                    ZxParams, build_machine, build_sign_tables, encode,
                    encode_complex, sign_codebook, zx_params)
from .spectrum import (Autocorrelation, FilterSpec, PsdCurve, analytic_psd,
                       autocorrelation, block_correlation, containment,
                       rectangular_filter)
from .optimizer import (DesignProblem, DesignSolution, SearchConfig, evaluate,
                        solve, verify_table)
from .mimosim import (ChannelRealization, NoiseSpec, ReceivedFrame,
                      generate_channel, one_bit_quantize, snr_to_n0,
                      transmit_frame)
from .detector import (BlockDecision, DetectionWindow, detect_block,
                       detect_complex, detect_frame, hamming)
from .harness import (BerCurve, BerPoint, EmpiricalPsd, SweepConfig, ber_sweep,
                      containment_report, empirical_psd)
from .tables import bundled_coefficients

__version__ = "0.1.0"
