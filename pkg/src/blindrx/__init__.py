"""blindrx: a Baud-spaced blind QAM receiver and simulation harness.

The receiver combines a constant-modulus (CMA) equalizer with a clock
recovery loop whose timing error detectors are read directly off the
equalizer coefficients, driving a cubic Farrow interpolator at two
samples per symbol.  Classical blind detectors (Gardner, magnitude and
signed Mueller-Muller forms) share the same loop for comparison.
"""

from .streams import FirFilter, ParameterError, SampleStream, design_rrc, fir_filter, upsample
from .modem import Constellation, IfConfig, demap_symbols, if_downconvert, if_upconvert, map_bits, shape_pulse
from .channel import ImpairmentSpec, apply_awgn, apply_cfo_pn, apply_impairments, apply_isi, apply_timing
from .equalizer import EqualizerDivergedError, EqualizerState, cma_filter, cma_init, cma_update
from .sync import FarrowInterpolator, TedKind, TimingLoopState, farrow_interp, loop_filter_update
from .carrier import DpllState, dpll_step
from .receiver import Receiver, RxResult

__version__ = "0.1.0"

__all__ = [
    "Constellation",
    "DpllState",
    "EqualizerDivergedError",
    "EqualizerState",
    "FarrowInterpolator",
    "FirFilter",
    "IfConfig",
    "ImpairmentSpec",
    "ParameterError",
    "Receiver",
    "RxResult",
    "SampleStream",
    "TedKind",
    "TimingLoopState",
    "apply_awgn",
    "apply_cfo_pn",
    "apply_impairments",
    "apply_isi",
    "apply_timing",
    "cma_filter",
    "cma_init",
    "cma_update",
    "demap_symbols",
    "design_rrc",
    "dpll_step",
    "farrow_interp",
    "fir_filter",
    "if_downconvert",
    "if_upconvert",
    "loop_filter_update",
    "map_bits",
    "shape_pulse",
    "upsample",
]
