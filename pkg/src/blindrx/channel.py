"""Link impairment simulator: timing error, clock drift, CFO, phase noise,
AWGN, and static symbol-spaced ISI.

The composition order is fixed as timing -> CFO/phase noise -> ISI -> AWGN
(see ``apply_impairments``).  The timing resampler uses a Kaiser-windowed
sinc kernel that is deliberately much longer than the receiver's cubic
interpolator, so channel interpolation error never masks receiver error.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .streams import ParameterError, SampleStream

__all__ = [
    "ImpairmentSpec",
    "apply_timing",
    "apply_cfo_pn",
    "apply_awgn",
    "apply_isi",
    "apply_impairments",
]

# Timing resampler kernel: half-width in samples and Kaiser shape.
_KERNEL_HALF = 32
_KERNEL_BETA = 10.0


@dataclass
class ImpairmentSpec:
    """Everything the channel does to the transmitted stream.

    tau0 is a static timing offset as a fraction of the symbol interval,
    clock_ppm a sample-clock frequency offset in parts per million,
    cfo_hz the carrier frequency offset, pn_linewidth_hz the two-sided
    3 dB linewidth of the Wiener phase-noise process.  ``snr_db=None``
    means noiseless and ``isi_taps=None`` an identity channel.
    """

    tau0: float = 0.0
    clock_ppm: float = 0.0
    cfo_hz: float = 0.0
    pn_linewidth_hz: float = 0.0
    snr_db: float | None = None
    isi_taps: list | None = None
    seed: int | None = None

    def __post_init__(self):
        if abs(self.tau0) > 0.5:
            raise ParameterError(f"|tau0| must be <= 0.5, got {self.tau0}")
        if self.pn_linewidth_hz < 0:
            raise ParameterError("pn_linewidth_hz must be >= 0")
        if self.isi_taps is not None and len(self.isi_taps) == 0:
            raise ParameterError("isi_taps must be nonempty when present")

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.isi_taps is not None:
            d["isi_taps"] = [[float(np.real(t)), float(np.imag(t))] for t in self.isi_taps]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ImpairmentSpec":
        d = dict(d)
        taps = d.get("isi_taps")
        if taps is not None:
            d["isi_taps"] = [complex(t[0], t[1]) if isinstance(t, (list, tuple)) else complex(t)
                             for t in taps]
        return cls(**d)


def _interp_kernel(frac: np.ndarray) -> np.ndarray:
    """Windowed-sinc interpolation weights for fractional offsets.

    Returns shape (len(frac), 2*_KERNEL_HALF): weights over sample
    offsets -_KERNEL_HALF+1 .. _KERNEL_HALF relative to the floor index.
    Exact (a Kronecker delta) when frac == 0.
    """
    offsets = np.arange(-_KERNEL_HALF + 1, _KERNEL_HALF + 1, dtype=np.float64)
    x = offsets[None, :] - frac[:, None]
    arg = 1.0 - (x / _KERNEL_HALF) ** 2
    window = np.i0(_KERNEL_BETA * np.sqrt(np.clip(arg, 0.0, None))) / np.i0(_KERNEL_BETA)
    return np.sinc(x) * window


def apply_timing(x: SampleStream, tau0: float, clock_ppm: float = 0.0) -> SampleStream:
    """Resample on the grid t_k = (k/sps)(1 + ppm*1e-6) + tau0 (symbol units).

    Models a static timing offset plus a linear sample-clock drift: the
    timing error grows by ``clock_ppm * 1e-6`` symbols per symbol.  Output
    has the same length, rate, and origin bookkeeping as the input; points
    that fall outside the input are taken over zero padding.
    """
    if abs(tau0) > 0.5:
        raise ParameterError(f"|tau0| must be <= 0.5, got {tau0}")
    sps = x.rate
    n = len(x)
    if n == 0:
        return x
    k = np.arange(n, dtype=np.float64)
    pos = k * (1.0 + clock_ppm * 1e-6) + tau0 * sps  # in input samples
    base = np.floor(pos).astype(np.int64)
    frac = pos - base

    # Zero-pad generously enough that drifted grid points stay in range.
    pad = _KERNEL_HALF + 1 + max(0, int(base[-1]) + _KERNEL_HALF + 1 - n, -int(base[0]))
    padded = np.concatenate(
        [np.zeros(pad, dtype=np.complex128), x.samples, np.zeros(pad, dtype=np.complex128)]
    )
    out = np.empty(n, dtype=np.complex128)
    offsets = np.arange(-_KERNEL_HALF + 1, _KERNEL_HALF + 1)
    # Chunked gather keeps the (chunk, kernel) workspace bounded.
    chunk = 1 << 15
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        w = _interp_kernel(frac[lo:hi])
        idx = base[lo:hi, None] + offsets[None, :] + pad
        out[lo:hi] = np.sum(padded[idx] * w, axis=1)
    return x.with_samples(out)


def apply_cfo_pn(
    x: SampleStream,
    cfo_hz: float,
    linewidth_hz: float,
    seed=None,
    *,
    fs_hz: float,
) -> SampleStream:
    """Rotate by exp(j*(2 pi cfo t + pn(t))).

    The phase noise is a Wiener process whose increments have variance
    2 pi * linewidth * Ts per sample at the absolute rate ``fs_hz``.
    """
    if linewidth_hz < 0:
        raise ParameterError("linewidth must be >= 0")
    n = len(x)
    theta = 2.0 * np.pi * cfo_hz * np.arange(n) / fs_hz
    if linewidth_hz > 0:
        rng = np.random.default_rng(seed)
        sigma = np.sqrt(2.0 * np.pi * linewidth_hz / fs_hz)
        theta = theta + np.cumsum(sigma * rng.standard_normal(n))
    if cfo_hz == 0 and linewidth_hz == 0:
        return x
    return x.with_samples(x.samples * np.exp(1j * theta))


def apply_awgn(x: SampleStream, snr_db: float | None, seed=None) -> SampleStream:
    """Add circular complex Gaussian noise at a symbol-rate SNR.

    The per-sample noise variance is ``P * sps / 10^(snr/10)`` where P is
    the measured mean sample power, so after matched filtering and
    symbol-rate decimation the symbol SNR equals ``snr_db``.  At one
    sample per symbol this is the familiar signal-power/snr rule.
    """
    if snr_db is None or np.isinf(snr_db):
        return x
    if len(x) == 0:
        raise ParameterError("cannot measure signal power of an empty stream")
    power = float(np.mean(np.abs(x.samples) ** 2))
    var = power * x.rate / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noise = np.sqrt(var / 2.0) * (
        rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x))
    )
    return x.with_samples(x.samples + noise)


def apply_isi(x: SampleStream, taps) -> SampleStream:
    """Apply a symbol-spaced FIR channel to a stream at any rate.

    The symbol-spaced taps are zero-stuffed to the stream rate, so an
    impulse produces copies of itself one symbol interval apart.
    """
    taps = np.atleast_1d(np.asarray(taps, dtype=np.complex128))
    if taps.size == 0:
        raise ParameterError("isi taps must be nonempty")
    sps = int(round(x.rate))
    h = np.zeros((len(taps) - 1) * sps + 1, dtype=np.complex128)
    h[::sps] = taps
    return x.with_samples(np.convolve(x.samples, h))


def apply_impairments(
    x: SampleStream, spec: ImpairmentSpec, *, symbol_rate_hz: float = 1.0
) -> SampleStream:
    """Full impairment chain in the fixed order timing -> CFO/PN -> ISI -> AWGN.

    Seeds for the stochastic stages derive deterministically from
    ``spec.seed`` so runs are reproducible and the stages independent.
    """
    fs_hz = symbol_rate_hz * x.rate
    children = np.random.SeedSequence(spec.seed).spawn(2)
    y = apply_timing(x, spec.tau0, spec.clock_ppm)
    y = apply_cfo_pn(y, spec.cfo_hz, spec.pn_linewidth_hz, children[0], fs_hz=fs_hz)
    if spec.isi_taps is not None:
        y = apply_isi(y, spec.isi_taps)
    y = apply_awgn(y, spec.snr_db, children[1])
    return y
