"""QAM mapping, pulse shaping, and the optional IF up/down conversion.

Constellations are square Gray-labeled QAM normalized to unit mean power.
The bit group of each symbol splits into an I half and a Q half; within
each half the bits Gray-label the amplitude levels, so nearest neighbors
differ in exactly one bit.  The 16-QAM table is reproduced in
docs/CONSTELLATIONS.md.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import firwin

from .streams import FirFilter, ParameterError, SampleStream, fir_filter, upsample

__all__ = [
    "Constellation",
    "IfConfig",
    "map_bits",
    "demap_symbols",
    "shape_pulse",
    "if_upconvert",
    "if_downconvert",
]

_SUPPORTED_ORDERS = (4, 16, 64)


def _gray(k: np.ndarray | int):
    return k ^ (k >> 1)


def _gray_inverse(levels: int) -> np.ndarray:
    """Lookup from Gray label value to amplitude-level index."""
    idx = np.arange(levels)
    inv = np.empty(levels, dtype=np.int64)
    inv[_gray(idx)] = idx
    return inv


@dataclass(frozen=True)
class Constellation:
    """Square Gray-coded QAM with E|c|^2 = 1."""

    order: int
    points: np.ndarray          # indexed by the integer value of the bit group
    scale: float                # applied to the odd-integer lattice

    def __post_init__(self):
        power = np.mean(np.abs(self.points) ** 2)
        if abs(power - 1.0) > 1e-12:
            raise ParameterError(f"constellation mean power {power} != 1")

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @property
    def side(self) -> int:
        return int(round(np.sqrt(self.order)))

    @classmethod
    def qam(cls, order: int) -> "Constellation":
        if order not in _SUPPORTED_ORDERS:
            raise ParameterError(f"order must be one of {_SUPPORTED_ORDERS}")
        m = int(round(np.sqrt(order)))
        half = int(np.log2(m))
        inv = _gray_inverse(m)
        labels = np.arange(order)
        v_i = labels >> half
        v_q = labels & (m - 1)
        amp_i = 2 * inv[v_i] - (m - 1)
        amp_q = 2 * inv[v_q] - (m - 1)
        raw = amp_i.astype(np.float64) + 1j * amp_q.astype(np.float64)
        scale = 1.0 / np.sqrt(np.mean(np.abs(raw) ** 2))
        return cls(order=order, points=raw * scale, scale=scale)

    def nearest_labels(self, y: np.ndarray) -> np.ndarray:
        """Minimum-distance decision, exact for the square lattice."""
        m = self.side
        half = int(np.log2(m))
        k_i = np.clip(np.round((np.real(y) / self.scale + (m - 1)) / 2), 0, m - 1)
        k_q = np.clip(np.round((np.imag(y) / self.scale + (m - 1)) / 2), 0, m - 1)
        v_i = _gray(k_i.astype(np.int64))
        v_q = _gray(k_q.astype(np.int64))
        return (v_i << half) | v_q

    def dispersion_constant(self) -> float:
        """E|c|^4 / E|c|^2 over the symbol table."""
        p2 = np.abs(self.points) ** 2
        return float(np.mean(p2 * p2) / np.mean(p2))


@dataclass(frozen=True)
class IfConfig:
    """Real-IF geometry: carrier, sample rate, and receive mixing phase."""

    f_if: float
    fs: float
    phi_bb: float = 0.0

    def __post_init__(self):
        if self.f_if <= 0 or self.fs <= 0:
            raise ParameterError("f_if and fs must be positive")

    def check_alias(self, symbol_rate: float, rolloff: float = 1.0) -> None:
        """Reject geometries where the real IF signal would alias."""
        bw_half = 0.5 * (1.0 + rolloff) * symbol_rate
        if self.fs <= 2.0 * (self.f_if + bw_half):
            raise ParameterError(
                f"fs={self.fs:g} aliases an IF signal at f_if={self.f_if:g} "
                f"with half-bandwidth {bw_half:g}"
            )


def bits_to_labels(bits: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1 or len(bits) % bits_per_symbol:
        raise ParameterError(
            f"bit count {len(bits)} not divisible by {bits_per_symbol}"
        )
    groups = bits.reshape(-1, bits_per_symbol)
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    return groups @ weights


def labels_to_bits(labels: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).reshape(-1)


def map_bits(bits, c: Constellation) -> SampleStream:
    """Gray-map a bit sequence to unit-power symbols (rate-1 stream)."""
    labels = bits_to_labels(bits, c.bits_per_symbol)
    return SampleStream(c.points[labels], rate=1.0)


def demap_symbols(y: SampleStream, c: Constellation) -> np.ndarray:
    """Hard minimum-distance decisions back to bits (inverse Gray)."""
    labels = c.nearest_labels(y.samples)
    return labels_to_bits(labels, c.bits_per_symbol)


def shape_pulse(symbols: SampleStream, g: FirFilter, sps: int) -> SampleStream:
    """Upsample by ``sps`` and apply the shaping filter ``g``."""
    return fir_filter(upsample(symbols, sps), g)


def if_upconvert(bb: SampleStream, cfg: IfConfig) -> np.ndarray:
    """Real passband signal: Re{ bb * exp(+j 2 pi f_if t) } at cfg.fs."""
    cfg.check_alias(cfg.fs / bb.rate)
    n = np.arange(len(bb))
    carrier = np.exp(2j * np.pi * cfg.f_if * n / cfg.fs)
    return np.real(bb.samples * carrier)


def _default_image_reject(cfg: IfConfig) -> FirFilter:
    # Cutoff halfway between the signal band and its image at 2*f_if;
    # tap count set so the transition band comfortably clears the image.
    n_taps = int(round(12.0 * cfg.fs / cfg.f_if)) | 1
    n_taps = min(max(n_taps, 63), 4095)
    return FirFilter(firwin(n_taps, cfg.f_if, fs=cfg.fs, window="blackman"))


def if_downconvert(
    pb: np.ndarray,
    cfg: IfConfig,
    *,
    sps: float,
    lowpass: FirFilter | None = None,
) -> SampleStream:
    """Digital IQ demodulation of a real passband capture.

    Mixes by exp(-j 2 pi f_if t), restores the factor of 2 lost by taking
    the real part at the transmitter, rotates by the receive mixing phase
    phi_bb, and removes the image with ``lowpass`` (a Blackman-windowed
    sinc at cutoff f_if by default; pass the matched filter to let it
    double as the image reject).  ``sps`` is the samples-per-symbol
    bookkeeping for the returned stream.
    """
    pb = np.asarray(pb, dtype=np.float64)
    n = np.arange(len(pb))
    mixed = (
        2.0
        * pb
        * np.exp(-2j * np.pi * cfg.f_if * n / cfg.fs)
        * np.exp(1j * cfg.phi_bb)
    )
    stream = SampleStream(mixed, rate=sps)
    f = lowpass if lowpass is not None else _default_image_reject(cfg)
    return fir_filter(stream, f, centered=True)
