"""Complex sample buffers, FIR filtering, and root-raised-cosine design.

Everything downstream of the modulator moves data around as a
:class:`SampleStream`: a contiguous block of complex baseband samples
together with its rate in samples per symbol and the symbol index of the
first sample.  All operations here are pure functions over immutable
inputs; none of them mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterError",
    "SampleStream",
    "FirFilter",
    "design_rrc",
    "fir_filter",
    "upsample",
]


class ParameterError(ValueError):
    """An argument violates an operation's contract."""


def _as_finite_complex(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.complex128)
    if arr.ndim != 1:
        raise ParameterError(f"sample buffer must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ParameterError("non-finite sample admitted into stream")
    return arr


@dataclass(frozen=True)
class SampleStream:
    """Complex baseband samples at ``rate`` samples per symbol.

    ``origin`` is the symbol index of the first sample, so sample ``k``
    sits at symbol time ``origin + k / rate``.  Slicing from the front
    shifts the origin accordingly.
    """

    samples: np.ndarray
    rate: float
    origin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_finite_complex(self.samples))
        if not (self.rate > 0):
            raise ParameterError(f"rate must be positive, got {self.rate}")

    def __len__(self) -> int:
        return len(self.samples)

    def sliced(self, start: int, stop: int | None = None) -> "SampleStream":
        """Return samples[start:stop] with the origin shifted by start/rate."""
        if start < 0:
            raise ParameterError("negative slice start")
        return SampleStream(
            self.samples[start:stop], self.rate, self.origin + start / self.rate
        )

    def with_samples(self, samples, rate: float | None = None,
                     origin: float | None = None) -> "SampleStream":
        """New stream reusing this stream's metadata unless overridden."""
        return SampleStream(
            samples,
            self.rate if rate is None else rate,
            self.origin if origin is None else origin,
        )


@dataclass(frozen=True)
class FirFilter:
    """FIR coefficient vector; real taps are kept real."""

    taps: np.ndarray = field()

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps))
        if taps.ndim != 1 or taps.size < 1:
            raise ParameterError("filter needs at least one tap")
        if not np.all(np.isfinite(taps.real)) or (
            np.iscomplexobj(taps) and not np.all(np.isfinite(taps.imag))
        ):
            raise ParameterError("non-finite filter tap")
        if not np.iscomplexobj(taps):
            taps = taps.astype(np.float64)
        object.__setattr__(self, "taps", taps)

    def __len__(self) -> int:
        return len(self.taps)

    @property
    def group_delay(self) -> float:
        """Delay of a symmetric design, in samples: (len - 1) / 2."""
        return (len(self.taps) - 1) / 2


def design_rrc(rolloff: float, span_symbols: int, sps: int) -> FirFilter:
    """Design a unit-energy root-raised-cosine filter.

    The impulse response spans ``span_symbols`` symbol intervals at
    ``sps`` samples per symbol and has an odd tap count
    (``span_symbols * sps + 1``) so a true center tap exists.  The two
    removable singularities of the closed form (t = 0 and
    t = +-1/(4*rolloff)) are evaluated with their analytic limits rather
    than clamped.

    Returns a filter normalized to unit tap energy, so the cascade of
    the filter with itself sampled at symbol instants is Nyquist up to
    truncation error.
    """
    if not 0.0 <= rolloff <= 1.0:
        raise ParameterError(f"rolloff must be in [0, 1], got {rolloff}")
    if span_symbols < 1 or sps < 1:
        raise ParameterError("span_symbols and sps must be positive integers")

    n_taps = span_symbols * sps + 1
    # Tap times in symbol units, symmetric about zero.
    t = (np.arange(n_taps) - (n_taps - 1) / 2) / sps
    beta = float(rolloff)

    h = np.empty(n_taps, dtype=np.float64)
    if beta == 0.0:
        h = np.sinc(t)
    else:
        singular = np.isclose(np.abs(t), 1.0 / (4.0 * beta), rtol=0.0, atol=1e-12)
        center = t == 0.0
        regular = ~(singular | center)

        tr = t[regular]
        num = np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(
            np.pi * tr * (1 + beta)
        )
        den = np.pi * tr * (1 - (4 * beta * tr) ** 2)
        h[regular] = num / den
        h[center] = 1.0 - beta + 4.0 * beta / np.pi
        h[singular] = (beta / np.sqrt(2.0)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
            + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
        )

    h /= np.sqrt(np.sum(h * h))
    return FirFilter(h)


def fir_filter(x: SampleStream, f: FirFilter, centered: bool = False) -> SampleStream:
    """Linear (full) convolution of a stream with an FIR filter.

    Output length is ``len(x) + len(f) - 1`` at the input rate.  With
    ``centered=True`` the origin is moved back by the filter's group
    delay so that output sample ``k`` lines up with the input's symbol
    clock; otherwise the filter is treated as causal and the origin is
    unchanged.
    """
    if len(x) == 0:
        raise ParameterError("cannot filter an empty stream")
    y = np.convolve(x.samples, f.taps)
    origin = x.origin - (f.group_delay / x.rate if centered else 0.0)
    return SampleStream(y, x.rate, origin)


def upsample(x: SampleStream, factor: int) -> SampleStream:
    """Insert ``factor - 1`` zeros after each sample; rate scales by ``factor``."""
    if factor < 1:
        raise ParameterError(f"upsampling factor must be >= 1, got {factor}")
    if factor == 1:
        return x
    out = np.zeros(len(x) * factor, dtype=np.complex128)
    out[::factor] = x.samples
    return SampleStream(out, x.rate * factor, x.origin)
