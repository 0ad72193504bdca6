"""Clock recovery: cubic Farrow interpolator, NCO/loop filter, and the
timing error detector suite.

The loop runs on a 2 samples-per-symbol input.  Each emitted symbol
interpolates an on-time sample (and a half-symbol "mid" sample when the
detector wants one) at fractional delay mu, then updates

    mu(n) = mu(n-1) + alpha_c * eps(n-1)

with the NCO absorbing overflow into the integer pointer: mu >= 1 skips
one input sample, mu < 0 stalls one.  Positive eps therefore advances
the sampling instant.

Two detector families share one interface.  Tap-reading detectors derive
eps from the equalizer coefficients (the sum of off-center real parts,
its complex variant, and the two-adjacent-taps shortcut); sample-domain
detectors (Gardner, the magnitude and sign variants) read the
interpolated samples directly.  The sample-domain forms are written out
in docs/DETECTORS.md.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .streams import ParameterError

__all__ = [
    "TedKind",
    "TimingLoopState",
    "FarrowInterpolator",
    "farrow_interp",
    "loop_filter_update",
    "ted_cma_full",
    "ted_cma_complex",
    "ted_cma_modified",
    "ted_gardner",
    "ted_abs",
    "ted_sign_mm",
    "ted_modified_abs",
    "ted_baseline",
    "TAP_TED_GATE_SYMBOLS",
]

# Tap-reading detectors stay gated while the center-spike equalizer forms.
TAP_TED_GATE_SYMBOLS = 500


class TedKind(enum.Enum):
    """The seven timing error detectors, uniform interface."""

    CMA_FULL = "cma_full"
    CMA_COMPLEX = "cma_complex"
    CMA_MODIFIED = "cma_modified"
    GARDNER = "gardner"
    ABS = "abs"
    SIGN_MM = "sign_mm"
    MODIFIED_ABS = "modified_abs"

    @classmethod
    def from_name(cls, name: str) -> "TedKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ParameterError(f"unknown TED {name!r}; valid: {valid}") from None

    @property
    def reads_taps(self) -> bool:
        """True for detectors computed from the equalizer tap vector."""
        return self in (TedKind.CMA_FULL, TedKind.CMA_COMPLEX, TedKind.CMA_MODIFIED)

    @property
    def uses_midsample(self) -> bool:
        """True for detectors that need the half-symbol sample."""
        return self in (TedKind.GARDNER, TedKind.ABS, TedKind.MODIFIED_ABS)


@dataclass
class TimingLoopState:
    """NCO state: fractional delay, integer pointer, step size, last eps.

    ``base_index`` advances by two input samples per symbol plus the
    occasional +-1 wrap; ``skips``/``stalls`` count those wraps.
    """

    mu: float = 0.0
    base_index: int = 0
    alpha_c: float = 1e-2
    eps_prev: float = 0.0
    skips: int = 0
    stalls: int = 0


def loop_filter_update(state: TimingLoopState, eps: float) -> TimingLoopState:
    """First-order loop update; mutates and returns ``state``.

    Applies mu += alpha_c * eps_prev, advances the NCO by the nominal
    two samples, folds mu back into [0, 1) by skipping or stalling one
    input sample, then records ``eps`` for the next step.
    """
    state.mu += state.alpha_c * state.eps_prev
    state.base_index += 2
    while state.mu >= 1.0:
        state.mu -= 1.0
        state.base_index += 1
        state.skips += 1
    while state.mu < 0.0:
        state.mu += 1.0
        state.base_index -= 1
        state.stalls += 1
    state.eps_prev = eps
    return state


class FarrowInterpolator:
    """Cubic Lagrange interpolation in Farrow (polynomial-in-mu) form.

    Evaluates a degree-3 polynomial through four consecutive samples at
    position ``1 + mu`` (i.e. between the 2nd and 3rd history samples),
    so it reproduces cubics exactly and returns the 2nd sample at mu=0.
    """

    history_len = 4

    @staticmethod
    def coefficients(h0: complex, h1: complex, h2: complex, h3: complex):
        c0 = h1
        c1 = -h0 / 3.0 - 0.5 * h1 + h2 - h3 / 6.0
        c2 = 0.5 * (h0 - 2.0 * h1 + h2)
        c3 = (h3 - h0) / 6.0 + 0.5 * (h1 - h2)
        return c0, c1, c2, c3

    @classmethod
    def interp(cls, history, mu: float) -> complex:
        if not 0.0 <= mu < 1.0:
            raise ParameterError(f"mu must be in [0, 1), got {mu}")
        h0, h1, h2, h3 = history
        c0, c1, c2, c3 = cls.coefficients(
            complex(h0), complex(h1), complex(h2), complex(h3)
        )
        return ((c3 * mu + c2) * mu + c1) * mu + c0


def farrow_interp(history, mu: float) -> complex:
    """Interpolate four consecutive samples at fractional position mu."""
    return FarrowInterpolator.interp(history, mu)


def _check_taps(w: np.ndarray, minimum: int = 1) -> int:
    p = len(w)
    if p % 2 == 0:
        raise ParameterError(f"tap vector length must be odd, got {p}")
    if p < minimum:
        raise ParameterError(f"tap vector length must be >= {minimum}, got {p}")
    return (p - 1) // 2


def ted_cma_full(w: np.ndarray) -> float:
    """Negated sum of off-center tap real parts."""
    w = np.asarray(w)
    i0 = _check_taps(w)
    re = w.real
    return float(re[i0] - re.sum())


def ted_cma_complex(w: np.ndarray) -> float:
    """Negated sum of off-center real and imaginary parts."""
    w = np.asarray(w)
    i0 = _check_taps(w)
    re, im = w.real, w.imag
    return float((re[i0] - re.sum()) + (im[i0] - im.sum()))


def ted_cma_modified(w: np.ndarray) -> float:
    """Negated sum of the two taps adjacent to the center (real parts)."""
    w = np.asarray(w)
    i0 = _check_taps(w, minimum=3)
    return float(-(w.real[i0 - 1] + w.real[i0 + 1]))


def ted_gardner(y_prev: complex, y_mid: complex, y_curr: complex) -> float:
    """Re{(y(n-1) - y(n)) * conj(y(n-1/2))} on T/2-spaced samples."""
    d = y_prev - y_curr
    return d.real * y_mid.real + d.imag * y_mid.imag


def ted_abs(y_prev: complex, y_mid: complex, y_curr: complex) -> float:
    """Gardner on sample magnitudes: |y(n-1/2)| (|y(n-1)| - |y(n)|)."""
    return abs(y_mid) * (abs(y_prev) - abs(y_curr))


def _sgn(v: float) -> float:
    return 1.0 if v > 0.0 else (-1.0 if v < 0.0 else 0.0)


def ted_sign_mm(y_prev: complex, y_curr: complex) -> float:
    """Signed Mueller-Muller form, I and Q arms summed."""
    return (
        _sgn(y_prev.real) * y_curr.real
        - _sgn(y_curr.real) * y_prev.real
        + _sgn(y_prev.imag) * y_curr.imag
        - _sgn(y_curr.imag) * y_prev.imag
    )


def ted_modified_abs(y_prev: complex, y_mid: complex, y_curr: complex) -> float:
    """Hard-limited Gardner arms: sgn of the symbol difference times the mid sample."""
    return (
        _sgn(y_prev.real - y_curr.real) * y_mid.real
        + _sgn(y_prev.imag - y_curr.imag) * y_mid.imag
    )


def ted_baseline(kind: TedKind, y_prev: complex, y_mid: complex, y_curr: complex) -> float:
    """Dispatch for the sample-domain baseline detectors."""
    if kind is TedKind.GARDNER:
        return ted_gardner(y_prev, y_mid, y_curr)
    if kind is TedKind.ABS:
        return ted_abs(y_prev, y_mid, y_curr)
    if kind is TedKind.SIGN_MM:
        return ted_sign_mm(y_prev, y_curr)
    if kind is TedKind.MODIFIED_ABS:
        return ted_modified_abs(y_prev, y_mid, y_curr)
    raise ParameterError(f"{kind} is not a sample-domain detector")
