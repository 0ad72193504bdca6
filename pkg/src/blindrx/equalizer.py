"""Baud-spaced constant-modulus adaptive equalizer.

The tap vector plays a double role: it removes residual ISI, and its
off-center coefficients feed the tap-reading timing error detectors in
:mod:`blindrx.sync`.  The filter output is the non-conjugated inner
product w . r_buf with the newest input first, and the stochastic update

    w <- w - alpha_e * (|y|^2 - R) * y * conj(r_buf)

uses the phase-corrected output y supplied by the carrier loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .modem import Constellation
from .streams import ParameterError

__all__ = ["EqualizerState", "EqualizerDivergedError", "cma_init", "cma_filter", "cma_update"]

# Blind loops can run away for a bad step size; make that loud.
TAP_ENERGY_LIMIT = 1e3


class EqualizerDivergedError(RuntimeError):
    """Tap energy exceeded the divergence guard."""

    def __init__(self, symbol_index: int, energy: float):
        super().__init__(
            f"equalizer diverged at symbol {symbol_index} (tap energy {energy:.3g})"
        )
        self.symbol_index = symbol_index
        self.energy = energy


@dataclass
class EqualizerState:
    """Tap vector, step size, delay line, and dispersion constant.

    ``r_buf[k]`` holds the input ``k`` symbols ago, matching the tap
    ordering of ``w``.  ``updates`` counts calls to :func:`cma_update`
    so a divergence error can report where the loop blew up.
    """

    w: np.ndarray
    alpha_e: float
    r_buf: np.ndarray
    dispersion: float
    updates: int = 0

    @property
    def length(self) -> int:
        return len(self.w)

    @property
    def center(self) -> int:
        return (len(self.w) - 1) // 2

    def tap_energy(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2))


def cma_init(p: int, alpha_e: float, constellation: Constellation) -> EqualizerState:
    """Center-spike initialization with R computed from the symbol table."""
    if p < 1 or p % 2 == 0:
        raise ParameterError(f"equalizer length must be odd, got {p}")
    if alpha_e <= 0:
        raise ParameterError("alpha_e must be positive")
    w = np.zeros(p, dtype=np.complex128)
    w[(p - 1) // 2] = 1.0
    return EqualizerState(
        w=w,
        alpha_e=alpha_e,
        r_buf=np.zeros(p, dtype=np.complex128),
        dispersion=constellation.dispersion_constant(),
    )


def cma_filter(state: EqualizerState, r_n: complex) -> complex:
    """Push one Baud-spaced input and return the filter output w . r_buf."""
    buf = state.r_buf
    buf[1:] = buf[:-1]
    buf[0] = r_n
    return complex(np.dot(state.w, buf))


def cma_update(state: EqualizerState, y_n: complex) -> EqualizerState:
    """One stochastic-gradient step toward |y|^2 = R.

    ``y_n`` must be the phase-corrected output for the current delay
    line contents.  Raises :class:`EqualizerDivergedError` when the tap
    energy passes the guard.
    """
    err = (y_n.real * y_n.real + y_n.imag * y_n.imag) - state.dispersion
    g = state.alpha_e * err * y_n
    state.w -= g * np.conj(state.r_buf)
    state.updates += 1
    energy = state.tap_energy()
    if not energy <= TAP_ENERGY_LIMIT:
        raise EqualizerDivergedError(state.updates, energy)
    return state
