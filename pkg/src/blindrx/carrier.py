"""Minimal digital PLL supplying the per-symbol phase estimate.

The equalizer output is rotated by -theta_hat before the tap update, so
the loop's only real job is to keep the equalizer's center tap
predominantly real while absorbing CFO and slow phase noise.  A
second-order (proportional + integral) loop with a blind fourth-power
phase detector is the default; a decision-region detector and an oracle
mode (apply the exactly known simulated phase) sit behind the same
interface.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .modem import Constellation
from .streams import ParameterError

__all__ = ["DpllState", "dpll_step", "phase_detector"]

_TWO_PI = 2.0 * math.pi


def _wrap(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    theta = math.fmod(theta, _TWO_PI)
    if theta > math.pi:
        theta -= _TWO_PI
    elif theta <= -math.pi:
        theta += _TWO_PI
    return theta


@dataclass
class DpllState:
    """Phase estimate, frequency accumulator, and PI gains (rad, rad/symbol)."""

    theta_hat: float = 0.0
    freq_acc: float = 0.0
    kp: float = 0.0
    ki: float = 0.0
    mode: str = "fourth_power"

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0:
            raise ParameterError("loop gains must be >= 0")
        if self.mode not in ("fourth_power", "decision"):
            raise ParameterError(f"unknown DPLL mode {self.mode!r}")
        self.theta_hat = _wrap(self.theta_hat)


def phase_detector(y: complex, constellation: Constellation, mode: str) -> float:
    """Phase error of a corrected symbol, in radians.

    fourth_power: arg(-y^4)/4, blind, with the quarter-plane ambiguity of
    square QAM.  decision: arg(y * conj(nearest point)).
    """
    if mode == "fourth_power":
        y2 = y * y
        y4 = y2 * y2
        if y4 == 0:
            return 0.0
        return 0.25 * cmath.phase(-y4)
    if mode == "decision":
        label = constellation.nearest_labels(complex(y))
        ref = complex(constellation.points[int(label)])
        if ref == 0 or y == 0:
            return 0.0
        return cmath.phase(y * ref.conjugate())
    raise ParameterError(f"unknown DPLL mode {mode!r}")


def dpll_step(
    state: DpllState, x_n: complex, constellation: Constellation
) -> tuple[complex, DpllState]:
    """Rotate one symbol by -theta_hat and run the PI update.

    Magnitude is preserved exactly (the correction is a pure rotation).
    Mutates and returns ``state``.
    """
    y = x_n * cmath.exp(-1j * state.theta_hat)
    e = phase_detector(y, constellation, state.mode)
    state.freq_acc += state.ki * e
    state.theta_hat = _wrap(state.theta_hat + state.kp * e + state.freq_acc)
    return y, state
