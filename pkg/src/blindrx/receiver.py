"""The joint per-symbol receiver loop.

Couples the pieces in their feedback order, once per emitted symbol:

1. Farrow-interpolate the on-time sample (and the half-symbol sample
   when the detector wants it) at the current NCO position.
2. Equalize (non-conjugated inner product over the Baud-spaced delay
   line), rotate by the carrier loop's -theta_hat, and run the CMA tap
   update with the phase-corrected output.
3. Evaluate the configured timing error detector -- tap-reading kinds
   from the just-updated coefficients (gated while the center spike
   forms), sample-domain kinds from the interpolated samples.
4. First-order loop filter / NCO update.

The loop state is single-owner and the loop single-threaded; parallel
sweeps each own a Receiver.  The hot path keeps scalars in plain Python
floats and uses numpy only for the tap-length vector operations; it
implements exactly the recursions exposed by :mod:`blindrx.sync`,
:mod:`blindrx.equalizer`, and :mod:`blindrx.carrier` (the unit suite
cross-checks the two paths).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .carrier import DpllState, phase_detector
from .equalizer import TAP_ENERGY_LIMIT, EqualizerDivergedError, EqualizerState
from .modem import Constellation
from .streams import ParameterError
from .sync import TAP_TED_GATE_SYMBOLS, TedKind, TimingLoopState

__all__ = ["Receiver", "RxResult"]


@dataclass
class RxResult:
    """Per-run receiver outputs and traces (one entry per emitted symbol)."""

    symbols: np.ndarray
    mu: np.ndarray
    eps: np.ndarray
    theta: np.ndarray
    resid_isi: np.ndarray
    taps: np.ndarray
    skips: int
    stalls: int
    consumed_samples: int
    tap_snapshots: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.symbols)


class Receiver:
    """One full blind receiver: timing loop + CMA equalizer + DPLL."""

    def __init__(
        self,
        constellation: Constellation,
        ted: TedKind,
        equalizer: EqualizerState,
        timing: TimingLoopState,
        dpll: DpllState,
        oracle_phase: np.ndarray | None = None,
        ted_gate: int = TAP_TED_GATE_SYMBOLS,
        tap_snapshot_every: int = 0,
    ):
        self.constellation = constellation
        self.ted = ted
        self.equalizer = equalizer
        self.timing = timing
        self.dpll = dpll
        self.oracle_phase = oracle_phase
        self.ted_gate = ted_gate
        self.tap_snapshot_every = tap_snapshot_every

    def run(self, x2: np.ndarray, max_symbols: int | None = None) -> RxResult:
        """Consume a 2 samples-per-symbol block; emit Baud-spaced symbols.

        Stops when either ``max_symbols`` have been produced or the input
        no longer holds a full interpolator history (needing more input
        is an exhaustion condition, not a failure).  Raises
        :class:`EqualizerDivergedError` if the tap energy runs away.
        """
        x2 = np.asarray(x2, dtype=np.complex128)
        if x2.ndim != 1:
            raise ParameterError("receiver input must be a 1-D sample block")
        # Two leading zeros give the Farrow history room at base_index 0.
        padded = np.concatenate([np.zeros(2, dtype=np.complex128), x2]).tolist()
        last_base = len(x2) - 3
        capacity = max(0, (last_base + 2) // 2 + 1)
        if max_symbols is not None:
            capacity = min(capacity, max_symbols)

        eq = self.equalizer
        p = eq.length
        i0 = eq.center
        alpha_e = eq.alpha_e
        R = eq.dispersion
        w = eq.w[::-1].copy()  # oldest-input-first; contiguous window dots
        rh = np.zeros(capacity + p - 1, dtype=np.complex128)
        rh[: p - 1] = eq.r_buf[1:][::-1]

        loop = self.timing
        mu = loop.mu
        base = loop.base_index
        alpha_c = loop.alpha_c
        eps_prev = loop.eps_prev
        skips = loop.skips
        stalls = loop.stalls
        base0 = base

        theta = self.dpll.theta_hat
        facc = self.dpll.freq_acc
        kp = self.dpll.kp
        ki = self.dpll.ki
        pd_mode = self.dpll.mode
        oracle = None if self.oracle_phase is None else np.asarray(self.oracle_phase, float)

        ted = self.ted
        reads_taps = ted.reads_taps
        wants_mid = ted.uses_midsample
        is_sign_mm = ted is TedKind.SIGN_MM
        gate = self.ted_gate

        out = np.empty(capacity, dtype=np.complex128)
        mu_tr = np.empty(capacity, dtype=np.float64)
        eps_tr = np.empty(capacity, dtype=np.float64)
        theta_tr = np.empty(capacity, dtype=np.float64)
        resid_tr = np.empty(capacity, dtype=np.float64)
        snapshots = []
        snap_every = self.tap_snapshot_every

        detector = phase_detector
        constellation = self.constellation
        r_prev = 0j
        n = 0
        try:
            while n < capacity and base <= last_base:
                c = base + 2  # index into the zero-padded buffer
                r_n = _farrow(padded[c - 1], padded[c], padded[c + 1], padded[c + 2], mu)

                win = rh[n : n + p]
                win[p - 1] = r_n
                x_eq = complex(np.dot(w, win))

                if oracle is None:
                    theta_used = theta
                    y = x_eq * cmath.exp(-1j * theta)
                    e_ph = detector(y, constellation, pd_mode)
                    facc += ki * e_ph
                    theta += kp * e_ph + facc
                    if theta > 3.141592653589793 or theta <= -3.141592653589793:
                        theta = (theta + 3.141592653589793) % 6.283185307179586 - 3.141592653589793
                else:
                    theta_used = oracle[n]
                    y = x_eq * cmath.exp(-1j * theta_used)

                err = (y.real * y.real + y.imag * y.imag) - R
                w -= (alpha_e * err * y) * np.conj(win)
                energy = np.vdot(w, w).real
                if not energy <= TAP_ENERGY_LIMIT:
                    raise EqualizerDivergedError(n, float(energy))
                wc = w[i0]
                resid = 1.0 - (wc.real * wc.real + wc.imag * wc.imag) / energy

                if reads_taps:
                    if n < gate:
                        eps = 0.0
                    else:
                        re = w.real
                        if ted is TedKind.CMA_FULL:
                            eps = float(re[i0] - re.sum())
                        elif ted is TedKind.CMA_COMPLEX:
                            im = w.imag
                            eps = float((re[i0] - re.sum()) + (im[i0] - im.sum()))
                        else:  # CMA_MODIFIED; index pair is center-symmetric
                            eps = float(-(re[i0 - 1] + re[i0 + 1]))
                else:
                    if n == 0:
                        eps = 0.0
                    elif is_sign_mm:
                        eps = (
                            _sgn(r_prev.real) * r_n.real
                            - _sgn(r_n.real) * r_prev.real
                            + _sgn(r_prev.imag) * r_n.imag
                            - _sgn(r_n.imag) * r_prev.imag
                        )
                    else:
                        r_mid = _farrow(
                            padded[c - 2], padded[c - 1], padded[c], padded[c + 1], mu
                        )
                        if ted is TedKind.GARDNER:
                            d = r_prev - r_n
                            eps = d.real * r_mid.real + d.imag * r_mid.imag
                        elif ted is TedKind.ABS:
                            eps = abs(r_mid) * (abs(r_prev) - abs(r_n))
                        else:  # MODIFIED_ABS
                            eps = _sgn(r_prev.real - r_n.real) * r_mid.real + _sgn(
                                r_prev.imag - r_n.imag
                            ) * r_mid.imag
                r_prev = r_n

                out[n] = y
                mu_tr[n] = mu
                eps_tr[n] = eps
                theta_tr[n] = theta_used
                resid_tr[n] = resid
                if snap_every and n % snap_every == 0:
                    snapshots.append((n, w[::-1].copy()))

                # First-order loop filter / NCO (matches sync.loop_filter_update).
                mu += alpha_c * eps_prev
                base += 2
                while mu >= 1.0:
                    mu -= 1.0
                    base += 1
                    skips += 1
                while mu < 0.0:
                    mu += 1.0
                    base -= 1
                    stalls += 1
                eps_prev = eps
                n += 1
        finally:
            # Fold loop-local state back even when the equalizer diverges.
            eq.w[:] = w[::-1]
            if n:
                eq.r_buf[:] = rh[n - 1 : n + p - 1][::-1]
            eq.updates += n
            loop.mu = mu
            loop.base_index = base
            loop.eps_prev = eps_prev
            loop.skips = skips
            loop.stalls = stalls
            self.dpll.theta_hat = theta if oracle is None else self.dpll.theta_hat
            self.dpll.freq_acc = facc

        return RxResult(
            symbols=out[:n],
            mu=mu_tr[:n],
            eps=eps_tr[:n],
            theta=theta_tr[:n],
            resid_isi=resid_tr[:n],
            taps=w[::-1].copy(),
            skips=skips,
            stalls=stalls,
            consumed_samples=base - base0,
            tap_snapshots=snapshots,
        )


def _sgn(v: float) -> float:
    return 1.0 if v > 0.0 else (-1.0 if v < 0.0 else 0.0)


def _farrow(h0: complex, h1: complex, h2: complex, h3: complex, mu: float) -> complex:
    # Cubic Lagrange in Horner form; identical to sync.FarrowInterpolator.
    c0 = h1
    c1 = -h0 / 3.0 - 0.5 * h1 + h2 - h3 / 6.0
    c2 = 0.5 * (h0 - 2.0 * h1 + h2)
    c3 = (h3 - h0) / 6.0 + 0.5 * (h1 - h2)
    return ((c3 * mu + c2) * mu + c1) * mu + c0
