"""Pure-NumPy reference implementations of the hot signal kernels.

These are the fallback used when the compiled extension is unavailable; they
are also the ground truth the compiled kernels are tested against.
"""

import numpy as np

BACKEND = "numpy"


def synth_waveform(a_sym, b_sym, sps, omega_dt, phase0=0.0, extra_phase=None):
    """Synthesize a passband waveform a(t)·sin(θ) + b(t)·cos(θ).

    a_sym/b_sym are per-symbol quadrature amplitudes held constant for `sps`
    samples each (rectangular pulses); θ[n] = phase0 + omega_dt·n, plus an
    optional per-sample extra_phase (e.g. a slow optical drift).
    """
    a = np.repeat(np.asarray(a_sym, dtype=np.float64), sps)
    b = np.repeat(np.asarray(b_sym, dtype=np.float64), sps)
    theta = phase0 + omega_dt * np.arange(a.size, dtype=np.float64)
    if extra_phase is not None:
        theta = theta + extra_phase
    return a * np.sin(theta) + b * np.cos(theta)


def mix_carrier(x, omega_dt, phase0=0.0):
    """Mix a real waveform with 2·sin and 2·cos of a digital carrier.

    Returns the pair (2·x·sin(θ), 2·x·cos(θ)); low-pass filtering the outputs
    recovers the quadrature amplitudes with unit gain.
    """
    x = np.asarray(x, dtype=np.float64)
    theta = phase0 + omega_dt * np.arange(x.size, dtype=np.float64)
    return 2.0 * x * np.sin(theta), 2.0 * x * np.cos(theta)
