# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled single-pass versions of the hot signal kernels."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

BACKEND = "cython"


def synth_waveform(a_sym, b_sym, long sps, double omega_dt, double phase0=0.0,
                   extra_phase=None):
    """Synthesize a passband waveform a(t)·sin(θ) + b(t)·cos(θ) in one pass."""
    cdef double[::1] a = np.ascontiguousarray(a_sym, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_sym, dtype=np.float64)
    cdef Py_ssize_t n_sym = a.shape[0]
    cdef Py_ssize_t n = n_sym * sps
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] extra
    cdef Py_ssize_t i, k
    cdef double th
    if b.shape[0] != n_sym:
        raise ValueError("a_sym and b_sym must have equal length")
    if extra_phase is None:
        for i in range(n):
            k = i // sps
            th = phase0 + omega_dt * <double>i
            out[i] = a[k] * sin(th) + b[k] * cos(th)
    else:
        extra = np.ascontiguousarray(extra_phase, dtype=np.float64)
        if extra.shape[0] != n:
            raise ValueError("extra_phase length must equal n_sym * sps")
        for i in range(n):
            k = i // sps
            th = phase0 + omega_dt * <double>i + extra[i]
            out[i] = a[k] * sin(th) + b[k] * cos(th)
    return out_arr


def mix_carrier(x, double omega_dt, double phase0=0.0):
    """Mix a real waveform with 2·sin and 2·cos of a digital carrier."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    xs_arr = np.empty(n, dtype=np.float64)
    xc_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] xc = xc_arr
    cdef Py_ssize_t i
    cdef double th, v
    for i in range(n):
        th = phase0 + omega_dt * <double>i
        v = 2.0 * xv[i]
        xs[i] = v * sin(th)
        xc[i] = v * cos(th)
    return xs_arr, xc_arr
