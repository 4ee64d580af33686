# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled trajectory kernel: event-driven telegraph switching.

Bit-compatible with the numpy fallback in ``_mc_pure``: the same
SplitMix64 substream, keyed by (seed, trajectory index), is consumed in
the same order, so both backends produce the same ensembles up to the
last-ulp behaviour of the platform log().
"""

from libc.math cimport log
from libc.stdint cimport int8_t, int64_t, uint64_t

import numpy as np

cdef double TWO53INV = 1.1102230246251565e-16   # 2 ** -53
cdef uint64_t STEP = 0x9E3779B97F4A7C15u


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline double _unit(uint64_t z) noexcept nogil:
    return <double>((z >> 11) + 1) * TWO53INV


def generate(seed, start, count, double gamma0, double gamma1, double horizon):
    """Simulate ``count`` telegraph trajectories with indices ``start + i``.

    Returns ``(counts, times, levels)`` with the same layout as the
    numpy fallback: switches per trajectory, concatenated switch times
    in trajectory-major order, initial levels (+1/-1).
    """
    cdef uint64_t useed = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t ustart = <uint64_t>(int(start) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t n = int(count)

    counts_arr = np.zeros(n, dtype=np.int64)
    levels_arr = np.zeros(n, dtype=np.int8)
    cdef int64_t[::1] counts = counts_arr
    cdef int8_t[::1] levels = levels_arr

    cdef Py_ssize_t i
    cdef uint64_t s
    cdef double u, t, rate
    cdef int lvl
    cdef int64_t c

    with nogil:
        for i in range(n):
            s = _mix(useed ^ _mix((ustart + <uint64_t>i + 1u) * STEP))
            s += STEP
            lvl = 1 if _unit(_mix(s)) < 0.5 else -1
            levels[i] = <int8_t>lvl
            t = 0.0
            c = 0
            while True:
                s += STEP
                u = _unit(_mix(s))
                rate = gamma1 if lvl > 0 else gamma0
                if rate == 0.0:
                    break
                t += -log(u) / rate
                if t >= horizon:
                    break
                c += 1
                lvl = -lvl
            counts[i] = c

    offsets = np.concatenate(([0], np.cumsum(counts_arr)))
    times_arr = np.empty(int(offsets[-1]), dtype=np.float64)
    cdef double[::1] times = times_arr
    cdef int64_t[::1] offs = offsets.astype(np.int64)
    cdef int64_t pos

    with nogil:
        for i in range(n):
            s = _mix(useed ^ _mix((ustart + <uint64_t>i + 1u) * STEP))
            s += STEP
            lvl = 1 if _unit(_mix(s)) < 0.5 else -1
            t = 0.0
            pos = offs[i]
            while True:
                s += STEP
                u = _unit(_mix(s))
                rate = gamma1 if lvl > 0 else gamma0
                if rate == 0.0:
                    break
                t += -log(u) / rate
                if t >= horizon:
                    break
                times[pos] = t
                pos += 1
                lvl = -lvl

    return counts_arr, times_arr, levels_arr
