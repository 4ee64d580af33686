"""Vectorized numpy implementation of the trajectory kernel.

Fallback used when the compiled extension is unavailable.  It consumes
exactly the same SplitMix64 substreams in exactly the same order as the
compiled kernel: one uniform for the initial level, then one uniform per
dwell period (including the final one that crosses the horizon).
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO53INV = 2.0 ** -53


def _mix(z):
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


def _unit(z):
    """Map a 64-bit word to a double in (0, 1]; never returns 0."""
    return ((z >> _S11) + _ONE).astype(np.float64) * _TWO53INV


def generate(seed, start, count, gamma0, gamma1, horizon):
    """Simulate ``count`` telegraph trajectories with indices ``start + i``.

    Returns ``(counts, times, levels)``: the number of switches per
    trajectory, all switch times concatenated in trajectory-major order,
    and the initial level (+1 or -1) per trajectory.
    """
    seed = np.uint64(seed)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    state = _mix(seed ^ _mix(idx * GAMMA))

    state += GAMMA
    levels = np.where(_unit(_mix(state)) < 0.5, 1, -1).astype(np.int8)

    current = levels.copy()
    t = np.zeros(count, dtype=np.float64)
    alive = np.arange(count, dtype=np.int64)
    switch_rows: list[np.ndarray] = []
    switch_times: list[np.ndarray] = []
    while alive.size:
        state[alive] += GAMMA
        u = _unit(_mix(state[alive]))
        # gamma1 drives escapes out of +1, gamma0 out of -1; this pairing is
        # the one under which the trajectory average reproduces the closed
        # form (the opposite pairing yields its complex conjugate).
        rate = np.where(current[alive] > 0, gamma1, gamma0)
        positive = rate > 0.0
        with np.errstate(divide="ignore"):
            w = np.where(positive, -np.log(u) / np.where(positive, rate, 1.0), np.inf)
        t[alive] += w
        alive = alive[t[alive] < horizon]
        if alive.size:
            switch_rows.append(alive.copy())
            switch_times.append(t[alive].copy())
            current[alive] = -current[alive]

    counts = np.zeros(count, dtype=np.int64)
    if switch_rows:
        rows = np.concatenate(switch_rows)
        vals = np.concatenate(switch_times)
        counts = np.bincount(rows, minlength=count).astype(np.int64)
        times = vals[np.argsort(rows, kind="stable")]
    else:
        times = np.empty(0, dtype=np.float64)
    return counts, times, levels
