"""Monte-Carlo oracle: exact event-driven telegraph trajectories.

Dwell times in each level are drawn from the exponential distribution of
that level's escape rate, so there is no time-step discretization error:
any disagreement with the closed-form characteristic functions is purely
statistical.  The initial level is +1 or -1 with probability 1/2 each
(the same convention under which the closed forms are derived; the
stationary occupation would instead weight the levels by the opposite
rates, so do not "fix" this).

Reproducibility: every trajectory draws from its own SplitMix64
substream keyed by (seed, trajectory index).  Ensembles are therefore
bit-for-bit reproducible for a fixed backend and independent of how the
index range is partitioned across worker threads.

Two kernels implement the generation: a compiled Cython extension and a
vectorized numpy fallback, selected at import (see ``DEFAULT_BACKEND``).
They consume identical random streams and differ at most in the last
ulp of the platform log().
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _mc_pure
from .errors import HorizonError, ParameterError
from .noise import SwitchingRates

try:
    from . import _mc_kernel
except ImportError:  # extension not built; numpy fallback only
    _mc_kernel = None

#: Name of the per-trajectory generator, recorded in run manifests.
RNG_ALGORITHM = "splitmix64"

_BACKENDS = {"python": _mc_pure}
if _mc_kernel is not None:
    _BACKENDS["compiled"] = _mc_kernel

_env_backend = os.environ.get("RTNQUBIT_BACKEND", "").strip().lower()
if _env_backend and _env_backend in _BACKENDS:
    DEFAULT_BACKEND = _env_backend
else:
    DEFAULT_BACKEND = "compiled" if _mc_kernel is not None else "python"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _resolve_backend(name: str | None):
    name = name or DEFAULT_BACKEND
    try:
        return name, _BACKENDS[name]
    except KeyError:
        raise ParameterError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None


@dataclass(frozen=True)
class TrajectoryConfig:
    """Size, seed and time horizon of a trajectory ensemble."""

    n_trajectories: int
    seed: int
    horizon: float

    def __post_init__(self):
        if int(self.n_trajectories) < 1:
            raise ParameterError("n_trajectories must be at least 1")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ParameterError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "n_trajectories", int(self.n_trajectories))
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """Event lists of a telegraph ensemble, in compressed (CSR-like) layout.

    ``switch_times`` concatenates the sorted switch times of all
    trajectories; trajectory ``i`` owns the slice
    ``offsets[i]:offsets[i+1]`` and starts in ``initial_levels[i]``.
    """

    offsets: np.ndarray
    switch_times: np.ndarray
    initial_levels: np.ndarray
    horizon: float
    rates: SwitchingRates
    seed: int
    backend: str = "python"

    @property
    def n_trajectories(self) -> int:
        return len(self.initial_levels)

    def trajectory(self, i: int) -> tuple[int, np.ndarray]:
        """Initial level and switch times of trajectory ``i``."""
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return int(self.initial_levels[i]), self.switch_times[lo:hi]

    def _switch_counts_before(self, tau: float) -> np.ndarray:
        """Number of switches strictly before ``tau``, per trajectory."""
        n = self.n_trajectories
        starts = self.offsets[:-1]
        if self.switch_times.size == 0:
            return np.zeros(n, dtype=np.int64)
        counts = np.diff(self.offsets)
        # Offsetting each trajectory's times by row*pad makes the flat
        # array globally sorted, so one searchsorted call does all rows.
        pad = self.horizon + 1.0
        row = np.repeat(np.arange(n, dtype=np.int64), counts)
        keys = self.switch_times + row * pad
        queries = np.arange(n, dtype=np.float64) * pad + tau
        return np.searchsorted(keys, queries, side="left") - starts

    def _check_tau(self, tau: float) -> float:
        tau = float(tau)
        if not 0.0 <= tau <= self.horizon:
            raise HorizonError(
                f"tau={tau} outside the simulated horizon [0, {self.horizon}]"
            )
        return tau

    def phases(self, tau) -> np.ndarray:
        """Accumulated phase phi(tau) = int_0^tau B(s) ds, per trajectory.

        Exact piecewise-linear integral of the +-1 level; |phi| <= tau.
        """
        tau = self._check_tau(tau)
        n = self.n_trajectories
        k = self._switch_counts_before(tau)
        starts = self.offsets[:-1]
        if self.switch_times.size:
            counts = np.diff(self.offsets)
            pos = np.arange(self.switch_times.size, dtype=np.int64) - np.repeat(
                starts, counts
            )
            signed = np.where(pos % 2 == 0, 2.0, -2.0) * self.switch_times
            csum = np.concatenate(([0.0], np.cumsum(signed)))
            alternating = csum[starts + k] - csum[starts]
        else:
            alternating = np.zeros(n, dtype=np.float64)
        parity = np.where(k % 2 == 0, 1.0, -1.0)
        return self.initial_levels * (alternating + parity * tau)

    def levels_at(self, tau) -> np.ndarray:
        """Level B(tau) in {+1, -1} per trajectory."""
        tau = self._check_tau(tau)
        k = self._switch_counts_before(tau)
        return np.where(k % 2 == 0, self.initial_levels, -self.initial_levels)


def mc_sample(
    rates: SwitchingRates,
    config: TrajectoryConfig,
    threads: int = 1,
    backend: str | None = None,
) -> TrajectoryEnsemble:
    """Draw a seeded trajectory ensemble.

    The trajectory index range is split into ``threads`` contiguous
    chunks; per-trajectory substreams make the result identical for any
    chunking, so ``threads`` only affects wall time.
    """
    name, kernel = _resolve_backend(backend)
    threads = max(1, int(threads))
    if os.environ.get("RTNQUBIT_SINGLE_THREAD", "") not in ("", "0"):
        threads = 1
    n = config.n_trajectories
    threads = min(threads, n)

    bounds = np.linspace(0, n, threads + 1).astype(np.int64)
    jobs = [
        (config.seed, int(lo), int(hi - lo), rates.gamma0, rates.gamma1, config.horizon)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    if len(jobs) == 1:
        parts = [kernel.generate(*jobs[0])]
    elif name == "compiled":
        # the compiled kernel releases the GIL around its hot loops
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            parts = list(pool.map(lambda args: kernel.generate(*args), jobs))
    else:
        parts = [kernel.generate(*args) for args in jobs]

    counts = np.concatenate([p[0] for p in parts])
    times = np.concatenate([p[1] for p in parts])
    levels = np.concatenate([p[2] for p in parts])
    offsets = np.concatenate(([0], np.cumsum(counts)))
    return TrajectoryEnsemble(
        offsets=offsets,
        switch_times=times,
        initial_levels=levels,
        horizon=config.horizon,
        rates=rates,
        seed=config.seed,
        backend=name,
    )


def characteristic_from_ensemble(
    ensemble: TrajectoryEnsemble, n, tau
) -> tuple[complex, float]:
    """Sample mean of exp(i*n*phi(tau)) and its standard error.

    The standard error combines the real and imaginary sample variances,
    ``sqrt((var_re + var_im) / m)``, which bounds the expected squared
    modulus of the estimator's deviation.
    """
    phi = ensemble.phases(tau)
    z = np.exp(1j * float(n) * phi)
    estimate = complex(z.mean())
    m = z.size
    if m < 2:
        return estimate, math.inf
    variance = z.real.var(ddof=1) + z.imag.var(ddof=1)
    return estimate, math.sqrt(variance / m)


def mc_characteristic(
    n,
    rates: SwitchingRates,
    tau,
    config: TrajectoryConfig,
    threads: int = 1,
    backend: str | None = None,
) -> tuple[complex, float]:
    """Monte-Carlo estimate of the decoherence factor at time ``tau``.

    Raises :class:`HorizonError` when ``tau`` exceeds the configured
    horizon.  At ``tau = 0`` the estimate is exactly 1 with zero error.
    """
    if float(tau) > config.horizon:
        raise HorizonError(f"tau={tau} exceeds configured horizon {config.horizon}")
    ensemble = mc_sample(rates, config, threads=threads, backend=backend)
    return characteristic_from_ensemble(ensemble, n, tau)
