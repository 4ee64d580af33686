"""Two-qubit dephasing dynamics of Bell mixtures and their entanglement.

The pair starts in a mixture of the four Bell states, indexed by the
Pauli matrices through row-major vectorization: ``|k> = vec(sigma_k)/sqrt(2)``.
In the computational basis (|00>, |01>, |10>, |11>) these are

    k=0: (1, 0, 0, 1)/sqrt(2)      k=1: (0, 1, 1, 0)/sqrt(2)
    k=2: (0, -i, i, 0)/sqrt(2)     k=3: (1, 0, 0, -1)/sqrt(2)

Dephasing freezes all populations and multiplies the two off-diagonal
pairs by process averages of phase factors; which averages apply depends
on whether the qubits see independent realizations, a common one, or
noise on the second qubit only.  Entanglement is quantified by the
negativity: twice the absolute sum of the negative eigenvalues of the
partial transpose (taken on the second qubit), 0 for separable and 1 for
maximally entangled two-qubit states.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StateError
from .noise import (
    EnvironmentTopology,
    PhaseAverage,
    SwitchingRates,
    _lambda_value,
    table1_average,
)

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

#: The four Bell vectors, row k = vec(sigma_k)/sqrt(2) in the computational basis.
BELL_STATES = np.array([p.reshape(-1) for p in PAULI]) / math.sqrt(2.0)

# Minimum post-minimum rise of the negativity that counts as a revival.
# Calibrated so that the oscillatory/monotone transition on the balanced
# diagonal is resolved at grid step 0.05 (the first rise just below the
# threshold rate is ~1e-12) while staying ~1e3 above float noise.
REVIVAL_RISE_THRESHOLD = 1e-13


def bell_projector(k: int) -> np.ndarray:
    v = BELL_STATES[k]
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class BellMixture:
    """Statistical weights over the four Bell states."""

    weights: tuple[float, float, float, float]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != 4:
            raise ParameterError("a Bell mixture needs exactly four weights")
        if any(x < 0.0 or x > 1.0 for x in w):
            raise ParameterError(f"weights must lie in [0, 1], got {w}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ParameterError(f"weights must sum to 1, got sum={sum(w)!r}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def bell(cls, k: int) -> "BellMixture":
        """The pure Bell state of index ``k``."""
        w = [0.0] * 4
        w[k] = 1.0
        return cls(tuple(w))

    def density_matrix(self) -> np.ndarray:
        return sum(c * bell_projector(k) for k, c in enumerate(self.weights))


def validate_density_matrix(
    rho: np.ndarray,
    dim: int | None = None,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-12,
    eig_floor: float = -1e-10,
) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise StateError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise StateError("matrix is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise StateError(f"trace is {np.trace(rho)}, expected 1")
    if np.linalg.eigvalsh(rho).min() < eig_floor:
        raise StateError("matrix has a significantly negative eigenvalue")
    return rho


def _phase_averages(topology, rates, tau, balanced):
    """The four averaged phase factors (sum-, diff-, diff+, sum+)."""
    if topology is EnvironmentTopology.SINGLE_QUBIT:
        if balanced and not rates.balanced:
            raise ParameterError("balanced evolution requested with unequal rates")
        # first qubit noiseless: phi1 = 0, so every factor reduces to
        # exp(+-2i phi2) averaged over one realization
        lam = _lambda_value(2.0, rates.gamma_bar, rates.epsilon, tau)
        lam = complex(lam)
        return np.conj(lam), lam, np.conj(lam), lam
    return (
        table1_average(PhaseAverage.SUM_MINUS, topology, rates, tau, balanced),
        table1_average(PhaseAverage.DIFF_MINUS, topology, rates, tau, balanced),
        table1_average(PhaseAverage.DIFF_PLUS, topology, rates, tau, balanced),
        table1_average(PhaseAverage.SUM_PLUS, topology, rates, tau, balanced),
    )


def evolve_state(
    mixture: BellMixture,
    topology: EnvironmentTopology,
    rates: SwitchingRates,
    tau: float,
    balanced: bool = False,
) -> np.ndarray:
    """Ensemble-averaged two-qubit state at dimensionless time ``tau``.

    Populations are frozen; the (00,11) coherence carries the averaged
    exp(-2i(phi1+phi2)) factor and the (01,10) coherence the averaged
    exp(-2i(phi1-phi2)) factor.  The result is Hermitian, unit-trace and
    positive semidefinite.
    """
    c0, c1, c2, c3 = mixture.weights
    outer_pop = 0.5 * (c0 + c3)
    inner_pop = 0.5 * (c1 + c2)
    outer_coh = 0.5 * (c0 - c3)
    inner_coh = 0.5 * (c1 - c2)
    a_sm, a_dm, a_dp, a_sp = _phase_averages(topology, rates, float(tau), balanced)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = outer_pop
    rho[1, 1] = rho[2, 2] = inner_pop
    rho[0, 3] = outer_coh * a_sm
    rho[3, 0] = outer_coh * a_sp
    rho[1, 2] = inner_coh * a_dm
    rho[2, 1] = inner_coh * a_dp
    return rho


def partial_transpose(rho: np.ndarray, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a two-qubit matrix (second subsystem by default)."""
    rho = np.asarray(rho).reshape(2, 2, 2, 2)
    if subsystem == 1:
        return rho.transpose(0, 3, 2, 1).reshape(4, 4)
    if subsystem == 0:
        return rho.transpose(2, 1, 0, 3).reshape(4, 4)
    raise ParameterError("subsystem must be 0 or 1")


def negativity(rho: np.ndarray) -> float:
    """Entanglement negativity of a two-qubit state, in [0, 1].

    Eigenvalues of the partially transposed matrix with magnitude below
    1e-12 are treated as round-off zeros.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise StateError(f"negativity needs a 4x4 matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise StateError("negativity input is not Hermitian within 1e-12")
    eigs = np.linalg.eigvalsh(partial_transpose(rho))
    total = 2.0 * abs(eigs[eigs < -1e-12].sum())
    return float(np.clip(total, 0.0, 1.0 + 1e-9))


def negativity_bell_closed_form(
    topology: EnvironmentTopology,
    rates: SwitchingRates,
    tau,
    bell_index: int = 0,
):
    """Closed-form negativity of an initial Bell state.

    Independent environments give |Lambda_2|**2, a common environment
    |Lambda_4|, single-qubit noise |Lambda_2| (for Bell indices 0 and 3).
    Indices 1 and 2 are decoherence free only under a common environment
    (their coherence then carries a difference average equal to 1); under
    independent environments that average is |Lambda_2|**2, so they decay
    exactly like indices 0 and 3.
    """
    if bell_index not in (0, 1, 2, 3):
        raise ParameterError(f"bell_index must be 0..3, got {bell_index}")
    gbar, eps = rates.gamma_bar, rates.epsilon
    tau_arr = np.asarray(tau, dtype=float)
    if topology is EnvironmentTopology.COMMON:
        if bell_index in (1, 2):
            out = np.ones_like(tau_arr)
        else:
            out = np.abs(_lambda_value(4.0, gbar, eps, tau_arr))
    elif topology is EnvironmentTopology.INDEPENDENT:
        out = np.abs(_lambda_value(2.0, gbar, eps, tau_arr)) ** 2
    elif topology is EnvironmentTopology.SINGLE_QUBIT:
        out = np.abs(_lambda_value(2.0, gbar, eps, tau_arr))
    else:
        raise ParameterError(f"unknown topology {topology}")
    return out.item() if out.ndim == 0 else out


def max_rise(values: np.ndarray) -> np.ndarray:
    """Largest increase above the running minimum, along the last axis."""
    values = np.asarray(values, dtype=float)
    running_min = np.minimum.accumulate(values, axis=-1)
    return (values - running_min).max(axis=-1)


def has_revival(values: np.ndarray, threshold: float = REVIVAL_RISE_THRESHOLD) -> bool:
    """Whether a sampled negativity curve rises after a local minimum."""
    return bool(max_rise(np.asarray(values, dtype=float)) > threshold)


@dataclass(frozen=True)
class RateGrid:
    """Uniform grid start, start+step, ..., covering [start, stop]."""

    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step <= 0 or self.start <= 0 or self.stop < self.start:
            raise ParameterError(
                f"invalid rate grid ({self.start}, {self.stop}, {self.step})"
            )

    @property
    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)


@dataclass(frozen=True, eq=False)
class RevivalMap:
    """Boolean oscillation flags over a symmetric (gamma0, gamma1) grid."""

    topology: EnvironmentTopology
    gamma_values: np.ndarray
    flags: np.ndarray
    horizon: float
    time_step: float
    rise_threshold: float

    def flag_at(self, gamma0: float, gamma1: float) -> bool:
        i = int(np.argmin(np.abs(self.gamma_values - gamma0)))
        j = int(np.argmin(np.abs(self.gamma_values - gamma1)))
        return bool(self.flags[i, j])


def revival_scan(
    topology: EnvironmentTopology,
    grid: RateGrid,
    horizon: float = 20.0,
    time_step: float = 0.01,
    rise_threshold: float = REVIVAL_RISE_THRESHOLD,
    threads: int = 1,
) -> RevivalMap:
    """Flag the (gamma0, gamma1) cells whose negativity oscillates in time.

    Only the upper triangle is evaluated; the lower one is mirrored, which
    makes the rate-swap symmetry of the map exact by construction.
    """
    gammas = grid.values
    n = len(gammas)
    npts = int(math.floor(horizon / time_step + 1e-9)) + 1
    times = time_step * np.arange(npts)
    index = 4.0 if topology is EnvironmentTopology.COMMON else 2.0
    power = 2 if topology is EnvironmentTopology.INDEPENDENT else 1
    flags = np.zeros((n, n), dtype=bool)

    def scan_row(i: int):
        g0 = gammas[i]
        gbar = 0.5 * (g0 + gammas[i:])[:, None]
        eps = 0.5 * (g0 - gammas[i:])[:, None]
        profile = np.abs(_lambda_value(index, gbar, eps, times[None, :])) ** power
        flags[i, i:] = max_rise(profile) > rise_threshold

    rows = range(n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            list(pool.map(scan_row, rows))
    else:
        for i in rows:
            scan_row(i)
    flags |= flags.T
    return RevivalMap(
        topology=topology,
        gamma_values=gammas,
        flags=flags,
        horizon=horizon,
        time_step=time_step,
        rise_threshold=rise_threshold,
    )


def saturation_check(
    gamma0: float,
    delta: float,
    topology: EnvironmentTopology = EnvironmentTopology.INDEPENDENT,
    horizon: float = 10.0,
) -> float:
    """Negativity of a Bell pair at ``horizon`` for rates (gamma0, gamma0+delta).

    For a large rate difference the negativity saturates near 1 instead of
    decaying; at delta = 0 it shows the ordinary balanced decay.
    """
    rates = SwitchingRates(gamma0, gamma0 + delta)
    return float(negativity_bell_closed_form(topology, rates, horizon))
