"""Noisy teleportation through a dephased resource pair.

The shared Bell pair is degraded by the telegraph dephasing channel

    rho00 -> rho00,  rho11 -> rho11,  rho01 -> conj(Lambda) * rho01,

whose Kraus representation uses the modulus and phase of the decoherence
factor Lambda = Lambda_2(tau).  The convention that the |0><1| coherence
picks up conj(Lambda) (rather than Lambda) matches the evolution
generated by a +B(t) sigma_z coupling; only Re(Lambda) and |Lambda|
enter any reported quantity, so the opposite choice would be
observationally equivalent.

The protocol oracle simulates all three qubits: Alice measures her pair
in the Bell basis, each of the four outcomes is corrected with the
matching Pauli on Bob's side, and the outcomes are averaged with their
Born weights.  The resulting input-output fidelity is

    F(theta) = (1 + Re L + (1 - Re L) cos^2(theta)) / 2,

which integrates over the Bloch sphere to F_av = (2 + Re L)/3, and with
both resource qubits dephased independently to (2 + Re L^2)/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PAULI, bell_projector
from .errors import DegeneratePhaseError, ParameterError
from .noise import SwitchingRates, _lambda_value

# Below this modulus of Lambda the Kraus phase Lambda/|Lambda| is
# numerically meaningless; the channel limit is complete dephasing.
KRAUS_PHASE_FLOOR = 1e-14


@dataclass(frozen=True)
class InputPureState:
    """Bloch angles of the pure qubit state to teleport."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ParameterError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ParameterError(f"phi must lie in [0, 2*pi), got {self.phi}")

    def ket(self) -> np.ndarray:
        return np.array(
            [
                math.cos(0.5 * self.theta),
                np.exp(1j * self.phi) * math.sin(0.5 * self.theta),
            ],
            dtype=complex,
        )

    def projector(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())


@dataclass(frozen=True)
class FidelityResult:
    """Average teleportation fidelity with its evaluation context."""

    value: float
    tau: float
    rates: SwitchingRates
    variant: str


def dephasing_factor(rates: SwitchingRates, tau, balanced: bool = False):
    """The decoherence factor Lambda_2 governing the channel."""
    if balanced and not rates.balanced:
        raise ParameterError("balanced channel requested with unequal rates")
    out = _lambda_value(2.0, rates.gamma_bar, rates.epsilon, tau)
    out = np.asarray(out)
    return out.item() if out.ndim == 0 else out


def kraus_operators(
    rates: SwitchingRates, tau: float, balanced: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Kraus pair of the dephasing channel at time ``tau``.

    ``M1 = sqrt((1-|L|)/2) diag(-p, 1)`` and ``M2 = sqrt((1+|L|)/2) diag(p, 1)``
    with ``p = conj(L)/|L|``; completeness M1+M1 + M2+M2 = identity holds
    exactly.  Raises :class:`DegeneratePhaseError` when |L| is numerically
    zero; callers should then use the completely dephasing limit (both
    coherences erased), which is what :func:`apply_dephasing` does.
    """
    lam = complex(dephasing_factor(rates, float(tau), balanced))
    mod = abs(lam)
    if mod < KRAUS_PHASE_FLOOR:
        raise DegeneratePhaseError(
            f"|Lambda| = {mod:.3e} at tau={tau}: Kraus phase undefined"
        )
    phase = lam.conjugate() / mod
    m1 = math.sqrt(0.5 * (1.0 - min(mod, 1.0))) * np.diag([-phase, 1.0])
    m2 = math.sqrt(0.5 * (1.0 + mod)) * np.diag([phase, 1.0])
    return m1, m2


def apply_dephasing(rho: np.ndarray, lam: complex) -> np.ndarray:
    """Apply the dephasing channel with factor ``lam`` to a qubit state.

    Populations are untouched; the |0><1| coherence is multiplied by
    conj(lam).  Identical to conjugating with the Kraus pair, and well
    defined also in the completely dephasing limit lam = 0.
    """
    rho = np.asarray(rho, dtype=complex)
    out = rho.copy()
    out[0, 1] = np.conj(lam) * rho[0, 1]
    out[1, 0] = lam * rho[1, 0]
    return out


def _coherence_multipliers(lam: complex) -> np.ndarray:
    """Elementwise factors applied to |b><d| by the dephasing channel."""
    return np.array([[1.0, np.conj(lam)], [lam, 1.0]], dtype=complex)


def _apply_dephasing_two_qubit(rho4: np.ndarray, lam: complex, qubit: int) -> np.ndarray:
    """Dephase one qubit of a two-qubit state (qubit 0 or 1)."""
    mul = _coherence_multipliers(lam)
    r = np.asarray(rho4, dtype=complex).reshape(2, 2, 2, 2)
    if qubit == 0:
        return (r * mul[:, None, :, None]).reshape(4, 4)
    if qubit == 1:
        return (r * mul[None, :, None, :]).reshape(4, 4)
    raise ParameterError("qubit must be 0 or 1")


def resource_state(rates: SwitchingRates, tau: float, two_sided: bool = False) -> np.ndarray:
    """Bell pair with the dephasing channel on the second qubit.

    Built from the Kraus pair through vectorization,
    ``R = (|M1>><<M1| + |M2>><<M2|)/2`` with ``|M>> = vec(M)``; in the
    degenerate |Lambda| = 0 limit the completely dephasing channel is
    substituted.  With ``two_sided`` both qubits pass through independent
    channels with the same rates.
    """
    try:
        m1, m2 = kraus_operators(rates, tau)
        v1, v2 = m1.reshape(-1), m2.reshape(-1)
        res = 0.5 * (np.outer(v1, v1.conj()) + np.outer(v2, v2.conj()))
    except DegeneratePhaseError:
        res = 0.5 * np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
    if two_sided:
        lam = complex(dephasing_factor(rates, float(tau)))
        res = _apply_dephasing_two_qubit(res, lam, qubit=0)
    return res


def teleport_protocol_oracle(
    state: InputPureState,
    rates: SwitchingRates,
    tau: float,
    two_sided: bool = False,
) -> np.ndarray:
    """Bob's output state from a full three-qubit protocol simulation.

    Builds input x resource, projects Alice's qubits on each Bell state,
    applies the matching Pauli correction on Bob's qubit and sums the
    four corrected conditional states with their Born weights.
    """
    total = np.kron(state.projector(), resource_state(rates, tau, two_sided))
    out = np.zeros((2, 2), dtype=complex)
    eye2 = np.eye(2, dtype=complex)
    for k in range(4):
        proj = np.kron(bell_projector(k), eye2)
        reduced = proj @ total @ proj
        conditional = np.trace(reduced.reshape(4, 2, 4, 2), axis1=0, axis2=2)
        out += PAULI[k] @ conditional @ PAULI[k].conj().T
    return out


def output_fidelity(state: InputPureState, rho: np.ndarray) -> float:
    """Input-output fidelity <psi|rho|psi> of a teleported state."""
    k = state.ket()
    return float(np.real(k.conj() @ np.asarray(rho) @ k))


def fidelity_closed_form(theta: float, lam: complex) -> float:
    """F(theta) = (1 + Re L + (1 - Re L) cos^2 theta) / 2 (independent of phi)."""
    re = lam.real
    return 0.5 * (1.0 + re + (1.0 - re) * math.cos(theta) ** 2)


def average_fidelity_one_sided(rates: SwitchingRates, tau: float) -> FidelityResult:
    """Bloch-sphere average (2 + Re Lambda)/3 for noise on Bob's qubit only."""
    lam = complex(dephasing_factor(rates, float(tau)))
    return FidelityResult(
        value=(2.0 + lam.real) / 3.0, tau=float(tau), rates=rates, variant="one-sided"
    )


def average_fidelity_two_sided(rates: SwitchingRates, tau: float) -> FidelityResult:
    """Bloch-sphere average (2 + Re Lambda^2)/3 for channels on both resource qubits."""
    lam = complex(dephasing_factor(rates, float(tau)))
    return FidelityResult(
        value=(2.0 + (lam * lam).real) / 3.0,
        tau=float(tau),
        rates=rates,
        variant="two-sided",
    )


def average_fidelity_profile(
    rates: SwitchingRates, taus, two_sided: bool = False
) -> np.ndarray:
    """Vectorized average fidelity over an array of times."""
    lam = _lambda_value(2.0, rates.gamma_bar, rates.epsilon, np.asarray(taus, float))
    if two_sided:
        lam = lam * lam
    return (2.0 + lam.real) / 3.0


def sphere_average_fidelity(
    rates: SwitchingRates,
    tau: float,
    n_theta: int = 8,
    n_phi: int = 8,
    two_sided: bool = False,
) -> float:
    """Quadrature average of the protocol-oracle fidelity over the Bloch sphere.

    Gauss-Legendre in cos(theta) and a uniform (periodic trapezoid) rule
    in phi; both are exact here because the fidelity is quadratic in
    cos(theta) and independent of phi.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    total = 0.0
    for u, w in zip(nodes, weights):
        theta = math.acos(u)
        for j in range(n_phi):
            phi = 2.0 * math.pi * j / n_phi
            state = InputPureState(theta, phi)
            rho = teleport_protocol_oracle(state, rates, tau, two_sided)
            total += 0.5 * w * output_fidelity(state, rho) / n_phi
    return total


def fidelity_advantage_region(
    gamma0: float,
    gamma1_values,
    taus,
    two_sided: bool = False,
) -> np.ndarray:
    """Cells of the (gamma1, tau) grid where imbalance beats the balanced case.

    Entry [i, j] is True iff F_av(gamma0, gamma1_values[i], taus[j])
    strictly exceeds F_av(gamma0, gamma0, taus[j]).
    """
    gamma1_values = np.asarray(gamma1_values, dtype=float)
    taus = np.asarray(taus, dtype=float)
    baseline = average_fidelity_profile(SwitchingRates(gamma0, gamma0), taus, two_sided)
    gbar = 0.5 * (gamma0 + gamma1_values)[:, None]
    eps = 0.5 * (gamma0 - gamma1_values)[:, None]
    lam = _lambda_value(2.0, gbar, eps, taus[None, :])
    if two_sided:
        lam = lam * lam
    surface = (2.0 + lam.real) / 3.0
    return surface > baseline[None, :]
