"""Closed-form characteristic functions of random telegraph noise.

A telegraph process B(t) switches between +1 and -1 with escape rates
gamma1 (out of +1) and gamma0 (out of -1), starting from either level
with probability 1/2.  The decoherence factor

    Lambda_n(tau) = E[exp(i * n * phi(tau))],    phi(tau) = int_0^tau B(s) ds

admits a closed form: with gbar = (gamma0 + gamma1)/2 and
eps = (gamma0 - gamma1)/2,

    Lambda_n = exp(-gbar*tau) * [cosh(d*tau) + (gbar/d) * sinh(d*tau)],
    d**2     = gbar**2 - n**2 + 2j*n*eps,

using the principal complex square root.  The hyperbolic bracket is an
even function of d, so the branch choice cannot affect the value.  All
rates and times here are dimensionless: physical rates and times are
divided/multiplied by the coupling amplitude via :func:`rescale`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Below this value of |d*tau| the direct cosh/sinh evaluation is replaced
# by a truncated even Taylor series; both branches agree to ~1e-12
# relative at the crossover and the series is exact in the limit d -> 0.
DELTA_SERIES_THRESHOLD = 1e-4

# Above this value of Re(d*tau) the hyperbolic bracket is folded into the
# exp(-gbar*tau) prefactor to avoid cosh overflow; Re(d) <= gbar always
# (it follows from |eps| <= gbar), so the folded exponents stay <= 0.
_FOLD_REAL_THRESHOLD = 300.0


@dataclass(frozen=True)
class SwitchingRates:
    """Dimensionless escape rates of the two telegraph levels.

    ``gamma0`` is the escape rate out of level -1 and ``gamma1`` the one
    out of level +1 (the pairing under which the trajectory average
    reproduces the closed-form factors; swapping it conjugates them).
    Both must be nonnegative and at least one positive.
    """

    gamma0: float
    gamma1: float

    def __post_init__(self):
        g0, g1 = float(self.gamma0), float(self.gamma1)
        if not (math.isfinite(g0) and math.isfinite(g1)):
            raise ParameterError(f"switching rates must be finite, got ({g0}, {g1})")
        if g0 < 0 or g1 < 0:
            raise ParameterError(f"switching rates must be nonnegative, got ({g0}, {g1})")
        if g0 == 0 and g1 == 0:
            raise ParameterError("switching rates must not both be zero")
        object.__setattr__(self, "gamma0", g0)
        object.__setattr__(self, "gamma1", g1)

    @property
    def gamma_bar(self) -> float:
        """Mean rate (gamma0 + gamma1) / 2."""
        return 0.5 * (self.gamma0 + self.gamma1)

    @property
    def epsilon(self) -> float:
        """Rate imbalance (gamma0 - gamma1) / 2; zero for balanced noise."""
        return 0.5 * (self.gamma0 - self.gamma1)

    @property
    def balanced(self) -> bool:
        return self.gamma0 == self.gamma1

    def swapped(self) -> "SwitchingRates":
        return SwitchingRates(self.gamma1, self.gamma0)


@dataclass(frozen=True)
class PhysicalUnits:
    """Physical coupling amplitude, raw switching rates and time (1/time, time)."""

    nu: float
    raw_rate0: float
    raw_rate1: float
    raw_time: float

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ParameterError(f"coupling amplitude nu must be positive, got {self.nu}")
        if self.raw_rate0 < 0 or self.raw_rate1 < 0:
            raise ParameterError("raw switching rates must be nonnegative")
        if self.raw_time < 0:
            raise ParameterError("raw time must be nonnegative")


def rescale(units: PhysicalUnits) -> tuple[SwitchingRates, float]:
    """Convert physical parameters to dimensionless rates and time.

    Rates are divided by the coupling amplitude, time is multiplied by it:
    ``gamma_k = raw_rate_k / nu`` and ``tau = nu * raw_time``.
    """
    rates = SwitchingRates(units.raw_rate0 / units.nu, units.raw_rate1 / units.nu)
    return rates, units.nu * units.raw_time


class EnvironmentTopology(enum.Enum):
    """How the noise couples to the qubit pair."""

    INDEPENDENT = "ie"      # one independent realization per qubit
    COMMON = "ce"           # a single shared realization
    SINGLE_QUBIT = "1q"     # noise on the second qubit only (B1 = 0)


class PhaseAverage(enum.Enum):
    """The four two-qubit phase-factor averages E[exp(+-2i(phi1 +- phi2))]."""

    SUM_MINUS = "sum_minus"    # exp(-2i (phi1 + phi2))
    DIFF_MINUS = "diff_minus"  # exp(-2i (phi1 - phi2))
    DIFF_PLUS = "diff_plus"    # exp(+2i (phi1 - phi2))
    SUM_PLUS = "sum_plus"      # exp(+2i (phi1 + phi2))


def _decay_bracket(gbar_tau, x):
    """cosh(x) + gbar_tau * sinh(x)/x, even in x, series-protected near x=0."""
    x = np.asarray(x, dtype=np.complex128)
    gbar_tau = np.asarray(gbar_tau, dtype=np.float64)
    small = np.abs(x) < DELTA_SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)
    direct = np.cosh(safe) + gbar_tau * (np.sinh(safe) / safe)
    x2 = x * x
    series = (1.0 + x2 / 2.0 + x2 * x2 / 24.0) + gbar_tau * (
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    )
    return np.where(small, series, direct)


def _lambda_from_xgt(x, gbar_tau):
    """Decoherence factor from x = d*tau and gbar*tau, overflow-safe."""
    x, gbar_tau = np.broadcast_arrays(
        np.atleast_1d(np.asarray(x, dtype=np.complex128)),
        np.atleast_1d(np.asarray(gbar_tau, dtype=np.float64)),
    )
    out = np.empty(x.shape, dtype=np.complex128)
    fold = x.real > _FOLD_REAL_THRESHOLD
    rest = ~fold
    if rest.any():
        out[rest] = np.exp(-gbar_tau[rest]) * _decay_bracket(gbar_tau[rest], x[rest])
    if fold.any():
        xf, gt = x[fold], gbar_tau[fold]
        ratio = gt / xf  # equals gbar/d
        out[fold] = 0.5 * (1.0 + ratio) * np.exp(xf - gt) + 0.5 * (
            1.0 - ratio
        ) * np.exp(-xf - gt)
    return out


def _lambda_value(n, gbar, eps, tau):
    """Vectorized decoherence factor from the mean rate and imbalance."""
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau < 0):
        raise ParameterError("tau must be nonnegative")
    n = np.asarray(n, dtype=np.float64)
    gbar = np.asarray(gbar, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    delta = np.sqrt((gbar * gbar - n * n).astype(np.complex128) + 2j * n * eps)
    shape = np.broadcast_shapes((delta * tau).shape, (gbar * tau).shape)
    return _lambda_from_xgt(delta * tau, gbar * tau).reshape(shape)


def _as_output(values):
    values = np.asarray(values)
    return values.item() if values.ndim == 0 else values


def lambda_balanced(n, gamma, tau):
    """Decoherence factor for balanced noise (equal rates ``gamma``).

    Equals the unbalanced factor at zero imbalance, and is evaluated through
    the same code path, so equal-rate calls of either function agree bit for
    bit.  The result is real for real ``n`` (oscillatory when gamma < |n|,
    overdamped otherwise).

    Parameters
    ----------
    n : real
        Phase multiplier of the characteristic function.
    gamma : positive real
        Common escape rate of both levels (dimensionless).
    tau : nonnegative real or array
        Dimensionless time(s).
    """
    if not gamma > 0:
        raise ParameterError(f"balanced rate gamma must be positive, got {gamma}")
    return _as_output(_lambda_value(n, gamma, 0.0, tau))


def lambda_unbalanced(n, rates: SwitchingRates, tau):
    """Decoherence factor for unbalanced noise.

    Satisfies ``|Lambda_n| <= 1``, ``Lambda_{-n} = conj(Lambda_n)`` and the
    rate-swap symmetry ``Lambda_n(g0, g1) = Lambda_{-n}(g1, g0)``.

    Parameters
    ----------
    n : real
        Phase multiplier of the characteristic function.
    rates : SwitchingRates
        Escape rates of the two levels.
    tau : nonnegative real or array
        Dimensionless time(s).
    """
    return _as_output(_lambda_value(n, rates.gamma_bar, rates.epsilon, tau))


def lambda_near_degenerate(n, rates: SwitchingRates, tau):
    """Series evaluation of the decoherence factor, exact in the limit d -> 0.

    Intended for |d * tau| below :data:`DELTA_SERIES_THRESHOLD`, where it
    agrees with the direct formula to better than 1e-10 relative; at d = 0
    exactly it returns exp(-gbar*tau) * (1 + gbar*tau).  The expansion is
    even in d, so no square root (and no branch choice) is involved.
    """
    tau = np.asarray(tau, dtype=np.float64)
    gbar, eps = rates.gamma_bar, rates.epsilon
    delta2 = np.complex128(gbar * gbar - n * n + 2j * n * eps)
    x2 = delta2 * tau * tau
    gt = gbar * tau
    series = (1.0 + x2 / 2.0 + x2 * x2 / 24.0) + gt * (1.0 + x2 / 6.0 + x2 * x2 / 120.0)
    return _as_output(np.exp(-gt) * series)


def table1_average(
    kind: PhaseAverage,
    topology: EnvironmentTopology,
    rates: SwitchingRates,
    tau,
    balanced: bool = False,
):
    """Two-qubit process average of one phase factor.

    For a common environment the sum averages reduce to single factors with
    doubled index (Lambda_{+-4}) and the difference averages are exactly 1;
    for independent environments the sum averages square Lambda_{+-2} and
    the difference averages give |Lambda_2|**2.

    Parameters
    ----------
    kind : PhaseAverage
        Which of the four phase factors to average.
    topology : EnvironmentTopology
        INDEPENDENT or COMMON (the single-qubit case is not a table entry).
    rates : SwitchingRates
    tau : nonnegative real or array
    balanced : bool
        Assert the balanced special case (requires equal rates); the value
        is identical to the unbalanced evaluation at equal rates.
    """
    if balanced and not rates.balanced:
        raise ParameterError("balanced average requested with unequal rates")
    gbar, eps = rates.gamma_bar, rates.epsilon
    if topology is EnvironmentTopology.COMMON:
        if kind is PhaseAverage.SUM_PLUS:
            return _as_output(_lambda_value(4.0, gbar, eps, tau))
        if kind is PhaseAverage.SUM_MINUS:
            return _as_output(_lambda_value(-4.0, gbar, eps, tau))
        shaped = np.ones_like(np.asarray(tau, dtype=np.float64), dtype=np.complex128)
        return _as_output(shaped)
    if topology is EnvironmentTopology.INDEPENDENT:
        lam_p = _lambda_value(2.0, gbar, eps, tau)
        if kind is PhaseAverage.SUM_PLUS:
            return _as_output(lam_p * lam_p)
        lam_m = _lambda_value(-2.0, gbar, eps, tau)
        if kind is PhaseAverage.SUM_MINUS:
            return _as_output(lam_m * lam_m)
        return _as_output(lam_p * lam_m)
    raise ParameterError(f"no table column for topology {topology}")
