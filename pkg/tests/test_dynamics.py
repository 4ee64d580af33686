import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtnqubit.dynamics import (
    BELL_STATES,
    BellMixture,
    RateGrid,
    bell_projector,
    evolve_state,
    has_revival,
    negativity,
    negativity_bell_closed_form,
    partial_transpose,
    revival_scan,
    saturation_check,
    validate_density_matrix,
)
from rtnqubit.errors import ParameterError, StateError
from rtnqubit.montecarlo import TrajectoryConfig, mc_sample
from rtnqubit.noise import EnvironmentTopology, SwitchingRates, lambda_balanced, lambda_unbalanced

IE = EnvironmentTopology.INDEPENDENT
CE = EnvironmentTopology.COMMON
SQ = EnvironmentTopology.SINGLE_QUBIT

# |Lambda_2(tau=10, rates (1, 101))|^2, from a 50-digit mpmath evaluation.
SATURATION_1_100 = 0.96900134871871746457
# Same quantity at delta = 0 (ordinary balanced decay, rates (1, 1)).
SATURATION_1_0 = 5.9019818351975002516e-10


def random_mixture(rng):
    w = rng.dirichlet(np.ones(4))
    return BellMixture(tuple(w / w.sum()))


def test_bell_states_are_orthonormal():
    gram = BELL_STATES @ BELL_STATES.conj().T
    assert np.allclose(gram, np.eye(4), atol=1e-15)


def test_bell_mixture_validation():
    with pytest.raises(ParameterError):
        BellMixture((0.5, 0.5, 0.5, -0.5))
    with pytest.raises(ParameterError):
        BellMixture((0.3, 0.3, 0.3, 0.2))
    mix = BellMixture.bell(2)
    assert mix.weights == (0.0, 0.0, 1.0, 0.0)
    assert abs(np.trace(mix.density_matrix()) - 1.0) < 1e-14


def test_partial_transpose_reference():
    rho = np.arange(16, dtype=complex).reshape(4, 4)
    expect_second = np.array(
        [[0, 4, 2, 6], [1, 5, 3, 7], [8, 12, 10, 14], [9, 13, 11, 15]], dtype=complex
    )
    assert np.array_equal(partial_transpose(rho, 1), expect_second)
    expect_first = np.array(
        [[0, 1, 8, 9], [4, 5, 12, 13], [2, 3, 10, 11], [6, 7, 14, 15]], dtype=complex
    )
    assert np.array_equal(partial_transpose(rho, 0), expect_first)


def test_time_zero_returns_initial_mixture():
    rng = np.random.default_rng(3)
    for topo in (IE, CE, SQ):
        mix = random_mixture(rng)
        rho = evolve_state(mix, topo, SwitchingRates(1.0, 3.0), 0.0)
        assert np.max(np.abs(rho - mix.density_matrix())) < 1e-14


def test_common_environment_protects_middle_bells():
    rates = SwitchingRates(2.0, 7.0)
    for k in (1, 2):
        projector = bell_projector(k)
        for tau in (0.5, 3.0, 20.0):
            rho = evolve_state(BellMixture.bell(k), CE, rates, tau)
            assert np.max(np.abs(rho - projector)) < 1e-15
            assert abs(negativity(rho) - 1.0) <= 1e-12


@given(
    st.floats(0.05, 50.0),
    st.floats(0.05, 50.0),
    st.floats(0.0, 30.0),
    st.sampled_from([IE, CE, SQ]),
)
@settings(max_examples=100, deadline=None)
def test_evolved_state_is_physical(g0, g1, tau, topo):
    mix = BellMixture((0.4, 0.3, 0.2, 0.1))
    rho = evolve_state(mix, topo, SwitchingRates(g0, g1), tau)
    validate_density_matrix(rho, 4)
    # pure dephasing: populations frozen
    assert np.allclose(np.diag(rho), np.diag(mix.density_matrix()), atol=1e-14)


def test_independent_corner_value_and_mc_average():
    # corner coherence of an evolved Bell pair under independent balanced
    # noise equals (Lambda_2^b)^2 / 2; cross-checked against an end-to-end
    # trajectory average of the phase factor over paired realizations
    rates = SwitchingRates(1.0, 1.0)
    rho = evolve_state(BellMixture.bell(0), IE, rates, 1.0)
    expect = 0.5 * lambda_balanced(2, 1.0, 1.0) ** 2
    assert abs(rho[3, 0] - expect) < 1e-14

    cfg0 = TrajectoryConfig(100000, 501, 1.0)
    cfg1 = TrajectoryConfig(100000, 502, 1.0)
    phi1 = mc_sample(rates, cfg0).phases(1.0)
    phi2 = mc_sample(rates, cfg1).phases(1.0)
    samples = np.exp(2j * (phi1 + phi2))
    est = samples.mean()
    se = np.sqrt((samples.real.var(ddof=1) + samples.imag.var(ddof=1)) / samples.size)
    assert abs(est - 2.0 * rho[3, 0]) <= 3 * se


def test_negativity_basics():
    assert negativity(np.eye(4, dtype=complex) / 4.0) == 0.0
    for k in range(4):
        assert abs(negativity(bell_projector(k)) - 1.0) < 1e-12
    with pytest.raises(StateError):
        negativity(np.arange(16, dtype=complex).reshape(4, 4))


def test_negativity_matches_closed_forms():
    rng = np.random.default_rng(7)
    for _ in range(60):
        rates = SwitchingRates(*rng.uniform(0.1, 10.0, size=2))
        tau = float(rng.uniform(0.0, 5.0))
        for topo in (IE, CE, SQ):
            for k in range(4):
                rho = evolve_state(BellMixture.bell(k), topo, rates, tau)
                closed = negativity_bell_closed_form(topo, rates, tau, k)
                assert abs(negativity(rho) - closed) <= 1e-10


def test_independent_negativity_is_modulus_squared():
    rates = SwitchingRates(1.0, 3.0)
    for tau in (0.3, 1.0, 2.7):
        rho = evolve_state(BellMixture.bell(0), IE, rates, tau)
        assert abs(negativity(rho) - abs(lambda_unbalanced(2, rates, tau)) ** 2) < 1e-12


def test_single_qubit_noise_is_square_root_of_independent():
    rates = SwitchingRates(0.5, 4.0)
    taus = np.linspace(0.0, 10.0, 101)
    n_ie = negativity_bell_closed_form(IE, rates, taus)
    n_sq = negativity_bell_closed_form(SQ, rates, taus)
    assert np.max(np.abs(n_ie - n_sq**2)) < 1e-12


def test_negativity_rate_swap_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(30):
        rates = SwitchingRates(*rng.uniform(0.1, 10.0, size=2))
        tau = float(rng.uniform(0.0, 8.0))
        for topo in (IE, CE, SQ):
            a = negativity_bell_closed_form(topo, rates, tau)
            b = negativity_bell_closed_form(topo, rates.swapped(), tau)
            assert abs(a - b) <= 1e-12


def test_revival_detection_by_rate_regime():
    taus = 0.01 * np.arange(2001)
    slow = negativity_bell_closed_form(IE, SwitchingRates(0.5, 0.5), taus)
    fast = negativity_bell_closed_form(IE, SwitchingRates(50.0, 50.0), taus)
    assert has_revival(slow)
    assert not has_revival(fast)


def test_revival_map_symmetry_and_lookup():
    grid = RateGrid(0.4, 2.8, 0.4)
    panel = revival_scan(IE, grid, horizon=20.0, time_step=0.01)
    assert np.array_equal(panel.flags, panel.flags.T)
    assert panel.flag_at(0.4, 0.4)
    assert not panel.flag_at(2.8, 2.8)


def test_rate_grid_values():
    grid = RateGrid(0.05, 10.0, 0.05)
    values = grid.values
    assert len(values) == 200
    assert abs(values[0] - 0.05) < 1e-12 and abs(values[-1] - 10.0) < 1e-12
    with pytest.raises(ParameterError):
        RateGrid(1.0, 0.5, 0.1)


def test_saturation_levels():
    high = saturation_check(1.0, 100.0)
    assert high >= 0.9
    assert abs(high - SATURATION_1_100) < 1e-12
    low = saturation_check(1.0, 0.0)
    assert low < 1e-6
    assert abs(low - SATURATION_1_0) < 1e-15


def test_saturation_swap_invariance():
    a = negativity_bell_closed_form(IE, SwitchingRates(1.0, 101.0), 10.0)
    b = negativity_bell_closed_form(IE, SwitchingRates(101.0, 1.0), 10.0)
    assert abs(a - b) <= 1e-12
