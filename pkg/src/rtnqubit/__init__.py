"""Qubit dephasing under balanced and unbalanced random telegraph noise.

Closed-form decoherence factors, Bell-mixture dynamics and entanglement
negativity, information-backflow (non-Markovianity) measures, noisy
teleportation fidelity, and an exact event-driven Monte-Carlo trajectory
oracle validating the closed forms.
"""

__version__ = "0.1.0"

from .errors import (
    DegeneratePhaseError,
    HorizonError,
    ParameterError,
    StateError,
)
from .noise import (
    DELTA_SERIES_THRESHOLD,
    EnvironmentTopology,
    PhaseAverage,
    PhysicalUnits,
    SwitchingRates,
    lambda_balanced,
    lambda_near_degenerate,
    lambda_unbalanced,
    rescale,
    table1_average,
)
from .montecarlo import (
    RNG_ALGORITHM,
    TrajectoryConfig,
    TrajectoryEnsemble,
    available_backends,
    characteristic_from_ensemble,
    mc_characteristic,
    mc_sample,
)
from .dynamics import (
    BELL_STATES,
    PAULI,
    BellMixture,
    RateGrid,
    RevivalMap,
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
from .nonmarkov import (
    NMResult,
    TimeGrid,
    blp_measure,
    nm_surface,
    optimal_trace_distance,
    positive_increment_sum,
    rise_sum,
    trace_distance,
    two_qubit_optimal_pair_check,
)
from .teleport import (
    FidelityResult,
    InputPureState,
    apply_dephasing,
    average_fidelity_one_sided,
    average_fidelity_profile,
    average_fidelity_two_sided,
    dephasing_factor,
    fidelity_advantage_region,
    fidelity_closed_form,
    kraus_operators,
    output_fidelity,
    resource_state,
    sphere_average_fidelity,
    teleport_protocol_oracle,
)
