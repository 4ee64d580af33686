"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical parameter or configuration value violates its precondition."""


class HorizonError(ValueError):
    """A requested time lies outside the simulated horizon of an ensemble."""


class StateError(ValueError):
    """A matrix fails the density-matrix invariants (Hermiticity, trace, positivity)."""


class DegeneratePhaseError(ValueError):
    """The decoherence factor is too close to zero to define the Kraus phase."""
