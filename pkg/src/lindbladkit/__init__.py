"""Simulator and pulse optimizer for coherently driven, dissipative quantum systems."""

from .dynamics import (
    ControlSystem,
    LindbladChannels,
    RateModel,
    TwoLevelSystem,
    complete_positivity_defect,
    dissipator_lindblad,
    dissipator_rates,
    rates_to_lindblad,
    standard_two_level,
    total_hamiltonian,
)
from .errors import (
    CompletePositivityError,
    ConfigError,
    LindbladKitError,
    PhysicsError,
    PositivityError,
)
from .liouville import (
    Liouvillian,
    SupportReport,
    VectorizedState,
    build_liouvillian,
    cancellation_residual,
    devectorize,
    support_disjointness,
    vectorize,
)
from .optimize import (
    FreeParameter,
    Objective,
    OptResult,
    evaluate_objective,
    naive_vs_optimized_report,
    optimize_pulse,
    simulate_pulse,
)
from .propagation import (
    IntegratorConfig,
    PulseSpec,
    Trajectory,
    evolve,
    evolve_fields,
    evolve_unitary,
    resolve_amplitude,
    rotating_frame_two_level,
    sample_pulse,
)
from .pumping import (
    LevelScheme,
    build_pumping_system,
    dark_state_check,
    default_scheme,
    simulate_pumping,
    uniform_ground_mixture,
)
from .states import (
    DensityMatrix,
    StateSpectrum,
    ValidationReport,
    basis_state,
    from_statevector,
    maximally_mixed,
    purity_deficit,
    renyi_entropy,
    spectrum,
    validate,
)

__version__ = "0.1.0"
