"""Simulation and estimation toolkit for spatial two-photon interference
measurements of a transverse beam deflection."""

from .errors import (
    ConfigurationError,
    DomainError,
    FitError,
    HomSenseError,
    NonIdentifiableError,
    QuadratureError,
    ResolutionError,
)
from .model import (
    ANTISYMMETRIC,
    SYMMETRIC,
    BeamGeometry,
    Deflection,
    ModeGrid,
    NoiseModel,
    OutcomeTriple,
    coincidence_density,
    coincidence_oracle,
    conditional_outcome_probabilities,
    envelope,
    loss_map,
    oracle_refinement_grids,
    outcome_densities,
    pair_coincidence_density,
    position_to_momentum,
)
from .quadrature import QuadratureResult, QuadratureSpec, integrate, integrate_envelope_weighted
from .fisher import (
    FisherResult,
    WorkingPoint,
    classical_fisher_information,
    cramer_rao_std,
    fisher_surface,
    optimal_working_point,
    qfi_moment_oracle,
    quantum_fisher_information,
)
from .sampler import (
    EventBatch,
    EventRecord,
    InterferencePattern,
    Outcome,
    RngSeed,
    coincidence_rate_profile,
    sample_event,
    scan_pattern,
    simulate_run,
)
from .estimator import (
    DeflectionEstimate,
    PatternFit,
    VarianceStudy,
    fit_fringe_profile,
    fit_pattern,
    log_likelihood,
    mle_deflection,
    variance_study,
)

__version__ = "0.1.0"

__all__ = [
    "ANTISYMMETRIC",
    "SYMMETRIC",
    "BeamGeometry",
    "ConfigurationError",
    "Deflection",
    "DeflectionEstimate",
    "DomainError",
    "EventBatch",
    "EventRecord",
    "FisherResult",
    "FitError",
    "HomSenseError",
    "InterferencePattern",
    "ModeGrid",
    "NoiseModel",
    "NonIdentifiableError",
    "Outcome",
    "OutcomeTriple",
    "PatternFit",
    "QuadratureError",
    "QuadratureResult",
    "QuadratureSpec",
    "ResolutionError",
    "RngSeed",
    "VarianceStudy",
    "WorkingPoint",
    "classical_fisher_information",
    "coincidence_density",
    "coincidence_oracle",
    "coincidence_rate_profile",
    "conditional_outcome_probabilities",
    "cramer_rao_std",
    "envelope",
    "fisher_surface",
    "fit_fringe_profile",
    "fit_pattern",
    "integrate",
    "integrate_envelope_weighted",
    "log_likelihood",
    "loss_map",
    "mle_deflection",
    "optimal_working_point",
    "oracle_refinement_grids",
    "outcome_densities",
    "pair_coincidence_density",
    "position_to_momentum",
    "qfi_moment_oracle",
    "quantum_fisher_information",
    "sample_event",
    "scan_pattern",
    "simulate_run",
    "variance_study",
]
