"""Finite-dimensional quantum mechanics with a deformed inner product <phi|A|psi>.

Implements the A-renormalized state update, the Bell-state steering
protocol it breaks, and a randomized certifier that finds signalling
witnesses for any metric not proportional to the identity.
"""

from .dynamics import (
    EvolutionRecord,
    UnitaryGate,
    convexity_defect,
    evolve_ensemble,
    evolve_pure,
    named_gate,
    norm_shift,
)
from .metric import (
    AxiomReport,
    MetricOperator,
    a_norm_squared,
    bloch_decomposition,
    diag_metric,
    inner_product_A,
    normalize_A,
    validate_metric,
    verify_axioms,
)
from .protocol import (
    ProtocolConfig,
    ProtocolOutcome,
    SignallingCertificate,
    certify,
    run_protocol,
    signalling_magnitude,
    steer,
    sweep_lambda,
)
from .states import (
    DensityOperator,
    Ensemble,
    MeasurementProjector,
    PureState,
    basis_states,
    bell_state,
    check_trace_condition,
    ensemble_to_density,
    probability_standard,
    probability_weighted,
)

__version__ = "0.1.0"

__all__ = [
    "a_norm_squared",
    "AxiomReport",
    "basis_states",
    "bell_state",
    "bloch_decomposition",
    "certify",
    "check_trace_condition",
    "convexity_defect",
    "DensityOperator",
    "diag_metric",
    "Ensemble",
    "ensemble_to_density",
    "EvolutionRecord",
    "evolve_ensemble",
    "evolve_pure",
    "inner_product_A",
    "MeasurementProjector",
    "MetricOperator",
    "named_gate",
    "norm_shift",
    "normalize_A",
    "probability_standard",
    "probability_weighted",
    "ProtocolConfig",
    "ProtocolOutcome",
    "PureState",
    "run_protocol",
    "signalling_magnitude",
    "SignallingCertificate",
    "steer",
    "sweep_lambda",
    "UnitaryGate",
    "validate_metric",
    "verify_axioms",
]
