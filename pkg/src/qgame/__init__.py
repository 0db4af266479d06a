"""Two-qubit unitaries as strictly competitive games.

Players each contribute one qubit to a joint computation; payoffs score
how close the computed state lands to each player's preferred basis
outcome.  The package certifies equilibria in closed form, explores the
deviation-inequality geometry, and synthesizes unitaries that make a
chosen output state an equilibrium outcome.
"""

from .equilibria import (
    CASE_IDS,
    CASE_PAIRS,
    DegenerateCoefficientError,
    EquilibriumCertificate,
    GridSpec,
    RegionSpec,
    ResponseCoefficients,
    alternating_best_response,
    best_response_strategy,
    best_response_value,
    case_inequality_holds,
    feasibility_region,
    feasibility_region_swapped,
    response_coefficients,
    search_equilibria,
    verify_equilibrium,
)
from .game import (
    Play,
    PreferenceProfile,
    QuantumGame,
    StrategyParams,
    outcome,
    payoff_angle,
    payoffs,
)
from .gates import (
    BELL_CIRCUIT,
    BELL_MECHANISM,
    CNOT,
    CZ,
    IDENTITY,
    LIBRARY,
    SWAP,
    GateLibraryEntry,
    bell_state,
    gate_from_json_dict,
    gate_to_json_dict,
    get_gate,
    load_gate_file,
    save_gate_file,
)
from .mechanism import (
    EntryConstraint,
    MechanismCertification,
    MechanismTarget,
    SynthesisError,
    analyze_cnot,
    bell_target,
    certify_mechanism,
    derive_constraints,
    synthesize_mechanism,
)
from .qcore import (
    KET0,
    KET1,
    GameUnitary,
    NormalizationError,
    QGameError,
    QubitState,
    TOL,
    Tolerances,
    TwoQubitState,
    UnitarityError,
    apply,
    check_unitary,
    complete_unitary,
    random_qubit_state,
    random_unitary,
    tensor,
    unitarity_deviation,
)

__all__ = [
    "BELL_CIRCUIT",
    "BELL_MECHANISM",
    "CASE_IDS",
    "CASE_PAIRS",
    "CNOT",
    "CZ",
    "DegenerateCoefficientError",
    "EntryConstraint",
    "EquilibriumCertificate",
    "GameUnitary",
    "GateLibraryEntry",
    "GridSpec",
    "IDENTITY",
    "KET0",
    "KET1",
    "LIBRARY",
    "SWAP",
    "MechanismCertification",
    "MechanismTarget",
    "NormalizationError",
    "Play",
    "PreferenceProfile",
    "QGameError",
    "QuantumGame",
    "QubitState",
    "RegionSpec",
    "ResponseCoefficients",
    "StrategyParams",
    "SynthesisError",
    "TOL",
    "Tolerances",
    "TwoQubitState",
    "UnitarityError",
    "alternating_best_response",
    "analyze_cnot",
    "apply",
    "bell_state",
    "bell_target",
    "best_response_strategy",
    "best_response_value",
    "case_inequality_holds",
    "certify_mechanism",
    "check_unitary",
    "complete_unitary",
    "derive_constraints",
    "feasibility_region",
    "feasibility_region_swapped",
    "gate_from_json_dict",
    "gate_to_json_dict",
    "get_gate",
    "load_gate_file",
    "outcome",
    "payoff_angle",
    "payoffs",
    "random_qubit_state",
    "random_unitary",
    "response_coefficients",
    "save_gate_file",
    "search_equilibria",
    "synthesize_mechanism",
    "tensor",
    "unitarity_deviation",
    "verify_equilibrium",
]
