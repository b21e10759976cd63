"""Toolkit for Kochen-Specker style operator sets and their two applications:
separations in one-shot zero-error channel capacity and the classical/quantum
chromatic number dichotomy, including the pseudo-telepathy game correspondence.
"""

__version__ = "0.1.0"

from .channels import (
    Channel,
    EaStrategy,
    c0,
    canonical_channel,
    confusability_graph,
    hadamard_separation_bounds,
    ks_from_strategy,
    strategy_from_coloring,
    strategy_from_ks,
    verify_ea_strategy,
)
from .coloring import (
    QuantumColoring,
    from_classical,
    hadamard_coloring,
    ks_characterization,
    verify_normal_form,
)
from .errors import (
    AmbiguityError,
    BudgetError,
    ClassificationError,
    ConvergenceError,
    DimensionError,
    IntegrityError,
    PreconditionError,
    ToolkitError,
)
from .games import (
    GameQuantumStrategy,
    NonlocalGame,
    classical_value,
    coloring_game,
    game_from_ks,
    is_pseudo_telepathy,
    quantum_loses_probability_zero,
)
from .graphs import (
    Graph,
    cartesian_product,
    chromatic_number,
    complement,
    complete_graph,
    cycle_graph,
    empty_graph,
    hadamard_graph,
    independence_number,
    orthogonality_graph,
    strong_product,
)
from .ks import (
    MarkingAssignment,
    MeasurementCover,
    OperatorSet,
    classify,
    enumerate_measurements,
    fixture_cabello18,
    fixture_peres24,
    lift,
    search_marking,
    weak_from_projective,
)
from .linalg import DEFAULT_TOL, TolerancePolicy
from .theta import ThetaResult, lovasz_theta

__all__ = [name for name in dir() if not name.startswith("_")]
