"""Shortcuts to adiabaticity for a harmonic trap.

Designs fast, transitionless frequency changes by inverse engineering with Lewis-Riesenfeld
invariants and by transitionless tracking, and certifies both with a split-operator
Schrodinger propagator.
"""

from .counterdiabatic import (
    CounterdiabaticTerm,
    SqueezeParameter,
    apply_squeeze,
    counterdiabatic_invariant,
    h1_fock_matrix,
    h1_term,
    squeeze_parameter,
    tt_hamiltonian,
)
from .dynamics import (
    METHODS,
    ConvergenceStudy,
    PropagationPlan,
    ReferenceFrame,
    SplitOperatorPropagator,
    TrajectoryRecord,
    adiabatic_reference,
    convergence_study,
    fidelity,
    frame_for,
    grid_for,
    propagate,
    required_steps,
    run_extent,
)
from .errors import InvalidInputError, NumericalError, ShortcutError
from .invariant import (
    ErmakovSolution,
    InvariantSpec,
    ScalingExtent,
    design_quintic,
    detect_expulsive,
    ermakov_energy,
    invariant_expectation,
    invert_ermakov,
    lr_basis,
    lr_mode,
    quintic_from_boundary,
    scaling_extent,
    solve_ermakov_forward,
)
from .models import QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction
from .oscillator import (
    dt_matrix_element,
    eigenstate,
    fock_basis,
    inner_product,
    populations,
    quadratic_expectation,
    quadratic_fock_matrix,
)
from .protocols import FrequencyProtocol, ScalingFunction
from .raman import (
    AdiabaticityDiagnostic,
    EffectiveRamanParams,
    MismatchReport,
    RamanParams,
    SidebandCoupling,
    adiabaticity_diagnostic,
    effective_params,
    lamb_dicke_parameter,
    second_sideband_coupling,
    tt_mismatch_report,
)

__all__ = [
    "METHODS",
    "AdiabaticityDiagnostic",
    "ConvergenceStudy",
    "CounterdiabaticTerm",
    "EffectiveRamanParams",
    "ErmakovSolution",
    "FrequencyProtocol",
    "InvalidInputError",
    "InvariantSpec",
    "MismatchReport",
    "NumericalError",
    "PropagationPlan",
    "QuadraticHamiltonian",
    "RamanParams",
    "ReferenceFrame",
    "ScalingExtent",
    "ScalingFunction",
    "ShortcutError",
    "SidebandCoupling",
    "SpatialGrid",
    "SplitOperatorPropagator",
    "SqueezeParameter",
    "TrajectoryRecord",
    "UnitSystem",
    "Wavefunction",
    "adiabatic_reference",
    "adiabaticity_diagnostic",
    "apply_squeeze",
    "convergence_study",
    "counterdiabatic_invariant",
    "design_quintic",
    "detect_expulsive",
    "dt_matrix_element",
    "effective_params",
    "eigenstate",
    "ermakov_energy",
    "fidelity",
    "fock_basis",
    "frame_for",
    "grid_for",
    "h1_fock_matrix",
    "h1_term",
    "inner_product",
    "invariant_expectation",
    "invert_ermakov",
    "lamb_dicke_parameter",
    "lr_basis",
    "lr_mode",
    "populations",
    "propagate",
    "quadratic_expectation",
    "quadratic_fock_matrix",
    "quintic_from_boundary",
    "required_steps",
    "run_extent",
    "scaling_extent",
    "second_sideband_coupling",
    "solve_ermakov_forward",
    "squeeze_parameter",
    "tt_hamiltonian",
    "tt_mismatch_report",
]
