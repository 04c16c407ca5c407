"""Similarity-projection structures: models, subspace geometry, phases, observables and an axiom checker."""

from .core import (
    AlreadyInSubspace,
    AxiomViolation,
    DEFAULT_TOL,
    EmptyModel,
    InvalidState,
    NotHermitian,
    NotOrthogonal,
    NotOrthoSet,
    OrthogonalToSubspace,
    ParseError,
    PhaseUndefined,
    SchemaError,
    SPError,
    SPModel,
    Tolerances,
    similarity,
    similarity_to_set,
    states_equivalent,
)
from .models import (
    ClassicalModel,
    HilbertModel,
    MatrixModel,
    PerturbedHilbertModel,
    SectorDescriptor,
    SectoredModel,
    SectorState,
    load_hilbert_state,
    load_matrix_model,
    load_model,
    load_sectored,
    make_classical,
    make_hilbert,
    make_perturbed_hilbert,
    make_sectored,
)
from .geometry import (
    Subspace,
    cascade_o_project,
    complement,
    dimension_check,
    extend_to_basis,
    intersection,
    is_ortho_set,
    o_project,
    ortho_sum,
    project,
    span,
)
from .phases import (
    PhaseContext,
    PhaseQuantities,
    alpha,
    check_inequality,
    continuity_bound,
    continuity_family,
    omega,
    phase,
    phase_context,
    quantities,
    rho,
)
from .observables import (
    Morphism,
    Observable,
    apply,
    check_invariant_basis,
    check_morphism,
    check_omega_signs,
    fixed_point_check,
    hermitian_to_observable,
    image_is_basis,
    load_observable,
    mean_continuity_slack,
    mean_value,
    mean_value_from_basis,
    observable_from_values,
)
from .checker import AxiomReport, CheckConfig, fuzz, run_suite

__version__ = "0.1.0"
