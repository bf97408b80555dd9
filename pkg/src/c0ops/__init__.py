"""Desk-scale toolkit for finite Blaschke products, model spaces,
invariant subspaces of truncated uniform Jordan operators, and the
quasiaffinity constructions relating them."""

from .errors import (
    AmbientMismatch,
    C0OpsError,
    DegenerateGram,
    DivisibilityFailure,
    HypothesisViolated,
    IllConditioned,
    ModelTooLong,
    NotADivisor,
    NotAnnihilated,
    NotInSubspace,
    NotInvariant,
    OutsideDisc,
    PreconditionViolated,
    SingularResolvent,
    TruncationTooSmall,
)
from .inner import ONE, InnerFunction, all_divisors, blaschke, divides, gcd, lcm, monomial, quotient
from .jordan import (
    JordanModel,
    canonical_subspace,
    compression_matrix,
    interleaved_divisors,
    jordan_model_of,
    minimal_function,
    random_invariant_subspace,
    restriction_matrix,
    subspace_models,
)
from .model_space import (
    ModelSpace,
    ModelVector,
    build_model_space,
    functional_calculus,
    project_onto_submodel,
)
from .quasiaffine import (
    DensityRow,
    QuasiaffinityRecord,
    WeightSchedule,
    build_X,
    build_Y_main,
    compression_intertwiner,
    density_sweep,
    random_density_targets,
    solve_norm_preserving,
)
from .subspaces import (
    AmbientSpace,
    SubspaceFrame,
    image_closure,
    invariant_subspace_of_block,
    is_invariant,
    load_subspace,
    orthocomplement,
    orthonormalize,
    principal_distance,
)
from .verify import (
    CounterexampleReport,
    VerifyReport,
    cordiag_demo,
    counterexample_search,
    verify_orbit,
)

__version__ = "0.1.0"
