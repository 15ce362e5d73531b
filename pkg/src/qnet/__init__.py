"""qnet: self-distributive fusion algebras on networks, with rewrites.

The library models pieces of information (estimates, densities,
information matrices, entropies) as colours on the edges of a directed
fusion network, provides the partially-defined update/discount algebra
that combines them, local colour-preserving rewrites that move between
equivalent networks, and an adaptive loop that reconfigures a network
to shield a protected region from faulty input streams.
"""

from .algebra import (
    IDENTITY_OP,
    ConsistencyReport,
    OpParam,
    consistent,
    discount,
    fisher_observed,
    fuse,
)
from .axioms import AxiomReport, check_axioms
from .colours import (
    Colour,
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    UnnormalizedGaussian,
    Vec,
    colour_distance,
    colours_equal,
)
from .errors import (
    DimensionMismatch,
    FusionUndefined,
    InvalidSite,
    InvalidWeight,
    MissingInput,
    MissingRegion,
    MissingTrueCov,
    NonPositiveDensity,
    NotInvertibleHere,
    QnetError,
    SingularCovariance,
    VariantMismatch,
)
from .faults import (
    FaultMask,
    IsolateResult,
    RegionSpec,
    RunTrace,
    Timeline,
    adaptive_run,
    slide_isolate,
    taint_propagate,
)
from .homomorphism import (
    HomReport,
    Homomorphism,
    ci_homomorphism,
    entropy_homomorphism,
    fisher_homomorphism,
    verify_homomorphism,
)
from .network import (
    Colouring,
    Edge,
    Interaction,
    Network,
    PatientPair,
    ValidationReport,
    canonical_key,
    processes,
    propagate,
    terminal_colours,
    validate,
)
from .optimize import (
    COORDINATE,
    GRID,
    Objective,
    ObjectiveKind,
    chernoff_objective,
    local_objective,
    log_integral,
    optimize_params,
    select_best,
)
from .rewrite import (
    ALL_KINDS,
    SLIDE_KINDS,
    ClassResult,
    MoveKind,
    MoveSite,
    apply_move,
    equivalence_class,
    find_moves,
)

__version__ = "0.1.0"
