"""rieszlab: numerical laboratory for power-law integral-operator quotients.

Discretizes compact model manifolds, assembles Riesz and Green-type
kernel matrices in both the classical (alpha < n) and reversed
(alpha > n) regimes, optimizes the associated energy quotients, and
cross-checks every result against closed forms, scaling laws and
inequality suites.
"""

from .geometry import (
    QuadratureManifold,
    build_euclidean_patch,
    build_flat_torus,
    build_sphere,
    load_manifold,
    manifold_from_json,
    manifold_to_json,
    rescale,
    save_manifold,
    unit_ball_volume,
)
from .kernel import KernelMatrix, KernelSpec, apply, assemble
from .functional import (
    Density,
    QuotientSetup,
    bilinear,
    gradient,
    lp_functional,
    quotient,
)
from .optimize import (
    ContinuationTrace,
    QuotientResult,
    concentration_metric,
    continuation,
    initial_density,
    maximize_quotient,
    minimize_quotient,
)
from .analytic import (
    BubbleParams,
    SharpConstant,
    bubble_eval,
    fit_power_law,
    funk_hecke_constant,
    funk_hecke_image,
    mass_gap_bound,
    sharp_constant_sphere,
    truncation_error_bound,
)
from .diagnostics import (
    PartitionOfUnity,
    WeakTypeProfile,
    build_partition,
    commutator_norm,
    el_constancy,
    epsilon_level_check,
    weak_type_profile,
    young_check,
)

__version__ = "0.1.0"
