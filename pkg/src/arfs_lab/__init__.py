"""arfs-lab: desk-scale numerics for absolutely representing families of
subspaces, exponential-sum approximation, and their explicit decay bounds."""

from .bounds import (
    BoundConstants,
    coef_bound_constants,
    decay_constants,
    family_pt_bound,
    nu,
    nu_product_bound,
    verify_coefficient_bound,
    verify_decay,
)
from .decompose import (
    Decomposition,
    greedy_decompose,
    min_cost_decompose,
    representation_constant,
)
from .distances import (
    GolitschekResult,
    density_gap_bound,
    golitschek_approximant,
    l2_distance_closed_form,
    l2_distance_gram_oracle,
    sup_distance_bound,
)
from .expsums import (
    ExponentSet,
    ExpSum,
    SupNormEstimate,
    beta,
    gap_check,
    point_eval_restriction_norm,
    sup_norm,
)
from .reporting import Report, emit_report
from .spaces import (
    DistanceFunctional,
    DualFunctional,
    NormedSpace,
    SeminormFunctional,
    Subspace,
    SubspaceFamily,
    dual_norm,
    epsilon_star,
    family_from_vectors,
    perturb_family,
    pushforward_family,
    restriction_norm,
    rho0,
    stability_floor,
    subadditive_bound_check,
    subfamily_delete_check,
)

__version__ = "0.1.0"

__all__ = [
    "BoundConstants",
    "Decomposition",
    "DistanceFunctional",
    "DualFunctional",
    "ExpSum",
    "ExponentSet",
    "GolitschekResult",
    "NormedSpace",
    "Report",
    "SeminormFunctional",
    "Subspace",
    "SubspaceFamily",
    "SupNormEstimate",
    "beta",
    "coef_bound_constants",
    "decay_constants",
    "density_gap_bound",
    "dual_norm",
    "emit_report",
    "epsilon_star",
    "family_from_vectors",
    "family_pt_bound",
    "gap_check",
    "golitschek_approximant",
    "greedy_decompose",
    "l2_distance_closed_form",
    "l2_distance_gram_oracle",
    "min_cost_decompose",
    "nu",
    "nu_product_bound",
    "perturb_family",
    "point_eval_restriction_norm",
    "pushforward_family",
    "representation_constant",
    "restriction_norm",
    "rho0",
    "stability_floor",
    "subadditive_bound_check",
    "subfamily_delete_check",
    "sup_distance_bound",
    "sup_norm",
    "verify_coefficient_bound",
    "verify_decay",
]
