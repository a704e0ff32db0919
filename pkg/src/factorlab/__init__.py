"""factorlab: sharp lower bounds for sup-norms of products of homogeneous
polynomials on complex lp spheres and small Schatten classes."""

from .constants import (
    ConstantsRecord,
    DegreeList,
    all_constants,
    bst_constant,
    dn_bound,
    guaranteed_lower_bound,
    hilbert_constant,
    lemma1_bound,
    p_constant,
    sandwich_bounds,
)
from .errors import FactorlabError
from .extremal import (
    PolyTuple,
    RatioReport,
    certify_equality,
    certify_roots_of_unity,
    coordinate_tuple,
    exact_sup_norm,
    roots_of_unity_forms,
    splitting_witness,
)
from .norms import (
    EstimatorConfig,
    NormEstimate,
    brute_force_norm,
    dual_exponent,
    estimate_sup_norm,
    linear_power_norm_exact,
    monomial_norm_exact,
    two_block_sup,
    vector_p_norm,
)
from .poly import (
    HomogeneousPoly,
    coordinate_power,
    depends_only_on,
    embed,
    evaluate,
    linear_form_power,
    make_poly,
    multiply,
    poly_from_json,
    poly_to_json,
    product,
)
from .schatten import (
    ProjectionPair,
    matrix_poly_sup,
    pinch,
    pinching_checks,
    schatten_norm,
)
from .search import SearchConfig, SearchResult, minimize_ratio, random_poly, ratio, verify_batch

__version__ = "0.1.0"
