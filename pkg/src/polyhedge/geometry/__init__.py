"""Exact rational polyhedral kernel."""

from .lp import InfeasibleError, LPError, UnboundedError
from .ops import (
    INF,
    EmptySetError,
    LPResult,
    MalformedEpigraphError,
    PolyFn,
    affine_image,
    contains,
    convex_hull_union,
    dual_cone,
    epigraph_section,
    intersect,
    intersect_all,
    is_line_free,
    lex_min,
    linear_fn,
    lp_max,
    lp_min,
    minkowski_sum_cone,
    negate,
    polyfn_eval,
    polyfn_hull,
    project,
    restrict_domain,
    supfun_of_negated_set,
    translate,
)
from .polyhedron import (
    DimensionError,
    HPoly,
    Polyhedron,
    VPoly,
    Vector,
    canonical,
    dd_convert,
    vec,
)

Cone = Polyhedron
