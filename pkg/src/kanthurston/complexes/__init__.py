from .cube import (
    CubeComplex,
    CubeComplexBuilder,
    Pushout,
    Subcomplex,
    cubical_subdivision,
    disjoint_union,
    extract,
    glue,
    grid,
    identify,
    interval,
    is_isomorphic,
    product,
    standard_cube,
)
from .links import (
    CubicalityReport,
    GromovReport,
    SimplexComplex,
    cubicality_check,
    gromov_check,
    is_combinatorially_convex,
    vertex_link,
)
from .maps import (
    CellularMap,
    Involution,
    check_cellular_map,
    check_involution,
    compose_maps,
    fixed_subcomplex,
    identity_map,
    propagate_map,
    quotient_by_involution,
)
from .simplicial import (
    DeltaComplex,
    SimplicialComplex,
    barycentric_subdivision,
    category_c_check,
    is_flag,
    is_full_subcomplex,
)

__all__ = [
    "CellularMap",
    "CubeComplex",
    "CubeComplexBuilder",
    "CubicalityReport",
    "DeltaComplex",
    "GromovReport",
    "Involution",
    "Pushout",
    "SimplexComplex",
    "SimplicialComplex",
    "Subcomplex",
    "barycentric_subdivision",
    "category_c_check",
    "check_cellular_map",
    "check_involution",
    "compose_maps",
    "cubical_subdivision",
    "cubicality_check",
    "disjoint_union",
    "extract",
    "fixed_subcomplex",
    "glue",
    "gromov_check",
    "grid",
    "identify",
    "identity_map",
    "interval",
    "is_combinatorially_convex",
    "is_flag",
    "is_full_subcomplex",
    "is_isomorphic",
    "product",
    "propagate_map",
    "quotient_by_involution",
    "standard_cube",
    "vertex_link",
]
