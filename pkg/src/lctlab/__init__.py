"""Log canonical thresholds, Samuel multiplicities and Newton polytopes of monomial ideals."""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    DomainError,
    InvariantError,
    LctLabError,
    ParseError,
    ResourceError,
)
from .ideal import (
    MonomialIdeal,
    colength,
    contains_monomial,
    format_ideal,
    is_m_primary,
    maximal_ideal,
    parse_ideal,
    power,
    product,
    read_ideal,
)
from .polytope import (
    Facet,
    NewtonPolytope,
    complement_volume,
    contains_point,
    integral_closure,
    is_power_of_maximal,
    lct,
    newton_polytope,
    stretch_ideal,
    weighted_threshold,
)
from .multiplicity import (
    IneqReport,
    check_colength_bound,
    check_main_inequality,
    check_weighted_inequality,
    colength_series,
    samuel_multiplicity,
)
from .poly import MonomialOrder, Polynomial, parse_polynomial, parse_polynomials
from .groebner import buchberger, initial_ideal, poly_colength, semicontinuity_report

__all__ = [
    "__version__",
    "BracketError",
    "DomainError",
    "InvariantError",
    "LctLabError",
    "ParseError",
    "ResourceError",
    "MonomialIdeal",
    "colength",
    "contains_monomial",
    "format_ideal",
    "is_m_primary",
    "maximal_ideal",
    "parse_ideal",
    "power",
    "product",
    "read_ideal",
    "Facet",
    "NewtonPolytope",
    "complement_volume",
    "contains_point",
    "integral_closure",
    "is_power_of_maximal",
    "lct",
    "newton_polytope",
    "stretch_ideal",
    "weighted_threshold",
    "IneqReport",
    "check_colength_bound",
    "check_main_inequality",
    "check_weighted_inequality",
    "colength_series",
    "samuel_multiplicity",
    "MonomialOrder",
    "Polynomial",
    "parse_polynomial",
    "parse_polynomials",
    "buchberger",
    "initial_ideal",
    "poly_colength",
    "semicontinuity_report",
]
