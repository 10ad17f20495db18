"""Certified quantitative bounds for functions with controlled derivatives.

Weight sequences and their degrees, univariate zero-count bounds from
derivative control, Remez-type constants and their measure/oscillation
consequences, and brute-force oracles that verify every bound at desk scale.
"""

__version__ = "0.1.0"

from .enclosure import CReal, Enc, working_precision
from .errors import (
    BoundaryUndecidable,
    Inconclusive,
    InvalidRange,
    ParseError,
    TameBoundsError,
)
from .weights import (
    INF,
    DegreeResult,
    FullWeight,
    WeightKind,
    WeightSpec,
    admissible_data,
    bump_necessary_condition,
    degree,
    is_quasianalytic,
    j0,
    sigma,
    truncate,
)