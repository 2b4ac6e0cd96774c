"""Graded structure, adapted charts and nilpotent approximations of
polynomial sub-Riemannian systems, with a Monte Carlo engine that checks
the small-time behaviour of the associated diffusion loops numerically.

Symbolic tier (exact rational arithmetic): polyalg, grading, chart,
nilpotent.  Numeric tier (double precision, reproducible counter-based
streams): simulate, loops.  The cli module drives the pipeline from
model files.
"""

from .polyalg import (
    Polynomial,
    PolyVectorField,
    PolyMap,
    parse_polynomial,
    lie_bracket,
    pushforward,
    ito_drift_correction,
    apply_operator,
    graded_weight,
    graded_truncate,
)
from .grading import (
    GradedStructure,
    BracketTable,
    Dilation,
    HormanderFailureError,
    build_graded_structure,
    check_drift_in_span,
)
from .chart import (
    AdaptedChart,
    NotAdaptedError,
    ChartConstructionError,
    validate_adapted,
    construct_adapted,
)
from .nilpotent import NilpotentSystem, nilpotentize

__version__ = "0.1.0"
