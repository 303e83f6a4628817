"""Quasi-arithmetic means, Arrow-operator comparison and max-family diagnostics."""

from .comparison import OrderingVerdict, affine_fit, arrow_operator, compare_generators
from .constructions import (
    BumpSpec,
    ConstructionCertificate,
    TargetSetSpec,
    build_prop51_family,
    build_prop53_family,
    covering_bound,
    rational_enumeration,
)
from .diagnostics import (
    DiagnosticReport,
    NGrid,
    TrendConfig,
    TrendVerdict,
    classify_trend,
    derivative_ratio_test,
    dualize,
    empirical_max_test,
    empirical_min_test,
    increasing_check,
    integral_test,
    lower_bounded_estimate,
    obstruction_level,
    phi_implication_check,
    phi_threshold,
    ratio_test,
    x_infinity_estimate,
)
from .domain import Interval
from .generators import (
    Generator,
    GeneratorFamily,
    affine_transform,
    arrow_profile_family,
    builtin_family,
    builtin_generator,
    generator_from_arrow,
    invert,
)
from .means import TwoPointQuery, WeightedSample, power_mean_closed_form, qa_mean, qa_mean_two
from .profiles import ArrowProfile
from .quadrature import QuadratureConfig

__version__ = "0.1.0"
