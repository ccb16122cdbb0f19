"""growthlab: growth sequences of interval diffeomorphisms.

Computes Gamma_n(f) and the exponential rate gamma(f) for families of maps
of [0, 1], certifies the quadratic growth gap for C^2 maps with rate 1, and
constructs a flat diffeomorphism whose growth is arbitrarily slow along a
prescribed subsequence, verifying the defining properties at finite
precision.
"""

from . import flow as _flow_registration  # registers the flatflow map family
from ._backend import BACKEND_NAME, COMPILED
from .ball import RadialMap, build_radial, middle_third, radial_growth
from .basefn import base_h, h_cumulative, h_value
from .deltafn import (
    DeltaFunction,
    DeltaSchedule,
    MultiIndex,
    TargetSequence,
    build_delta,
    build_schedule,
    enumerate_indices,
    flatness_diagnostic,
    g_sequence,
    parse_u,
    verify_integrability,
    verify_ratio_bound,
    weights,
)
from .diffeo import (
    FixedPointSet,
    Identity,
    IntervalDiffeo,
    Mobius,
    PolyPerturb,
    eval_iterate,
    find_fixed_points,
    flatness_report,
    log_orbit_derivative,
    parse_map_spec,
)
from .flow import FlowMap, build_flow, flow_growth, verify_theorem_1_8
from .gap import (
    ClassificationVerdict,
    RealSequence,
    RegularityData,
    Verdict,
    certify_gap,
    denjoy_check,
    growth_lemma_classify,
    near_convexity_check,
    regularity_constants,
)
from .growth import (
    GammaEstimate,
    GridSpec,
    GrowthRecord,
    OrbitGaps,
    gamma_exponent,
    growth_sequence,
    orbit_gap_bound,
)

__version__ = "0.1.0"
