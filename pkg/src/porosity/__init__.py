"""Exact one-sided porosity structure of subsets of R+ near 0.

Library surface: set models (`make_set`, `rescale`, `union_sets`), gap
analysis (`gaps`, `largest_gap_length`, `porosity_plus`), the porosity
classifier (`classify_csp` and its quantities), named example builders,
and a finite-depth pretangent-space simulator over distance sets.
"""
from .errors import (
    BitBudgetExceeded,
    ChainTooShort,
    DepthExceedsFiniteSet,
    EmptyFamily,
    FactorTooLarge,
    InvalidPartition,
    InvalidSpec,
    InvalidTauRule,
    LengthMismatch,
    NoAdmissibleGaps,
    NoStableSubsequenceAtDepth,
    PorosityError,
    RatioNotVanishing,
    TauNotInSet,
    WindowNotCovered,
    ZeroIsolated,
)
from .rational import (
    DEFAULT_BIT_BUDGET,
    DEFAULT_DEPTH,
    DEFAULT_EPSILON,
    DEFAULT_TOL,
    Q,
    format_rational,
    parse_rational,
)
from .sets import (
    NO,
    UNKNOWN,
    YES,
    PorousSet,
    SetSpec,
    accumulates_at_zero,
    enumerate_points,
    make_set,
    require_points,
    rescale,
    union_sets,
)
from .gaps import (
    Gap,
    GapChain,
    GapMeasure,
    PorosityEstimate,
    admissible_chains,
    admissible_gaps,
    chain_embeds,
    gaps,
    largest_gap_length,
    porosity_plus,
)
from .metrics import (
    ChainCoverResult,
    ClearanceResult,
    CoverSupremum,
    DefeatRecord,
    PorosityCertificate,
    RatioEquivalence,
    SeparationResult,
    TruncatedSequence,
    chain_cover_ratio,
    chain_separation,
    classify_csp,
    clearance_test,
    cover_ratio_supremum,
    defeat_scan,
    ratio_equivalent,
    tau_sample_family,
    universal_chain,
)
from .constructions import (
    Prop28Family,
    doubled_gap_set,
    example_ratio_vanishing,
    prop28_family,
    ratio_growth_check,
)
from .pretangent import (
    FamilyProfile,
    NormalityResult,
    PretangentApprox,
    RadiusBounds,
    ScalingSequence,
    SpaceExtremes,
    StabilityResult,
    build_self_stable,
    family_profile,
    is_normal_scaling,
    limit_ratio,
    monotone_envelope,
    sample_radius_bounds,
    space_extremes,
)
from .report import AnalysisReport

__version__ = "0.1.0"
