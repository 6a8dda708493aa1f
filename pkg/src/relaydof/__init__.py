"""Exact DoF analysis and scheduling for layered multi-source relay networks."""

from .model import (
    INFINITY,
    DemandError,
    DemandMatrix,
    DocumentError,
    ExtRational,
    Infinity,
    LayerSpec,
    NetworkTopology,
    TopologyError,
    antenna_split,
    parse_demand,
    parse_topology,
    scale_antennas,
    serialize_demand,
    serialize_topology,
    validate_demand,
)
from .analysis import (
    AnalysisError,
    AnalysisReport,
    absolute_and_fractional_gap,
    achievable_sum_dof,
    analyze,
    bounding_set,
    cutset_sum_dof,
    hop_achievable_dof,
    hop_cutset_dof,
    inverse_gap,
    is_optimal,
    relay_loss_factor,
    ultimate_capacity,
)
from .region import RegionVerdict, ScaleResult, Violation, check_demand, max_uniform_scale
from .schedule import (
    PhasePlan,
    Schedule,
    SplitPlan,
    VerificationReport,
    integer_schedule,
    phase_ratios,
    recurrence_sum_dof,
    splitting_plan,
    verify_schedule,
)
from .scaling import (
    FamilyError,
    FamilySpec,
    ScalingVerdict,
    antenna_scale_check,
    classify,
    evaluate_family,
    parse_family,
)

__version__ = "0.1.0"
