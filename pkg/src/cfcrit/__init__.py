"""Continued-fraction criteria and circle-rotation measure experiments."""

__version__ = "0.1.0"

from .cf import (
    CirclePoint,
    ConvergentTable,
    InsufficientPrecision,
    SpecError,
    ThetaSpec,
    build_convergents,
    expand_theta,
    frac_multiple,
    golden_spec,
    log_big,
    table_for,
)
from .criteria import (
    CriterionEntry,
    CriterionReport,
    KimSeriesTrace,
    classify,
    condition_b_report,
    condition_b_statistic,
    kim_series,
    sum_largest,
)
from .sequences import (
    DyadicDiagnostics,
    KhinchinReport,
    MinorantResult,
    PhiSpec,
    PsiSpec,
    block_sums,
    dual_phi,
    dual_psi,
    dyadic_block_psi,
    dyadic_diagnostics,
    greatest_khinchin_minorant,
    khinchin_validate,
    phi_of,
    phi_step_from_indices,
    psi_of,
    split_growth_indices,
)
from .arcs import ArcUnion
from .sim import (
    HitResult,
    MeasureProfile,
    hit_count,
    tail_measure_profile,
    target_union,
    union_bound_tail,
)

__all__ = [name for name in dir() if not name.startswith("_")]
