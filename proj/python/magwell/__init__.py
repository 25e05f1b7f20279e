"""Periodic magnetic-well spectral laboratory.

Thin wrapper over the compiled core: field models, gauge-covariant lattice
operators, certified sparse eigensolves, trial-state residuals, weighted
distance fields and the spectral experiment drivers.
"""

from ._magwell import (  # noqa: F401
    AgmonField,
    AssumptionReport,
    AwayReport,
    B0Result,
    Boundary,
    ClusterReport,
    DomainMask,
    EigenResult,
    FieldKind,
    FieldModel,
    GapCensus,
    GaugeField,
    GaugeKind,
    Grid,
    MagneticOperator,
    Quasimode,
    SpacingReport,
    SpectralHit,
    Stencil,
    WeightFunction,
    WellSet,
    __version__,
    agmon_distance,
    assemble,
    away_region_check,
    build_quasimode,
    check_assumptions,
    cluster_check,
    decay_profile,
    detect_wells,
    eigen_count_below,
    energy_identity_residual,
    enumerate_below,
    find_b0,
    gap_census,
    gauge_transform,
    lowest_eigenpairs,
    loglog_slope,
    conjugated_resolvent_norm,
    make_weight,
    mask_away,
    mask_full,
    mask_wells,
    residual_ratio,
    restrict_operator,
    spacing_bound_check,
    spectral_hit_check,
    tr_plus,
)
