"""Bergman kernels of generalized complex ellipsoids."""

from ._core import (
    CoveringCheck,
    EllipsoidSpec,
    HoloMap,
    IdentityCheck,
    KernelSeries,
    ProjectedFunction,
    QuadratureGrid,
    RamadanovTable,
    SearchConfig,
    SearchReport,
    SearchStatus,
    TestFunction,
    TransformCheck,
    TransferReport,
    ball_kernel,
    bell_projection_identity_check,
    build_series,
    check_bell_covering_law,
    check_biholomorphic_law,
    continuation_radius_proxy,
    default_sample_points,
    doctored_disc_series,
    eval_kernel,
    log_moment,
    polydisc_kernel,
    project,
    ramadanov_experiment,
    volume,
    zero_search,
    zero_transfer_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
