"""freefam - free exponential (Cauchy-Stieltjes kernel) families."""

__version__ = "0.1.0"

from .cumulants import (
    AdmissibilityReport,
    CumulantSequence,
    RationalVarianceFunction,
    admissibility_report,
    cumulants_from_variance,
    standardize_variance,
    transform_cumulants,
    variance_from_cumulants,
)
from .freeconv import (
    ConvergenceReport,
    clt_cumulants,
    mora_check,
    mp_approximation,
    reproductive_family,
)
from .measures import (
    Measure,
    MeixnerParams,
    family_member,
    kernel_reweight,
    measure_moment,
    meixner_g_closed,
    meixner_measure,
    mp_member,
    semicircle_measure,
)
from .moments import (
    MomentSequence,
    cumulants_from_moments,
    enumerate_nc_partitions,
    hankel_psd,
    moments_from_cumulants,
    support_bound,
)
from .series import TruncatedSeries, series_arith, series_compose, series_revert
from .transforms import (
    bundle_from_cumulants,
    g_numeric,
    mean_to_theta,
    member_moments,
    theta_maps,
)

__all__ = [
    "TruncatedSeries",
    "series_arith",
    "series_compose",
    "series_revert",
    "RationalVarianceFunction",
    "CumulantSequence",
    "AdmissibilityReport",
    "cumulants_from_variance",
    "variance_from_cumulants",
    "transform_cumulants",
    "standardize_variance",
    "admissibility_report",
    "MomentSequence",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "enumerate_nc_partitions",
    "hankel_psd",
    "support_bound",
    "bundle_from_cumulants",
    "g_numeric",
    "theta_maps",
    "mean_to_theta",
    "member_moments",
    "Measure",
    "MeixnerParams",
    "meixner_measure",
    "meixner_g_closed",
    "semicircle_measure",
    "mp_member",
    "kernel_reweight",
    "family_member",
    "measure_moment",
    "ConvergenceReport",
    "reproductive_family",
    "clt_cumulants",
    "mp_approximation",
    "mora_check",
]
