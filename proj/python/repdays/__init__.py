"""Representative-day clustering of hourly load, solar and wind profiles."""

from ._core import (
    ArgumentError,
    DataError,
    FormatError,
    ahc,
    brute_force_dtw,
    distance_matrix,
    dtw_distance,
    dtw_path,
    fit_ahc,
    generate,
    kmeans,
    multivariate_dtw,
    seasonal_coherence,
    sweep,
    validate,
)

__all__ = [
    "ArgumentError",
    "DataError",
    "FormatError",
    "ahc",
    "brute_force_dtw",
    "distance_matrix",
    "dtw_distance",
    "dtw_path",
    "fit_ahc",
    "generate",
    "kmeans",
    "multivariate_dtw",
    "seasonal_coherence",
    "sweep",
    "validate",
]
