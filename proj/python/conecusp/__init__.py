"""Cone and cusp singularities of hyperbolic metrics built from meromorphic sums."""

from ._core import (
    DensityField,
    DevelopingMap,
    NumericalError,
    Sum,
    classify,
    curvature_check,
    estimate_lambda0,
    indicial_exponents,
    locate_zeros,
    measure_cone_angle,
    monodromy,
    rouche_report,
    run,
    sample_grid,
    schwarzian,
    set_threads,
    truncate,
    winding_count,
)

__all__ = [
    "DensityField",
    "DevelopingMap",
    "NumericalError",
    "Sum",
    "classify",
    "curvature_check",
    "estimate_lambda0",
    "indicial_exponents",
    "locate_zeros",
    "measure_cone_angle",
    "monodromy",
    "rouche_report",
    "run",
    "sample_grid",
    "schwarzian",
    "set_threads",
    "truncate",
    "winding_count",
]
