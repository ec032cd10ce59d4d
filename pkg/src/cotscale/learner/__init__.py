"""Student-teacher scaling experiments and power-law fitting."""

from .experiment import SWEEP_COLUMNS, mean_errors, measure_error, sweep, write_sweep_csv
from .memorizer import Memorizer, predict
from .powerlaw import (
    FIT_COLUMNS,
    REFERENCE_CLASS_COUNTS,
    REFERENCE_CURVE,
    PowerLawFit,
    PowerLawRegression,
    fit_power_law,
    reference_curve_points,
    write_fit_report_csv,
)
from .voronoi import VoronoiTask, label, make_task, uniform_sphere

__all__ = [
    "FIT_COLUMNS",
    "Memorizer",
    "PowerLawFit",
    "PowerLawRegression",
    "REFERENCE_CLASS_COUNTS",
    "REFERENCE_CURVE",
    "SWEEP_COLUMNS",
    "VoronoiTask",
    "fit_power_law",
    "label",
    "make_task",
    "mean_errors",
    "measure_error",
    "predict",
    "reference_curve_points",
    "sweep",
    "uniform_sphere",
    "write_fit_report_csv",
    "write_sweep_csv",
]
