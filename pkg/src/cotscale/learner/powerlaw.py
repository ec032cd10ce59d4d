"""Least-squares power-law fitting, y = a * x**p + b.

With a fixed exponent the amplitude and offset come from one linear solve;
with a free exponent an outer golden-section search over p wraps the inner
linear solve.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ..validation import as_vector

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# Reference fine-tuning error curve (class count -> error) used as a
# known-answer fixture for the free-exponent fit.
REFERENCE_CURVE = {"a": 0.036, "exponent": 0.31, "b": 0.02}
REFERENCE_CLASS_COUNTS = (5, 10, 20, 25, 50, 100)


def reference_curve_points() -> tuple[np.ndarray, np.ndarray]:
    x = np.array(REFERENCE_CLASS_COUNTS, dtype=float)
    y = REFERENCE_CURVE["a"] * x ** REFERENCE_CURVE["exponent"] + REFERENCE_CURVE["b"]
    return x, y


@dataclass(frozen=True)
class PowerLawFit:
    a: float
    b: float
    exponent: float
    residual: float
    d_estimate: float
    r2: float

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.a * x**self.exponent + self.b


def _linear_solve(x: np.ndarray, y: np.ndarray, p: float):
    design = np.column_stack([x**p, np.ones_like(x)])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sum((y - design @ coef) ** 2))
    return float(coef[0]), float(coef[1]), residual


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def fit_power_law(
    x,
    y=None,
    *,
    exponent: float | None = None,
    bracket: tuple = (0.01, 3.0),
    tol: float = 1e-8,
    grid_points: int = 256,
) -> PowerLawFit:
    """Fit ``y = a * x**p + b`` by least squares.

    ``x`` may be a list of (x, y) pairs when ``y`` is omitted. ``exponent``
    fixes p; otherwise p is found by a coarse scan over ``bracket`` followed
    by golden-section refinement to width ``tol``.
    """
    if y is None:
        pairs = np.asarray(x, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array of (x, y) pairs")
        x, y = pairs[:, 0], pairs[:, 1]
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError("x and y must have equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points, got {x.size}")
    if np.any(x <= 0):
        raise ValueError("x values must be positive")
    if np.all(x == x[0]):
        raise ValueError("all x values equal: singular design")

    if exponent is not None:
        p = float(exponent)
    else:
        lo, hi = bracket
        if not 0 < lo < hi:
            raise ValueError(f"invalid bracket {bracket}")
        grid = np.linspace(lo, hi, grid_points)
        residuals = [_linear_solve(x, y, float(p))[2] for p in grid]
        i = int(np.argmin(residuals))
        left = grid[max(i - 1, 0)]
        right = grid[min(i + 1, grid_points - 1)]
        p = _golden_section(lambda q: _linear_solve(x, y, q)[2], float(left), float(right), tol)

    a, b, residual = _linear_solve(x, y, p)
    ss_total = float(np.sum((y - y.mean()) ** 2))
    if ss_total > 0:
        r2 = 1.0 - residual / ss_total
    else:
        r2 = 1.0 if residual <= 1e-12 else 0.0
    return PowerLawFit(
        a=a, b=b, exponent=p, residual=residual, d_estimate=2.0 / p, r2=r2
    )


class PowerLawRegression(BaseEstimator, RegressorMixin):
    """Estimator wrapper around :func:`fit_power_law`.

    ``exponent=None`` searches the exponent; a float pins it.
    """

    def __init__(self, exponent=None, bracket=(0.01, 3.0), tol=1e-8):
        self.exponent = exponent
        self.bracket = bracket
        self.tol = tol

    def fit(self, X, y):
        x = as_vector(X, "X")
        fit = fit_power_law(
            x, y, exponent=self.exponent, bracket=tuple(self.bracket), tol=self.tol
        )
        self.fit_ = fit
        self.amplitude_ = fit.a
        self.offset_ = fit.b
        self.exponent_ = fit.exponent
        self.d_estimate_ = fit.d_estimate
        self.residual_ = fit.residual
        self.r2_ = fit.r2
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "fit_"):
            raise ValueError("PowerLawRegression is not fitted")
        return self.fit_.predict(as_vector(X, "X"))


FIT_COLUMNS = ("d", "mode", "a", "b", "exponent", "d_estimate", "residual", "r2")


def write_fit_report_csv(entries, path, comment: str | None = None) -> None:
    """Write fit rows; each entry is (d, mode, PowerLawFit)."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(FIT_COLUMNS)
        for d, mode, fit in entries:
            writer.writerow(
                [d, mode, fit.a, fit.b, fit.exponent, fit.d_estimate, fit.residual, fit.r2]
            )
