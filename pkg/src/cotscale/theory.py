"""Closed-form error bounds and gains for tree-structured task decomposition.

A task with ``N`` distinct answers solved in one shot has expected error
``prefactor * N**(2/d)`` where ``d`` is the intrinsic dimension of the input
domain. Decomposing it into a tree of sub-decisions with per-level degrees
``m_1..m_n`` (product ``N``) replaces ``N**(2/d)`` by the sum of the per-level
terms, which is what makes step-by-step prediction pay off on large tasks.
This module evaluates those bounds exactly, explores them on grids, and
certifies the equal-degree optimum by brute-force enumeration.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "ErrorModelParams",
    "DegreeProfile",
    "GainGrid",
    "direct_error",
    "reason_error",
    "reasoning_gain",
    "constant_degree_gain",
    "fixed_size_gain",
    "optimal_degree",
    "optimal_gain",
    "effective_degree",
    "think_error",
    "thinking_gain",
    "optimal_depth",
    "reasoning_gain_grid",
    "thinking_gain_grid",
    "reasoning_zero_depth",
    "thinking_zero_depth_factor",
    "factorizations",
    "count_factorizations",
    "best_profile",
    "write_grid_csv",
    "write_curve_csv",
]

# Bases above this are exponentiated in log space so arbitrarily large
# integer task sizes work until the result itself overflows a float.
_LOGSPACE_BASE = 1e15


def _power(base: float, exponent: float) -> float:
    if base > _LOGSPACE_BASE:
        return math.exp(exponent * math.log(base))
    return float(base) ** exponent


@dataclass(frozen=True)
class ErrorModelParams:
    """Intrinsic dimension and combined error prefactor.

    The prefactor bundles every constant multiplying the bounds (data density,
    smoothness) into a single positive number; all outputs of this module are
    linear in it.
    """

    d: float
    prefactor: float

    def __post_init__(self) -> None:
        if not self.d > 0:
            raise ValueError(f"intrinsic dimension must be positive, got {self.d}")
        if not self.prefactor > 0:
            raise ValueError(f"prefactor must be positive, got {self.prefactor}")

    @classmethod
    def from_components(cls, c: float, data_count: float, d: float) -> "ErrorModelParams":
        """Combine a raw constant and a dataset size into ``c * data_count**(-1/d)``."""
        if not c > 0 or not data_count > 0:
            raise ValueError("c and data_count must be positive")
        return cls(d=d, prefactor=c * data_count ** (-1.0 / d))

    @property
    def exponent(self) -> float:
        return 2.0 / self.d


@dataclass(frozen=True)
class DegreeProfile:
    """Per-level degrees of a decomposition tree; their product is the task size."""

    degrees: tuple

    def __post_init__(self) -> None:
        degrees = tuple(self.degrees)
        if len(degrees) == 0:
            raise ValueError("a degree profile needs at least one level")
        if any(not m >= 1 for m in degrees):
            raise ValueError(f"all degrees must be >= 1, got {degrees}")
        object.__setattr__(self, "degrees", degrees)

    @property
    def size(self):
        return math.prod(self.degrees)

    @property
    def depth(self) -> int:
        return len(self.degrees)


def _degrees(profile) -> tuple:
    if isinstance(profile, DegreeProfile):
        return profile.degrees
    return DegreeProfile(tuple(profile)).degrees


def direct_error(N, params: ErrorModelParams) -> float:
    """Error bound for predicting one of ``N`` answers in a single step."""
    if not N >= 1:
        raise ValueError(f"task size must be >= 1, got {N}")
    return params.prefactor * _power(N, params.exponent)


def reason_error(profile, params: ErrorModelParams) -> float:
    """Error bound for step-by-step prediction along the given degree profile."""
    return params.prefactor * sum(_power(m, params.exponent) for m in _degrees(profile))


def reasoning_gain(profile, params: ErrorModelParams) -> float:
    """Direct-prediction bound minus the step-by-step bound for one profile.

    Positive values mean decomposition beats answering in one shot; the sign
    flips on small tasks where the sum of per-level terms exceeds the product.
    """
    degrees = _degrees(profile)
    e = params.exponent
    product = math.prod(_power(m, e) for m in degrees)
    total = sum(_power(m, e) for m in degrees)
    return params.prefactor * (product - total)


def constant_degree_gain(m, n, params: ErrorModelParams) -> float:
    """Gain of an equal-degree tree with real-valued degree ``m`` and depth ``n``."""
    if not m >= 1 or not n >= 1:
        raise ValueError(f"degree and depth must be >= 1, got m={m}, n={n}")
    e = params.exponent
    return params.prefactor * (_power(m, e * n) - n * _power(m, e))


def fixed_size_gain(m, N, params: ErrorModelParams) -> float:
    """Gain of an equal-degree tree of degree ``m`` solving a task of size ``N``.

    The depth is the real number ``ln N / ln m`` that makes the leaf count
    exactly ``N``. Requires ``m > 1``.
    """
    if not m > 1:
        raise ValueError(f"degree must exceed 1 at fixed task size, got {m}")
    if not N >= 1:
        raise ValueError(f"task size must be >= 1, got {N}")
    return constant_degree_gain(m, max(math.log(N) / math.log(m), 1.0), params)


def optimal_degree(d: float) -> float:
    """Degree ``e**(d/2)`` minimizing the step-by-step bound at fixed task size."""
    if not d > 0:
        raise ValueError(f"intrinsic dimension must be positive, got {d}")
    return math.exp(d / 2.0)


def optimal_gain(N, d: float) -> float:
    """Largest achievable gain (in units of the prefactor) on a task of size ``N``."""
    if not N >= 1:
        raise ValueError(f"task size must be >= 1, got {N}")
    if not d > 0:
        raise ValueError(f"intrinsic dimension must be positive, got {d}")
    return _power(N, 2.0 / d) - math.e * math.log(N) / (d / 2.0)


def effective_degree(m, r) -> float:
    """Distinct options per step, ``m**(1/r)``, of a depth-stretched tree."""
    if not m >= 1:
        raise ValueError(f"degree must be >= 1, got {m}")
    if not r >= 1:
        raise ValueError(f"depth factor must be >= 1, got {r}")
    return _power(m, 1.0 / r)


def think_error(m, n, r, params: ErrorModelParams) -> float:
    """Error bound after stretching an ``[m]*n`` tree to depth ``r*n``.

    The stretched tree keeps the task size ``m**n`` but spreads it over
    ``r*n`` decisions of effective degree ``m**(1/r)``.
    """
    if not m >= 1 or not n >= 1 or not r >= 1:
        raise ValueError(f"need m >= 1, n >= 1, r >= 1, got m={m}, n={n}, r={r}")
    return params.prefactor * (r * n) * _power(m, 2.0 / (r * params.d))


def thinking_gain(m, n, r, params: ErrorModelParams) -> float:
    """Plain step-by-step bound minus the depth-stretched bound.

    Equals ``reason_error([m]*n) - think_error(m, n, r)``; evaluated in one
    expression so that ``r == 1`` gives exactly zero.
    """
    if not m >= 1 or not n >= 1 or not r >= 1:
        raise ValueError(f"need m >= 1, n >= 1, r >= 1, got m={m}, n={n}, r={r}")
    d = params.d
    return params.prefactor * n * (_power(m, 2.0 / d) - r * _power(m, 2.0 / (r * d)))


def optimal_depth(N, d: float) -> float:
    """Total depth ``(2/d) * ln N`` at which the stretched bound is smallest."""
    if not N >= 1:
        raise ValueError(f"task size must be >= 1, got {N}")
    if not d > 0:
        raise ValueError(f"intrinsic dimension must be positive, got {d}")
    return (2.0 / d) * math.log(N)


# ---------------------------------------------------------------------------
# Grids and boundary curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GainGrid:
    """Gain values over a degree axis and a depth (or depth-factor) axis.

    ``boundary`` holds, per degree, the second-axis value where the gain
    crosses zero (NaN where no crossing exists); ``optimal`` holds the
    second-axis value of largest gain where defined. Both are None for grids
    that do not report curves.
    """

    m_axis: np.ndarray
    second_axis: np.ndarray
    values: np.ndarray
    kind: str
    boundary: np.ndarray | None = None
    optimal: np.ndarray | None = None

    def __post_init__(self) -> None:
        m_axis = np.asarray(self.m_axis, dtype=float)
        second = np.asarray(self.second_axis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if m_axis.ndim != 1 or second.ndim != 1 or m_axis.size == 0 or second.size == 0:
            raise ValueError("grid axes must be non-empty 1-D arrays")
        if np.any(np.diff(m_axis) <= 0) or np.any(np.diff(second) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if values.shape != (m_axis.size, second.size):
            raise ValueError(
                f"values shape {values.shape} does not match axes "
                f"({m_axis.size}, {second.size})"
            )
        if self.kind not in ("reasoning", "thinking"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        for name in ("boundary", "optimal"):
            curve = getattr(self, name)
            if curve is not None and np.asarray(curve).shape != m_axis.shape:
                raise ValueError(f"{name} curve must align with the degree axis")
        object.__setattr__(self, "m_axis", m_axis)
        object.__setattr__(self, "second_axis", second)
        object.__setattr__(self, "values", values)

    @property
    def second_name(self) -> str:
        return "n" if self.kind == "reasoning" else "r"


def _bisect_root(f, lo: float, hi: float, iterations: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("root not bracketed")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def reasoning_zero_depth(m, params: ErrorModelParams, n_max: float = 1e9) -> float:
    """Depth above which an equal-degree tree of degree ``m`` has positive gain.

    Returns 1.0 when the gain is already positive for every depth above one
    (degree at or above the optimum) and NaN when no crossing exists below
    ``n_max``.
    """
    if not m >= 1:
        raise ValueError(f"degree must be >= 1, got {m}")
    if m <= 1.0:
        return math.nan
    if m >= optimal_degree(params.d):
        return 1.0
    e = params.exponent

    def f(n: float) -> float:
        # sign of the gain: m**(e*n) - n * m**e, in log form for stability
        return e * (n - 1.0) * math.log(m) - math.log(n)

    hi = 2.0
    while f(hi) <= 0:
        hi *= 2.0
        if hi > n_max:
            return math.nan
    return _bisect_root(f, max(1.0 + 1e-12, hi / 2.0), hi)


def thinking_zero_depth_factor(m, params: ErrorModelParams) -> float:
    """Depth factor above one at which the stretched-tree gain returns to zero.

    Only degrees above the optimum have a positive-gain window ``1 < r < r0``;
    for smaller degrees the function returns NaN.
    """
    if not m >= 1:
        raise ValueError(f"degree must be >= 1, got {m}")
    a = (2.0 / params.d) * math.log(m) if m > 1 else 0.0
    if a <= 1.0:
        return math.nan

    def f(r: float) -> float:
        # sign of m**(2/d) - r * m**(2/(r*d)) via logs
        return a - math.log(r) - a / r

    return _bisect_root(f, 1.0 + 1e-12, math.exp(a))


def reasoning_gain_grid(m_range, n_range, params: ErrorModelParams) -> GainGrid:
    """Equal-degree gain over real-valued (degree, depth) axes.

    The reported boundary curve is the depth at which the gain turns positive
    for each degree.
    """
    m_axis = np.asarray(list(m_range), dtype=float)
    n_axis = np.asarray(list(n_range), dtype=float)
    if m_axis.size == 0 or n_axis.size == 0:
        raise ValueError("grid ranges must be non-empty")
    if np.any(m_axis < 1) or np.any(n_axis < 1):
        raise ValueError("grid degrees and depths must be >= 1")
    e = params.exponent
    M = m_axis[:, None]
    Nn = n_axis[None, :]
    values = params.prefactor * (M ** (e * Nn) - Nn * M**e)
    boundary = np.array([reasoning_zero_depth(m, params) for m in m_axis])
    return GainGrid(m_axis, n_axis, values, kind="reasoning", boundary=boundary)


def thinking_gain_grid(m_range, r_range, n, params: ErrorModelParams) -> GainGrid:
    """Stretched-tree gain over (degree, depth factor) axes at base depth ``n``.

    Reports the zero-gain boundary (where stretching stops helping) and the
    optimal depth factor ``(2/d) * ln m`` that brings the effective degree to
    the optimum.
    """
    if not n >= 1:
        raise ValueError(f"base depth must be >= 1, got {n}")
    m_axis = np.asarray(list(m_range), dtype=float)
    r_axis = np.asarray(list(r_range), dtype=float)
    if m_axis.size == 0 or r_axis.size == 0:
        raise ValueError("grid ranges must be non-empty")
    if np.any(m_axis < 1) or np.any(r_axis < 1):
        raise ValueError("grid degrees and depth factors must be >= 1")
    d = params.d
    M = m_axis[:, None]
    R = r_axis[None, :]
    values = params.prefactor * n * (M ** (2.0 / d) - R * M ** (2.0 / (R * d)))
    boundary = np.array([thinking_zero_depth_factor(m, params) for m in m_axis])
    with np.errstate(divide="ignore"):
        optimal = (2.0 / d) * np.log(m_axis)
    return GainGrid(m_axis, r_axis, values, kind="thinking", boundary=boundary, optimal=optimal)


# ---------------------------------------------------------------------------
# Brute-force profile optimization
# ---------------------------------------------------------------------------


def factorizations(N: int, min_factor: int = 2) -> Iterator[tuple]:
    """Yield every factorization of ``N`` into integers >= ``min_factor``.

    Each unordered factorization appears once, as its non-decreasing
    representative (which is also the lexicographically smallest ordering).
    ``(N,)`` itself is included.
    """
    if N < 2:
        raise ValueError(f"task size must be >= 2, got {N}")
    yield from _factorizations(N, min_factor)


def _factorizations(n: int, lo: int) -> Iterator[tuple]:
    yield (n,)
    f = lo
    while f * f <= n:
        if n % f == 0:
            for rest in _factorizations(n // f, f):
                yield (f,) + rest
        f += 1


@lru_cache(maxsize=None)
def _count_factorizations(n: int, lo: int) -> int:
    count = 1
    f = lo
    while f * f <= n:
        if n % f == 0:
            count += _count_factorizations(n // f, f)
        f += 1
    return count


def count_factorizations(N: int) -> int:
    if N < 2:
        raise ValueError(f"task size must be >= 2, got {N}")
    return _count_factorizations(N, 2)


def _constant_profiles(N: int) -> Iterator[tuple]:
    # all (m, n) with m**n == N, m >= 2 integer
    yield (N,)
    for n in range(2, N.bit_length() + 1):
        m = round(N ** (1.0 / n))
        for cand in (m - 1, m, m + 1):
            if cand >= 2 and cand**n == N:
                yield (cand,) * n
                break


def best_profile(
    N: int,
    d: float,
    mode: str = "factorizations",
    max_factorizations: int = 1_000_000,
) -> tuple[DegreeProfile, float]:
    """Profile minimizing the per-level error sum, plus that sum.

    In ``factorizations`` mode every factorization of ``N`` into integer
    degrees >= 2 is enumerated; in ``constant-degree`` mode only profiles
    ``[m]*n`` with ``m**n == N`` are considered. Ties on the sum are broken by
    shorter profile, then lexicographically smallest. The returned sum is in
    units of the prefactor (multiply by it for an absolute error).
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValueError(f"task size must be an integer >= 2, got {N!r}")
    if not d > 0:
        raise ValueError(f"intrinsic dimension must be positive, got {d}")
    if mode == "factorizations":
        if count_factorizations(N) > max_factorizations:
            raise ValueError(
                f"{N} has more than {max_factorizations} factorizations; "
                "raise max_factorizations to enumerate anyway"
            )
        candidates = factorizations(int(N))
    elif mode == "constant-degree":
        candidates = _constant_profiles(int(N))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    e = 2.0 / d
    best = min(candidates, key=lambda prof: (sum(f**e for f in prof), len(prof), prof))
    return DegreeProfile(best), sum(f**e for f in best)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def write_grid_csv(grid: GainGrid, path, comment: str | None = None) -> None:
    """Write a grid in long form with header ``m,<n|r>,gain``."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["m", grid.second_name, "gain"])
        for i, m in enumerate(grid.m_axis):
            for j, s in enumerate(grid.second_axis):
                writer.writerow([float(m), float(s), float(grid.values[i, j])])


def write_curve_csv(m_axis, values, path, comment: str | None = None) -> None:
    """Write a per-degree curve with header ``m,value``."""
    m_axis = np.asarray(m_axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if m_axis.shape != values.shape:
        raise ValueError("curve values must align with the degree axis")
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["m", "value"])
        for m, v in zip(m_axis, values):
            writer.writerow([float(m), float(v)])
