"""Ground-truth teacher: nearest-prototype labeling on the unit sphere."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import stream


@dataclass(frozen=True, eq=False)
class VoronoiTask:
    """Teacher assigning each unit vector to its best-aligned prototype.

    Classes are 1..m; ties go to the lowest class index.
    """

    prototypes: np.ndarray

    def __post_init__(self) -> None:
        protos = np.array(self.prototypes, dtype=float)
        if protos.ndim != 2 or protos.shape[0] < 1:
            raise ValueError("prototypes must be a non-empty (m, d) matrix")
        norms = np.linalg.norm(protos, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("prototypes must be unit norm")
        protos.flags.writeable = False
        object.__setattr__(self, "prototypes", protos)

    @property
    def m(self) -> int:
        return self.prototypes.shape[0]

    @property
    def d(self) -> int:
        return self.prototypes.shape[1]

    def labels(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.argmax(X @ self.prototypes.T, axis=1) + 1

    def label(self, x) -> int:
        return int(self.labels(x)[0])


def uniform_sphere(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    """Uniform points on the unit sphere in R^d (normalized Gaussians)."""
    points = rng.standard_normal((count, d))
    norms = np.linalg.norm(points, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        points[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(points, axis=1)
    return points / norms[:, None]


def make_task(d: int, m: int, seed: int, max_attempts: int = 100) -> VoronoiTask:
    """m prototypes drawn uniformly on the sphere; duplicate draws are resampled."""
    if d < 2:
        raise ValueError(f"input dimension must be >= 2, got {d}")
    if m < 1:
        raise ValueError(f"class count must be >= 1, got {m}")
    rng = stream(seed, "voronoi-prototypes")
    protos = uniform_sphere(rng, m, d)
    for _ in range(max_attempts):
        dots = protos @ protos.T
        np.fill_diagonal(dots, -np.inf)
        dup_rows = np.unique(np.where(dots > 1.0 - 1e-12)[0])
        if dup_rows.size == 0:
            return VoronoiTask(prototypes=protos)
        protos = protos.copy()
        protos[dup_rows] = uniform_sphere(rng, dup_rows.size, d)
    raise RuntimeError("could not draw distinct prototypes")


def label(task: VoronoiTask, x) -> int:
    """Class of one input: argmax dot product, lowest index on ties."""
    return task.label(x)
