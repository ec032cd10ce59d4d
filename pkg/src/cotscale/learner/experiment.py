"""Seeded error measurements and factorial sweeps for the memorizer."""

from __future__ import annotations

import csv
from itertools import product

import numpy as np

from ..rng import derive_seed, stream
from .memorizer import Memorizer
from .voronoi import make_task, uniform_sphere

SWEEP_COLUMNS = ("d", "m", "D", "replicate", "seed", "decode", "error")


def _balanced_training_set(task, D: int, rng, max_batches: int = 500):
    """Training points with (as close as possible to) D/m points per class.

    Rejection-samples uniform sphere points until every class quota is met.
    """
    m = task.m
    quotas = np.full(m, D // m, dtype=int)
    quotas[: D % m] += 1
    collected = [[] for _ in range(m)]
    batch = max(4 * D, 8192)
    for _ in range(max_batches):
        points = uniform_sphere(rng, batch, task.d)
        labels = task.labels(points)
        for cls in range(m):
            need = quotas[cls] - len(collected[cls])
            if need > 0:
                hits = points[labels == cls + 1]
                collected[cls].extend(hits[:need])
        if all(len(c) == q for c, q in zip(collected, quotas)):
            xs = np.concatenate([np.asarray(c) for c in collected if c])
            ys = np.concatenate(
                [np.full(len(c), cls + 1) for cls, c in enumerate(collected) if c]
            )
            return xs, ys
    missing = [cls + 1 for cls in range(m) if len(collected[cls]) < quotas[cls]]
    raise RuntimeError(f"could not fill balanced quotas for classes {missing}")


def measure_error(
    d: int,
    m: int,
    D: int,
    test_count: int,
    decode: str = "greedy",
    seed: int = 0,
    *,
    bandwidth=None,
    balanced: bool = True,
) -> float:
    """Test-error rate of a memorizer trained on D labeled sphere points."""
    if D < m:
        raise ValueError(f"need at least one training point per class: D={D} < m={m}")
    if test_count < 1:
        raise ValueError(f"test_count must be >= 1, got {test_count}")
    task = make_task(d, m, derive_seed(seed, "task"))
    rng_train = stream(seed, "train")
    if balanced:
        train_x, train_y = _balanced_training_set(task, D, rng_train)
    else:
        train_x = uniform_sphere(rng_train, D, d)
        train_y = task.labels(train_x)
    model = Memorizer(bandwidth=bandwidth, decode=decode).fit(train_x, train_y)
    test_x = uniform_sphere(stream(seed, "test"), test_count, d)
    truth = task.labels(test_x)
    predicted = model.predict(test_x, decode=decode, rng=stream(seed, "decode"))
    return float(np.mean(predicted != truth))


def sweep(
    d_list,
    m_list,
    D_list,
    replicates: int,
    decode: str = "greedy",
    seed: int = 0,
    *,
    test_count: int = 2000,
    bandwidth=None,
    balanced: bool = True,
    max_cells: int = 100_000,
) -> list:
    """Full-factorial error table with an independent derived seed per cell."""
    d_list, m_list, D_list = list(d_list), list(m_list), list(D_list)
    if not d_list or not m_list or not D_list or replicates < 1:
        raise ValueError("sweep needs non-empty lists and replicates >= 1")
    cells = len(d_list) * len(m_list) * len(D_list) * replicates
    if cells > max_cells:
        raise ValueError(f"sweep of {cells} cells exceeds max_cells={max_cells}")
    rows = []
    for d, m, D, rep in product(d_list, m_list, D_list, range(replicates)):
        cell_seed = derive_seed(seed, "cell", d, m, D, rep)
        error = measure_error(
            d, m, D, test_count, decode=decode, seed=cell_seed,
            bandwidth=bandwidth, balanced=balanced,
        )
        rows.append(
            {
                "d": d,
                "m": m,
                "D": D,
                "replicate": rep,
                "seed": cell_seed,
                "decode": decode,
                "error": error,
            }
        )
    return rows


def write_sweep_csv(rows, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([row[col] for col in SWEEP_COLUMNS])


def mean_errors(rows, by: str) -> dict:
    """Mean error grouped by one sweep column, e.g. ``by="m"``."""
    groups: dict = {}
    for row in rows:
        groups.setdefault(row[by], []).append(row["error"])
    return {key: float(np.mean(vals)) for key, vals in sorted(groups.items())}
