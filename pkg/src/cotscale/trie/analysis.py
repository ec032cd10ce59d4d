"""Correlation between task degree and the branching of tokenized traces."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from scipy.stats import spearmanr

from ..rng import derive_seed, stream
from ..taskgen import generate_tree
from .bpe import train_bpe
from .prefix import build_trie, degree_report

REPORT_COLUMNS = (
    "task_degree",
    "trie_mean_degree",
    "trie_geo_mean",
    "depth",
    "per_depth_mean",
)


def enumerate_traces(tree, cap: int | None = None, rng=None) -> list:
    """Every deduction trace of a tree: one per (leaf, root bit) pair.

    When ``cap`` is given and fewer traces are wanted than exist, a uniform
    sample without replacement is taken (original order preserved).
    """
    traces = []
    for leaf in tree.leaves():
        path = tree.path_from_root(leaf)
        parities = [tree.parity(node) for node in path]
        for root_bit in (0, 1):
            traces.append(
                " ".join(
                    f"{tree.label(node)}={root_bit ^ parity}"
                    for node, parity in zip(path, parities)
                )
            )
    if cap is not None and len(traces) > cap:
        if rng is None:
            raise ValueError("sampling traces below the cap needs an rng")
        keep = sorted(rng.choice(len(traces), size=cap, replace=False))
        traces = [traces[i] for i in keep]
    return traces


@dataclass(frozen=True)
class TrieCorrelation:
    rows: tuple
    spearman_rho: float  # NaN when fewer than two task degrees
    trace_cap: int | None


def task_vs_trie_degree(
    m_list,
    n: int,
    traces_per_task: int | None = None,
    seed: int = 0,
    *,
    vocab_size: int = 500,
    context_dim: int = 10,
    tokenize: str = "bpe",
) -> TrieCorrelation:
    """Per-degree trie statistics plus the rank correlation across degrees.

    For each degree, a random tree's traces are tokenized (``tokenize="bpe"``
    trains a fresh tokenizer on them; ``"bytes"`` keeps one token per byte),
    inserted into a prefix trie, and summarized by branching statistics.
    """
    m_list = list(m_list)
    if not m_list:
        raise ValueError("m_list must be non-empty")
    if tokenize not in ("bpe", "bytes"):
        raise ValueError(f"tokenize must be 'bpe' or 'bytes', got {tokenize!r}")
    rows = []
    for m in m_list:
        tree = generate_tree((m,) * n, context_dim, derive_seed(seed, "trie-task", m))
        traces = enumerate_traces(
            tree, cap=traces_per_task, rng=stream(seed, "trie-traces", m)
        )
        if tokenize == "bpe":
            tokenizer = train_bpe(traces, vocab_size)
            sequences = [tokenizer.encode(t) for t in traces]
        else:
            sequences = [list(t.encode("utf-8")) for t in traces]
        report = degree_report(build_trie(sequences))
        rows.append(
            {
                "task_degree": m,
                "trie_mean_degree": report.mean_degree,
                "trie_geo_mean": report.geo_mean_degree,
                "per_depth": report.per_depth,
            }
        )
    if len(m_list) >= 2:
        rho = float(
            spearmanr([r["task_degree"] for r in rows], [r["trie_mean_degree"] for r in rows]).statistic
        )
    else:
        rho = math.nan
    return TrieCorrelation(rows=tuple(rows), spearman_rho=rho, trace_cap=traces_per_task)


def write_degree_report_csv(result: TrieCorrelation, path, comment: str | None = None) -> None:
    """Long-form rows, one per (task degree, trie depth)."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in result.rows:
            for depth, per_depth_mean in enumerate(row["per_depth"]):
                writer.writerow(
                    [
                        row["task_degree"],
                        row["trie_mean_degree"],
                        row["trie_geo_mean"],
                        depth,
                        per_depth_mean,
                    ]
                )


def write_correlation_csv(entries, path, comment: str | None = None) -> None:
    """Rows of (seed, spearman_rho)."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "spearman_rho"])
        for seed, rho in entries:
            writer.writerow([seed, rho])
