"""Serialized prompt/trace pairs for direct, reasoning, and thinking modes.

Serialization follows one fixed convention so datasets are reproducible and
parseable: the prompt is ``[v] Target: X<leaf>`` with the context printed to
six decimal places, and the completion is a space-joined list of
``<node>=<bit>`` assignments ending with the target leaf.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from math import prod

import numpy as np

from ..rng import stream
from .augment import AugmentedTree
from .tree import ReasoningTree

MODES = ("direct", "reasoning", "thinking")

# Dataset-size conventions: reasoning sets grow sublinearly with depth,
# thinking sets use one fixed size. Both are defaults, not requirements.
DEFAULT_THINKING_COUNT = 50_000


def default_reasoning_count(n: int) -> int:
    return round(15_000 * n**0.7)


@dataclass(frozen=True)
class Sample:
    v: np.ndarray
    target: str
    mode: str
    input_text: str
    output_text: str
    answer_bit: int

    def to_record(self) -> dict:
        return {
            "v": [float(x) for x in self.v],
            "target": self.target,
            "mode": self.mode,
            "input_text": self.input_text,
            "output_text": self.output_text,
            "answer_bit": int(self.answer_bit),
        }


@dataclass
class Dataset:
    samples: list
    mode: str
    seed: int

    def __len__(self) -> int:
        return len(self.samples)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s.to_record(), separators=(",", ":")) + "\n" for s in self.samples)

    def write(self, path, comment: str | None = None) -> None:
        with open(path, "w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write(self.to_jsonl())


def load_jsonl(path) -> list:
    """Read dataset records, skipping leading ``#`` comment lines."""
    records = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            records.append(json.loads(line))
    return records


def format_context(v) -> str:
    return "[" + ",".join(f"{float(x):.6f}" for x in v) + "]"


def render_sample(tree: ReasoningTree, v, target_leaf: int, mode: str) -> Sample:
    """Prompt/completion pair for one context and target leaf.

    Direct mode emits only the leaf assignment; reasoning mode lists every
    node on the path from the first level down to the leaf.
    """
    if mode not in ("direct", "reasoning"):
        raise ValueError(f"mode must be 'direct' or 'reasoning', got {mode!r}")
    if not tree.is_leaf(target_leaf):
        raise ValueError(f"target {target_leaf} is not a leaf")
    v = np.asarray(v, dtype=float)
    root = tree.root_bit(v)
    label = tree.label(target_leaf)
    bit = root ^ tree.parity(target_leaf)
    if mode == "direct":
        output = f"{label}={bit}"
    else:
        parts = [f"{tree.label(node)}={root ^ tree.parity(node)}" for node in tree.path_from_root(target_leaf)]
        output = " ".join(parts)
    return Sample(
        v=v,
        target=label,
        mode=mode,
        input_text=f"{format_context(v)} Target: {label}",
        output_text=output,
        answer_bit=bit,
    )


def render_thinking_sample(aug: AugmentedTree, v, deep_leaf: int) -> Sample:
    """Trace through the stretched tree ending in the mapped answer leaf."""
    deep = aug.deep
    if not deep.is_leaf(deep_leaf):
        raise ValueError(f"node {deep_leaf} is not a deep leaf")
    v = np.asarray(v, dtype=float)
    root = deep.root_bit(v)
    base_label = aug.base.label(aug.mapped_base_leaf(deep_leaf))
    parts = []
    for node in deep.path_from_root(deep_leaf)[:-1]:
        parts.append(f"{aug.deep_label(node)}={root ^ deep.parity(node)}")
    bit = root ^ deep.parity(deep_leaf)
    parts.append(f"{base_label}={bit}")
    return Sample(
        v=v,
        target=base_label,
        mode="thinking",
        input_text=f"{format_context(v)} Target: {base_label}",
        output_text=" ".join(parts),
        answer_bit=bit,
    )


def sample_dataset(tree: ReasoningTree, count: int, mode: str, seed: int) -> Dataset:
    """Uniform contexts in [-1, 1]^dim and uniform target leaves, seeded."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    contexts = stream(seed, "dataset-context").uniform(-1.0, 1.0, size=(count, tree.context_dim))
    leaves = np.fromiter(tree.leaves(), dtype=int)
    targets = stream(seed, "dataset-target").integers(0, leaves.size, size=count)
    samples = [render_sample(tree, contexts[i], int(leaves[targets[i]]), mode) for i in range(count)]
    return Dataset(samples=samples, mode=mode, seed=seed)


def sample_thinking_dataset(aug: AugmentedTree, count: int, seed: int) -> Dataset:
    """Thinking traces with the deduction path drawn uniformly per target.

    The prompt names a base-tree answer; the emitted trace follows one of the
    deep paths mapped to it, each with equal likelihood.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    groups = []
    for base_leaf in aug.base.leaves():
        deep_leaves = aug.deep_leaves_for(base_leaf)
        if not deep_leaves:
            raise ValueError(f"base leaf {base_leaf} has no mapped deep leaves")
        groups.append(deep_leaves)
    group_matrix = np.array(groups, dtype=int)  # balanced map -> equal row lengths

    contexts = stream(seed, "dataset-context").uniform(-1.0, 1.0, size=(count, aug.context_dim))
    target_idx = stream(seed, "dataset-target").integers(0, group_matrix.shape[0], size=count)
    path_idx = stream(seed, "dataset-path").integers(0, group_matrix.shape[1], size=count)
    samples = [
        render_thinking_sample(aug, contexts[i], int(group_matrix[target_idx[i], path_idx[i]]))
        for i in range(count)
    ]
    return Dataset(samples=samples, mode="thinking", seed=seed)


_ASSIGNMENT = re.compile(r"^([XY]\d+)=([01])$")


def parse_trace(text: str) -> list:
    """Recover the (label, bit) sequence from an output trace."""
    pairs = []
    for token in text.split(" "):
        match = _ASSIGNMENT.match(token)
        if match is None:
            raise ValueError(f"malformed trace token {token!r}")
        pairs.append((match.group(1), int(match.group(2))))
    return pairs
