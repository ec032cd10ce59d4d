"""Synthetic reasoning-tree tasks and serialized datasets."""

from . import descriptor
from .augment import AugmentedTree, Counterexample, augment_tree, verify_consistency
from .dataset import (
    DEFAULT_THINKING_COUNT,
    Dataset,
    Sample,
    default_reasoning_count,
    format_context,
    load_jsonl,
    parse_trace,
    render_sample,
    render_thinking_sample,
    sample_dataset,
    sample_thinking_dataset,
)
from .tree import (
    IDENTITY,
    NOT,
    OPERATIONS,
    ReasoningTree,
    generate_tree,
    node_value,
    structure_profile,
    unit_vector,
)

__all__ = [
    "AugmentedTree",
    "Counterexample",
    "DEFAULT_THINKING_COUNT",
    "Dataset",
    "IDENTITY",
    "NOT",
    "OPERATIONS",
    "ReasoningTree",
    "Sample",
    "augment_tree",
    "default_reasoning_count",
    "descriptor",
    "format_context",
    "generate_tree",
    "load_jsonl",
    "node_value",
    "parse_trace",
    "render_sample",
    "render_thinking_sample",
    "sample_dataset",
    "sample_thinking_dataset",
    "structure_profile",
    "unit_vector",
    "verify_consistency",
]
