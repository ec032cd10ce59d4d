"""Synthetic logical-deduction trees over a boolean root fact.

The truth value at the root is ``1`` iff a context vector ``v`` aligns with a
fixed reference direction. That bit propagates down the tree, with each edge
either copying or negating its parent, so every node's value is the root bit
XOR the number of negations on its path. Leaves are the answers of the task.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from itertools import accumulate
from math import prod

import numpy as np

from ..rng import stream

IDENTITY = "IDENTITY"
NOT = "NOT"
OPERATIONS = (IDENTITY, NOT)


@dataclass(frozen=True, eq=False)
class ReasoningTree:
    """Rooted tree whose edges apply IDENTITY/NOT to a boolean root value.

    Nodes are numbered 1..node_count breadth first, level by level; the root
    is the unlabeled node 0. ``flips[i-1]`` is 1 when the edge above node i
    negates its parent's bit.
    """

    profile: tuple
    context_dim: int
    w: np.ndarray
    flips: tuple

    def __post_init__(self) -> None:
        profile = tuple(int(m) for m in self.profile)
        if not profile or any(m < 1 for m in profile):
            raise ValueError(f"invalid degree profile {self.profile!r}")
        object.__setattr__(self, "profile", profile)
        if self.context_dim < 1:
            raise ValueError(f"context_dim must be >= 1, got {self.context_dim}")
        w = np.array(self.w, dtype=float)
        if w.shape != (self.context_dim,):
            raise ValueError(f"w must have {self.context_dim} components, got shape {w.shape}")
        if abs(float(np.linalg.norm(w)) - 1.0) > 1e-9:
            raise ValueError("reference vector w must be unit norm")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        flips = tuple(int(f) for f in self.flips)
        if len(flips) != self.node_count or any(f not in (0, 1) for f in flips):
            raise ValueError("flips must give one bit per non-root node")
        object.__setattr__(self, "flips", flips)

    @cached_property
    def level_sizes(self) -> tuple:
        return tuple(accumulate(self.profile, lambda acc, m: acc * m))

    @cached_property
    def level_starts(self) -> tuple:
        # first node id of each level, 1-based
        return tuple(1 + s for s in accumulate((0,) + self.level_sizes[:-1]))

    @property
    def node_count(self) -> int:
        sizes = tuple(accumulate(self.profile, lambda acc, m: acc * m))
        return sum(sizes)

    @property
    def depth(self) -> int:
        return len(self.profile)

    @property
    def leaf_count(self) -> int:
        return prod(self.profile)

    @property
    def first_leaf(self) -> int:
        return self.node_count - self.leaf_count + 1

    def leaves(self) -> range:
        return range(self.first_leaf, self.node_count + 1)

    def is_leaf(self, node: int) -> bool:
        return self.first_leaf <= node <= self.node_count

    def level_of(self, node: int) -> int:
        self._check_node(node)
        return bisect_right(self.level_starts, node)

    def parent_of(self, node: int) -> int:
        """Parent node id; 0 denotes the root."""
        level = self.level_of(node)
        if level == 1:
            return 0
        pos = node - self.level_starts[level - 1]
        return self.level_starts[level - 2] + pos // self.profile[level - 1]

    def path_from_root(self, node: int) -> list:
        """Node ids from level 1 down to ``node`` inclusive."""
        path = []
        while node != 0:
            path.append(node)
            node = self.parent_of(node)
        path.reverse()
        return path

    def parity(self, node: int) -> int:
        """XOR of the negations on the path from the root to ``node``."""
        if node == 0:
            return 0
        bit = 0
        for step in self.path_from_root(node):
            bit ^= self.flips[step - 1]
        return bit

    def root_bit(self, v) -> int:
        """1 iff the context aligns with the reference direction (ties map to 0)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.context_dim,):
            raise ValueError(f"context must have {self.context_dim} components")
        return 1 if float(v @ self.w) > 0.0 else 0

    def value(self, v, node: int) -> int:
        self._check_node(node, allow_root=True)
        return self.root_bit(v) ^ self.parity(node)

    def label(self, node: int) -> str:
        self._check_node(node)
        return f"X{node}"

    def leaf_by_label(self, label: str) -> int:
        if not label.startswith("X"):
            raise ValueError(f"unknown node label {label!r}")
        node = int(label[1:])
        self._check_node(node)
        return node

    def operation(self, node: int) -> str:
        self._check_node(node)
        return OPERATIONS[self.flips[node - 1]]

    def _check_node(self, node: int, allow_root: bool = False) -> None:
        lo = 0 if allow_root else 1
        if not lo <= node <= self.node_count:
            raise ValueError(f"unknown node id {node}")


def unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform direction on the unit sphere via normalized Gaussian draws."""
    while True:
        raw = rng.standard_normal(dim)
        norm = float(np.linalg.norm(raw))
        if norm > 1e-12:
            return raw / norm


def generate_tree(profile, context_dim: int, seed: int) -> ReasoningTree:
    """Random tree: reference direction on the sphere, fair coin per edge op."""
    profile = tuple(int(m) for m in profile)
    if not profile or any(m < 1 for m in profile):
        raise ValueError(f"invalid degree profile {profile!r}")
    if context_dim < 1:
        raise ValueError(f"context_dim must be >= 1, got {context_dim}")
    w = unit_vector(stream(seed, "tree-w"), context_dim)
    count = sum(accumulate(profile, lambda acc, m: acc * m))
    flips = tuple(int(b) for b in stream(seed, "tree-edges").integers(0, 2, size=count))
    return ReasoningTree(profile=profile, context_dim=context_dim, w=w, flips=flips)


def node_value(tree: ReasoningTree, v, node_id: int) -> int:
    """Bit at a node for context ``v``: root bit XOR negations on the path."""
    return tree.value(v, node_id)


def structure_profile(m: int, n: int, k: int) -> tuple:
    """Degree profile interpolating between flat and fully structured trees.

    The first ``k-1`` levels have degree ``m``, level ``k`` carries one branch
    of degree ``m**(n-k+1)``, and the remaining levels are trivial, so the
    leaf count stays ``m**n`` for every ``k``.
    """
    if m < 2:
        raise ValueError(f"base degree must be >= 2, got {m}")
    if n < 1:
        raise ValueError(f"depth must be >= 1, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"structure index must be in 1..{n}, got {k}")
    return (m,) * (k - 1) + (m ** (n - k + 1),) + (1,) * (n - k)
