"""Depth-stretched trees with redundant answer paths.

Stretching an equal-degree tree from depth n to r*n keeps the answer set but
gives every answer several leaves, i.e. several equally valid deduction
chains. Internal nodes of the stretched tree get fresh Y labels; each deep
leaf inherits the X label of the answer it is mapped to, and its final edge
operation is solved (not sampled) so both trees agree for every context.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from ..rng import stream
from .tree import ReasoningTree

Counterexample = namedtuple(
    "Counterexample", ["root_bit", "deep_leaf", "deep_bit", "base_leaf", "base_bit"]
)


@dataclass(frozen=True, eq=False)
class AugmentedTree:
    """An equal-degree base tree plus its depth-stretched twin.

    ``leaf_map[i]`` is the base-tree leaf id answered by the i-th deep leaf
    (deep leaves in breadth-first order).
    """

    base: ReasoningTree
    r: float
    deep: ReasoningTree
    leaf_map: tuple

    def __post_init__(self) -> None:
        base, deep = self.base, self.deep
        if len(set(base.profile)) != 1:
            raise ValueError("base tree must have a constant degree")
        m = base.profile[0]
        if deep.profile != (m,) * deep.depth or deep.depth < base.depth:
            raise ValueError("deep tree must keep the base degree and extend the depth")
        if not np.array_equal(base.w, deep.w):
            raise ValueError("base and deep trees must share the reference vector")
        leaf_map = tuple(int(x) for x in self.leaf_map)
        if len(leaf_map) != deep.leaf_count:
            raise ValueError("leaf_map must cover every deep leaf")
        if any(not base.is_leaf(x) for x in leaf_map):
            raise ValueError("leaf_map targets must be base-tree leaves")
        counts = {leaf: 0 for leaf in base.leaves()}
        for target in leaf_map:
            counts[target] += 1
        if max(counts.values()) - min(counts.values()) > 1:
            raise ValueError("leaf_map must be balanced (multiplicities differ by > 1)")
        object.__setattr__(self, "leaf_map", leaf_map)
        object.__setattr__(self, "r", float(self.r))

    @property
    def context_dim(self) -> int:
        return self.base.context_dim

    def mapped_base_leaf(self, deep_leaf: int) -> int:
        if not self.deep.is_leaf(deep_leaf):
            raise ValueError(f"node {deep_leaf} is not a deep leaf")
        return self.leaf_map[deep_leaf - self.deep.first_leaf]

    def deep_label(self, node: int) -> str:
        """Y label for internal deep nodes, the mapped X label for deep leaves."""
        if self.deep.is_leaf(node):
            return self.base.label(self.mapped_base_leaf(node))
        return f"Y{node}"

    def deep_leaves_for(self, base_leaf: int) -> list:
        if not self.base.is_leaf(base_leaf):
            raise ValueError(f"node {base_leaf} is not a base leaf")
        first = self.deep.first_leaf
        return [first + i for i, tgt in enumerate(self.leaf_map) if tgt == base_leaf]


def augment_tree(tree: ReasoningTree, r, seed: int) -> AugmentedTree:
    """Stretch ``tree`` to depth ``r * n`` with a balanced random leaf mapping.

    ``r * n`` must be an integer. Edge operations above the final level are
    sampled; the final level is solved so that every deep leaf reproduces its
    mapped base leaf for both root-bit values. ``r == 1`` returns the base
    tree itself with the identity mapping.
    """
    if len(set(tree.profile)) != 1:
        raise ValueError("augmentation needs a constant-degree base tree")
    if not r >= 1:
        raise ValueError(f"depth factor must be >= 1, got {r}")
    n = tree.depth
    rn_real = float(r) * n
    rn = round(rn_real)
    if abs(rn_real - rn) > 1e-9:
        raise ValueError(f"r * n must be an integer, got {r} * {n} = {rn_real}")
    if r == 1:
        return AugmentedTree(base=tree, r=1.0, deep=tree, leaf_map=tuple(tree.leaves()))

    m = tree.profile[0]
    profile = (m,) * rn
    sizes = [m ** (k + 1) for k in range(rn)]
    node_count = sum(sizes)
    leaf_count = sizes[-1]
    first_leaf = node_count - leaf_count + 1

    flips = list(stream(seed, "augment-edges").integers(0, 2, size=node_count))

    multiplicity = leaf_count // tree.leaf_count
    targets = np.repeat(np.fromiter(tree.leaves(), dtype=int), multiplicity)
    order = stream(seed, "augment-leafmap").permutation(leaf_count)
    leaf_map = tuple(int(t) for t in targets[order])

    # Parity of each internal deep node from the sampled levels, then solve the
    # final edge so deep-leaf parity matches the mapped base-leaf parity.
    parity = [0] * (first_leaf)  # parity[node] for nodes 0..first_leaf-1
    for node in range(1, first_leaf):
        parent = _parent(node, m)
        parity[node] = parity[parent] ^ flips[node - 1]
    for i, leaf in enumerate(range(first_leaf, node_count + 1)):
        parent = _parent(leaf, m)
        flips[leaf - 1] = parity[parent] ^ tree.parity(leaf_map[i])

    deep = ReasoningTree(
        profile=profile, context_dim=tree.context_dim, w=tree.w, flips=tuple(flips)
    )
    return AugmentedTree(base=tree, r=float(r), deep=deep, leaf_map=leaf_map)


def _parent(node: int, m: int) -> int:
    # parent id in a complete m-ary level structure with nodes numbered
    # breadth first from 1 (root = 0)
    level_start = 1
    size = m
    while node >= level_start + size:
        level_start += size
        size *= m
    if level_start == 1:
        return 0
    pos = node - level_start
    prev_start = level_start - size // m
    return prev_start + pos // m


def verify_consistency(aug: AugmentedTree) -> tuple[bool, Counterexample | None]:
    """Check every deep leaf against its mapped base leaf for both root bits.

    Values are recomputed by propagating each root bit down both trees level
    by level, independently of the parity arithmetic used during
    construction. Returns (True, None) or (False, first counterexample).
    Exhaustive: leaf bits depend on the context only through the root bit.
    """
    base, deep = aug.base, aug.deep
    for root_bit in (0, 1):
        base_bits = _propagate(base, root_bit)
        deep_bits = _propagate(deep, root_bit)
        for i, deep_leaf in enumerate(deep.leaves()):
            base_leaf = aug.leaf_map[i]
            if deep_bits[deep_leaf] != base_bits[base_leaf]:
                return False, Counterexample(
                    root_bit=root_bit,
                    deep_leaf=deep_leaf,
                    deep_bit=deep_bits[deep_leaf],
                    base_leaf=base_leaf,
                    base_bit=base_bits[base_leaf],
                )
    return True, None


def _propagate(tree: ReasoningTree, root_bit: int) -> list:
    bits = [root_bit] * (tree.node_count + 1)
    for node in range(1, tree.node_count + 1):
        bits[node] = bits[tree.parent_of(node)] ^ tree.flips[node - 1]
    return bits
