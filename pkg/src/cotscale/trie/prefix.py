"""Prefix trie over token sequences with per-node visit counts."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass


class TrieNode:
    __slots__ = ("children", "count")

    def __init__(self):
        self.children: dict = {}
        self.count = 0


class PrefixTrie:
    """Counts how many inserted sequences pass through each node."""

    def __init__(self):
        self.root = TrieNode()

    def insert(self, sequence) -> None:
        node = self.root
        node.count += 1
        for token in sequence:
            node = node.children.setdefault(token, TrieNode())
            node.count += 1

    @property
    def sequence_count(self) -> int:
        return self.root.count

    def nodes_by_depth(self):
        """Yield (node, depth) in breadth-first order; the root has depth 0."""
        queue = deque([(self.root, 0)])
        while queue:
            node, depth = queue.popleft()
            yield node, depth
            for child in node.children.values():
                queue.append((child, depth + 1))


def build_trie(sequences) -> PrefixTrie:
    trie = PrefixTrie()
    for seq in sequences:
        trie.insert(seq)
    return trie


@dataclass(frozen=True)
class DegreeReport:
    """Branching statistics over the internal (child-bearing) nodes."""

    mean_degree: float
    geo_mean_degree: float
    per_depth: tuple

    @property
    def max_depth(self) -> int:
        return len(self.per_depth)


def degree_report(trie: PrefixTrie) -> DegreeReport:
    """Arithmetic/geometric mean branching, overall and per depth."""
    if trie.sequence_count == 0:
        raise ValueError("trie is empty")
    degrees = []
    by_depth: dict = {}
    for node, depth in trie.nodes_by_depth():
        if node.children:
            k = len(node.children)
            degrees.append(k)
            by_depth.setdefault(depth, []).append(k)
    if not degrees:
        raise ValueError("trie has no internal nodes (only empty sequences inserted)")
    mean = sum(degrees) / len(degrees)
    geo = math.exp(sum(math.log(k) for k in degrees) / len(degrees))
    per_depth = tuple(
        sum(by_depth[d]) / len(by_depth[d]) for d in sorted(by_depth)
    )
    return DegreeReport(mean_degree=mean, geo_mean_degree=geo, per_depth=per_depth)
