"""Plain-text descriptors for trees, sufficient to reload and re-verify.

Floats are written with ``repr`` so they round-trip exactly. Lines starting
with ``#`` are ignored when reading.
"""

from __future__ import annotations

from .augment import AugmentedTree
from .tree import OPERATIONS, ReasoningTree


def tree_to_text(tree: ReasoningTree) -> str:
    lines = [
        "tree",
        "profile: " + ",".join(str(m) for m in tree.profile),
        f"context_dim: {tree.context_dim}",
        "w: " + ",".join(repr(float(x)) for x in tree.w),
        "edges:",
    ]
    for node in range(1, tree.node_count + 1):
        lines.append(f"{node} {tree.parent_of(node)} {tree.operation(node)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def augmented_to_text(aug: AugmentedTree) -> str:
    lines = [
        "augmented",
        f"r: {repr(float(aug.r))}",
        "leaf_map: "
        + ",".join(f"{deep}:{base}" for deep, base in zip(aug.deep.leaves(), aug.leaf_map)),
        "base:",
        tree_to_text(aug.base).rstrip("\n"),
        "deep:",
        tree_to_text(aug.deep).rstrip("\n"),
        "end",
    ]
    return "\n".join(lines) + "\n"


def to_text(obj) -> str:
    if isinstance(obj, AugmentedTree):
        return augmented_to_text(obj)
    if isinstance(obj, ReasoningTree):
        return tree_to_text(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def save(obj, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(to_text(obj))


def from_text(text: str):
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    obj, rest = _parse(lines)
    if rest:
        raise ValueError(f"trailing descriptor content: {rest[0]!r}")
    return obj


def load(path):
    with open(path) as fh:
        return from_text(fh.read())


def _parse(lines):
    if not lines:
        raise ValueError("empty descriptor")
    head = lines[0].strip()
    if head == "tree":
        return _parse_tree(lines)
    if head == "augmented":
        return _parse_augmented(lines)
    raise ValueError(f"unknown descriptor header {head!r}")


def _field(line: str, name: str) -> str:
    prefix = f"{name}:"
    if not line.strip().startswith(prefix):
        raise ValueError(f"expected {name!r} field, got {line!r}")
    return line.strip()[len(prefix):].strip()


def _parse_tree(lines):
    profile = tuple(int(x) for x in _field(lines[1], "profile").split(","))
    context_dim = int(_field(lines[2], "context_dim"))
    w = [float(x) for x in _field(lines[3], "w").split(",")]
    if lines[4].strip() != "edges:":
        raise ValueError(f"expected 'edges:', got {lines[4]!r}")
    flips = {}
    idx = 5
    while idx < len(lines) and lines[idx].strip() != "end":
        node_s, _parent_s, op = lines[idx].split()
        if op not in OPERATIONS:
            raise ValueError(f"unknown edge operation {op!r}")
        flips[int(node_s)] = OPERATIONS.index(op)
        idx += 1
    if idx == len(lines):
        raise ValueError("unterminated tree block")
    tree = ReasoningTree(
        profile=profile,
        context_dim=context_dim,
        w=w,
        flips=tuple(flips[node] for node in range(1, len(flips) + 1)),
    )
    return tree, lines[idx + 1:]


def _parse_augmented(lines):
    r = float(_field(lines[1], "r"))
    pairs = [item.split(":") for item in _field(lines[2], "leaf_map").split(",")]
    leaf_map = {int(deep): int(base) for deep, base in pairs}
    if lines[3].strip() != "base:":
        raise ValueError(f"expected 'base:', got {lines[3]!r}")
    base, rest = _parse_tree(lines[4:])
    if not rest or rest[0].strip() != "deep:":
        raise ValueError("expected 'deep:' block")
    deep, rest = _parse_tree(rest[1:])
    if not rest or rest[0].strip() != "end":
        raise ValueError("unterminated augmented block")
    ordered = tuple(leaf_map[leaf] for leaf in deep.leaves())
    return AugmentedTree(base=base, r=r, deep=deep, leaf_map=ordered), rest[1:]
