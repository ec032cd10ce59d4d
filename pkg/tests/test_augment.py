from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from cotscale.rng import stream
from cotscale.taskgen import (
    AugmentedTree,
    ReasoningTree,
    augment_tree,
    generate_tree,
    parse_trace,
    render_thinking_sample,
    sample_thinking_dataset,
    verify_consistency,
)
from cotscale.taskgen import descriptor


def base_2x2():
    return ReasoningTree(
        profile=(2, 2), context_dim=2, w=np.array([1.0, 0.0]), flips=(0, 1, 1, 0, 1, 0)
    )


def figure_augmented():
    """Hand-built stretched twin of the 2x2 example (depth 3, r = 1.5).

    Note the two deep leaves mapped to X3 deliberately disagree with the base
    tree; they double as a counterexample fixture for verify_consistency.
    """
    deep = ReasoningTree(
        profile=(2, 2, 2),
        context_dim=2,
        w=np.array([1.0, 0.0]),
        flips=(1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1),
    )
    return AugmentedTree(base=base_2x2(), r=1.5, deep=deep, leaf_map=(3, 6, 4, 5, 6, 3, 5, 4))


class TestAugmentTree:
    def test_shape_of_r15(self):
        tree = generate_tree([2, 2], 4, seed=0)
        aug = augment_tree(tree, 1.5, seed=1)
        assert aug.deep.depth == 3
        assert aug.deep.leaf_count == 8
        counts = Counter(aug.leaf_map)
        assert set(counts) == set(tree.leaves())
        assert all(c == 2 for c in counts.values())

    def test_r1_is_identity(self):
        tree = generate_tree([3, 3], 4, seed=2)
        aug = augment_tree(tree, 1, seed=9)
        assert aug.deep is tree
        assert aug.leaf_map == tuple(tree.leaves())
        assert verify_consistency(aug) == (True, None)

    def test_constructed_trees_are_consistent(self):
        ok_all = True
        rng = stream(0, "configs")
        for _ in range(100):
            m = int(rng.choice([2, 3, 4]))
            n = int(rng.choice([2, 3]))
            r_choices = [rn / n for rn in range(n, 7)]
            r = float(rng.choice(r_choices))
            tree = generate_tree([m] * n, 3, seed=int(rng.integers(1 << 30)))
            aug = augment_tree(tree, r, seed=int(rng.integers(1 << 30)))
            ok, counterexample = verify_consistency(aug)
            ok_all = ok_all and ok and counterexample is None
        assert ok_all

    def test_balance_invariant(self):
        tree = generate_tree([3] * 2, 3, seed=5)
        aug = augment_tree(tree, 2.0, seed=6)
        counts = Counter(aug.leaf_map)
        assert max(counts.values()) - min(counts.values()) <= 1

    def test_rejects_bad_inputs(self):
        tree = generate_tree([2, 3], 4, seed=0)  # non-constant degree
        with pytest.raises(ValueError):
            augment_tree(tree, 2.0, seed=0)
        square = generate_tree([2, 2], 4, seed=0)
        with pytest.raises(ValueError):
            augment_tree(square, 1.2, seed=0)  # r*n not integer
        with pytest.raises(ValueError):
            augment_tree(square, 0.5, seed=0)

    def test_deterministic(self):
        tree = generate_tree([2, 2], 4, seed=3)
        a = augment_tree(tree, 2.0, seed=4)
        b = augment_tree(tree, 2.0, seed=4)
        assert descriptor.to_text(a) == descriptor.to_text(b)


class TestVerifyConsistency:
    def test_detects_flipped_final_edge(self):
        tree = generate_tree([2, 2], 4, seed=7)
        aug = augment_tree(tree, 1.5, seed=8)
        flips = list(aug.deep.flips)
        corrupted_leaf = aug.deep.first_leaf + 3
        flips[corrupted_leaf - 1] ^= 1
        broken = AugmentedTree(
            base=aug.base,
            r=aug.r,
            deep=ReasoningTree(
                profile=aug.deep.profile,
                context_dim=aug.deep.context_dim,
                w=aug.deep.w,
                flips=tuple(flips),
            ),
            leaf_map=aug.leaf_map,
        )
        ok, counterexample = verify_consistency(broken)
        assert not ok
        assert counterexample.deep_leaf == corrupted_leaf
        assert counterexample.deep_bit != counterexample.base_bit

    def test_reports_figure_inconsistency(self):
        # the hand-built fixture's X3 leaves are wrong on purpose
        ok, counterexample = verify_consistency(figure_augmented())
        assert not ok
        assert counterexample.base_leaf == 3


class TestThinkingSerialization:
    def test_figure_outputs(self):
        aug = figure_augmented()
        v = np.array([1.0, 0.0])  # root bit 1
        deep_leaves_for_x5 = aug.deep_leaves_for(5)
        assert deep_leaves_for_x5 == [10, 13]
        texts = {render_thinking_sample(aug, v, leaf).output_text for leaf in deep_leaves_for_x5}
        assert texts == {"Y1=0 Y4=1 X5=1", "Y2=1 Y6=0 X5=1"}
        sample = render_thinking_sample(aug, v, 10)
        assert sample.input_text == "[1.000000,0.000000] Target: X5"
        assert sample.target == "X5"
        assert sample.answer_bit == 1

    def test_dataset_final_assignment_names_base_target(self):
        tree = generate_tree([2, 2], 5, seed=10)
        aug = augment_tree(tree, 2.0, seed=11)
        ds = sample_thinking_dataset(aug, 60, seed=12)
        for sample in ds.samples:
            parsed = parse_trace(sample.output_text)
            assert parsed[-1][0] == sample.target
            assert parsed[-1][1] == sample.answer_bit
            assert all(label.startswith("Y") for label, _ in parsed[:-1])
            assert len(parsed) == aug.deep.depth

    def test_trace_bits_match_tree_values(self):
        tree = generate_tree([3, 3, 3], 4, seed=1)
        aug = augment_tree(tree, 5 / 3, seed=2)
        ds = sample_thinking_dataset(aug, 30, seed=3)
        for sample in ds.samples:
            parsed = parse_trace(sample.output_text)
            base_leaf = aug.base.leaf_by_label(sample.target)
            assert parsed[-1][1] == aug.base.value(sample.v, base_leaf)
            for label, bit in parsed[:-1]:
                assert bit == aug.deep.value(sample.v, int(label[1:]))

    def test_path_choice_uniform(self):
        tree = generate_tree([2, 2], 3, seed=20)
        aug = augment_tree(tree, 2.0, seed=21)  # 4 deep paths per base leaf
        ds = sample_thinking_dataset(aug, 100_000, seed=22)
        target = aug.base.label(next(iter(aug.base.leaves())))
        prefixes = Counter(
            s.output_text.rsplit(" ", 1)[0] for s in ds.samples if s.target == target
        )
        # bit patterns differ per context; group by the Y-node ids on the path
        paths = Counter()
        for prefix, count in prefixes.items():
            key = tuple(label for label, _ in parse_trace(prefix + f" {target}=0")[:-1])
            paths[key] += count
        assert len(paths) == 4
        _, p_value = chisquare(list(paths.values()))
        assert p_value > 1e-4

    def test_count_validation(self):
        tree = generate_tree([2, 2], 3, seed=0)
        aug = augment_tree(tree, 1.5, seed=0)
        with pytest.raises(ValueError):
            sample_thinking_dataset(aug, 0, seed=0)

    def test_dataset_determinism(self):
        tree = generate_tree([2, 2], 3, seed=30)
        aug = augment_tree(tree, 1.5, seed=31)
        a = sample_thinking_dataset(aug, 40, seed=32).to_jsonl()
        b = sample_thinking_dataset(aug, 40, seed=32).to_jsonl()
        assert a == b


class TestAugmentedDescriptor:
    def test_roundtrip(self):
        tree = generate_tree([2, 2], 4, seed=13)
        aug = augment_tree(tree, 1.5, seed=14)
        text = descriptor.to_text(aug)
        clone = descriptor.from_text(text)
        assert descriptor.to_text(clone) == text
        ok, _ = verify_consistency(clone)
        assert ok
