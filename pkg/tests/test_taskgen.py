import json

import numpy as np
import pytest

from cotscale.rng import stream
from cotscale.taskgen import (
    ReasoningTree,
    descriptor,
    format_context,
    generate_tree,
    load_jsonl,
    node_value,
    parse_trace,
    render_sample,
    sample_dataset,
    structure_profile,
)


def example_tree():
    # 2x2 tree: X1 identity, X2 NOT, X3 NOT, X4 identity, X5 NOT, X6 identity
    return ReasoningTree(
        profile=(2, 2),
        context_dim=2,
        w=np.array([1.0, 0.0]),
        flips=(0, 1, 1, 0, 1, 0),
    )


class TestTreeStructure:
    def test_node_counts(self):
        tree = generate_tree([3, 3, 3], 4, seed=0)
        assert tree.node_count == 3 + 9 + 27
        assert tree.leaf_count == 27
        assert list(tree.leaves()) == list(range(13, 40))

    def test_topology_of_2x2(self):
        tree = example_tree()
        assert tree.node_count == 6
        assert [tree.parent_of(i) for i in range(1, 7)] == [0, 0, 1, 1, 2, 2]
        assert tree.path_from_root(5) == [2, 5]
        assert tree.level_of(2) == 1 and tree.level_of(6) == 2

    def test_every_nonroot_has_parent_in_previous_level(self):
        tree = generate_tree([2, 3, 2], 3, seed=5)
        for node in range(1, tree.node_count + 1):
            parent = tree.parent_of(node)
            if tree.level_of(node) == 1:
                assert parent == 0
            else:
                assert tree.level_of(parent) == tree.level_of(node) - 1

    def test_degree_one_levels(self):
        tree = generate_tree(structure_profile(3, 3, 1), 2, seed=1)
        assert tree.profile == (27, 1, 1)
        assert tree.node_count == 27 * 3

    def test_validation(self):
        with pytest.raises(ValueError):
            ReasoningTree(profile=(), context_dim=2, w=[1.0, 0.0], flips=())
        with pytest.raises(ValueError):
            ReasoningTree(profile=(2,), context_dim=2, w=[2.0, 0.0], flips=(0, 0))
        with pytest.raises(ValueError):
            ReasoningTree(profile=(2,), context_dim=2, w=[1.0, 0.0], flips=(0, 2))


class TestGenerateTree:
    def test_deterministic(self):
        t1 = generate_tree([2, 2], 10, seed=42)
        t2 = generate_tree([2, 2], 10, seed=42)
        assert descriptor.to_text(t1) == descriptor.to_text(t2)

    def test_seed_changes_tree(self):
        t1 = generate_tree([2, 2], 10, seed=42)
        t2 = generate_tree([2, 2], 10, seed=43)
        assert descriptor.to_text(t1) != descriptor.to_text(t2)

    def test_w_unit_norm(self):
        tree = generate_tree([4], 16, seed=9)
        assert np.linalg.norm(tree.w) == pytest.approx(1.0, abs=1e-9)

    def test_edge_ops_roughly_fair(self):
        tree = generate_tree([2] * 11, 2, seed=3)
        frac = np.mean(tree.flips)
        assert 0.45 < frac < 0.55


class TestNodeValue:
    def test_identity_path_propagates_root(self):
        tree = ReasoningTree(profile=(2, 2), context_dim=2, w=[1.0, 0.0], flips=(0,) * 6)
        v = np.array([0.5, 0.2])
        assert tree.root_bit(v) == 1
        for node in (1, 3, 4):
            assert node_value(tree, v, node) == 1

    def test_example_tree_values(self):
        tree = example_tree()
        v = np.array([1.0, 0.0])
        assert node_value(tree, v, 2) == 0
        assert node_value(tree, v, 5) == 1

    def test_sign_flip_of_context(self):
        tree = generate_tree([3, 2], 5, seed=11)
        rng = stream(0, "contexts")
        for _ in range(20):
            v = rng.uniform(-1, 1, 5)
            if abs(float(v @ tree.w)) < 1e-12:
                continue
            for node in (1, 4, tree.node_count):
                assert node_value(tree, v, node) != node_value(tree, -v, node)

    def test_parity_law_matches_recursive_propagation(self):
        rng = stream(0, "trees")
        for _ in range(10):
            profile = tuple(int(m) for m in rng.integers(1, 4, size=rng.integers(1, 4)))
            tree = generate_tree(profile, 3, seed=int(rng.integers(1 << 30)))
            for root_bit in (0, 1):
                bits = {0: root_bit}
                for node in range(1, tree.node_count + 1):
                    bits[node] = bits[tree.parent_of(node)] ^ tree.flips[node - 1]
                for node in range(1, tree.node_count + 1):
                    assert bits[node] == root_bit ^ tree.parity(node)

    def test_boundary_context_maps_to_zero(self):
        tree = ReasoningTree(profile=(2,), context_dim=2, w=[1.0, 0.0], flips=(0, 0))
        assert tree.root_bit(np.array([0.0, 1.0])) == 0

    def test_unknown_node(self):
        with pytest.raises(ValueError):
            node_value(example_tree(), np.array([1.0, 0.0]), 7)


class TestRenderSample:
    def test_figure_strings(self):
        tree = example_tree()
        v = np.array([1.0, 0.0])
        reasoning = render_sample(tree, v, 5, "reasoning")
        assert reasoning.output_text == "X2=0 X5=1"
        assert reasoning.input_text == "[1.000000,0.000000] Target: X5"
        assert reasoning.answer_bit == 1
        direct = render_sample(tree, v, 5, "direct")
        assert direct.output_text == "X5=1"

    def test_depth_one_tree_modes_coincide(self):
        tree = ReasoningTree(profile=(3,), context_dim=2, w=[0.0, 1.0], flips=(0, 1, 0))
        v = np.array([0.3, 0.8])
        assert (
            render_sample(tree, v, 2, "direct").output_text
            == render_sample(tree, v, 2, "reasoning").output_text
        )

    def test_target_must_be_leaf(self):
        with pytest.raises(ValueError):
            render_sample(example_tree(), np.array([1.0, 0.0]), 1, "direct")

    def test_trace_roundtrip(self):
        tree = generate_tree([3, 3], 4, seed=2)
        v = stream(1, "v").uniform(-1, 1, 4)
        sample = render_sample(tree, v, 9 + 3, "reasoning")
        parsed = parse_trace(sample.output_text)
        path = tree.path_from_root(12)
        assert [label for label, _ in parsed] == [f"X{i}" for i in path]
        assert [bit for _, bit in parsed] == [node_value(tree, v, i) for i in path]


class TestStructureProfile:
    def test_reference_profiles(self):
        assert structure_profile(3, 3, 3) == (3, 3, 3)
        assert structure_profile(3, 3, 1) == (27, 1, 1)
        assert structure_profile(3, 3, 2) == (3, 9, 1)

    def test_product_invariance(self):
        for m, n in [(2, 4), (3, 3), (5, 2)]:
            for k in range(1, n + 1):
                profile = structure_profile(m, n, k)
                assert len(profile) == n
                assert int(np.prod(profile)) == m**n

    def test_range_errors(self):
        with pytest.raises(ValueError):
            structure_profile(3, 3, 0)
        with pytest.raises(ValueError):
            structure_profile(3, 3, 4)


class TestSampleDataset:
    def test_count_validation(self):
        with pytest.raises(ValueError):
            sample_dataset(example_tree(), 0, "direct", seed=0)

    def test_determinism_and_divergence(self):
        tree = generate_tree([2, 2], 10, seed=1)
        a = sample_dataset(tree, 50, "reasoning", seed=5).to_jsonl()
        b = sample_dataset(tree, 50, "reasoning", seed=5).to_jsonl()
        c = sample_dataset(tree, 50, "reasoning", seed=6).to_jsonl()
        assert a == b
        assert a != c

    def test_root_bit_frequency(self):
        tree = generate_tree([2, 2], 10, seed=3)
        contexts = stream(4, "dataset-context").uniform(-1, 1, size=(100_000, 10))
        bits = (contexts @ tree.w > 0).mean()
        assert bits == pytest.approx(0.5, abs=0.01)

    def test_records_are_consistent(self):
        tree = generate_tree([3, 2], 6, seed=8)
        ds = sample_dataset(tree, 40, "reasoning", seed=9)
        for sample in ds.samples:
            leaf = tree.leaf_by_label(sample.target)
            assert tree.is_leaf(leaf)
            parsed = parse_trace(sample.output_text)
            assert parsed[-1][0] == sample.target
            assert parsed[-1][1] == sample.answer_bit
            assert sample.input_text == f"{format_context(sample.v)} Target: {sample.target}"

    def test_jsonl_roundtrip(self, tmp_path):
        tree = generate_tree([2, 2], 3, seed=1)
        ds = sample_dataset(tree, 10, "direct", seed=2)
        path = tmp_path / "data.jsonl"
        ds.write(path, comment="config=x seed=2")
        records = load_jsonl(path)
        assert len(records) == 10
        assert set(records[0]) == {"v", "target", "mode", "input_text", "output_text", "answer_bit"}
        assert records[0]["v"] == [float(x) for x in ds.samples[0].v]
        raw_lines = path.read_text().splitlines()
        assert raw_lines[0].startswith("#")
        json.loads(raw_lines[1])


class TestDescriptor:
    def test_tree_roundtrip(self):
        tree = generate_tree([3, 1, 2], 5, seed=12)
        text = descriptor.to_text(tree)
        clone = descriptor.from_text(text)
        assert descriptor.to_text(clone) == text
        assert np.array_equal(clone.w, tree.w)
        assert clone.flips == tree.flips

    def test_file_roundtrip_with_comment(self, tmp_path):
        tree = generate_tree([2, 2], 4, seed=3)
        path = tmp_path / "tree.txt"
        descriptor.save(tree, path, comment="config=abc seed=3")
        clone = descriptor.load(path)
        assert descriptor.to_text(clone) == descriptor.to_text(tree)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            descriptor.from_text("nonsense\n")
        with pytest.raises(ValueError):
            descriptor.from_text("tree\nprofile: 2\ncontext_dim: 2\nw: 1.0,0.0\nedges:\n1 0 XOR\nend\n")
