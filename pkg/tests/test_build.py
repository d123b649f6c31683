"""Graph construction from ensembles: node identity, edge counting, ordering."""

import numpy as np
import pytest

from dpg.build import build_dpg, trace_edges
from dpg.errors import DatasetError, TraversalError
from dpg.model import (
    CanonicalizationPolicy,
    ClassSchema,
    Dataset,
    DecisionTree,
    FeatureSchema,
    TreeEnsemble,
    TreeNode,
    traverse,
)
from helpers import random_dataset, random_ensemble


def stump(threshold, feature=0, left_class=0, right_class=1):
    return DecisionTree(root=0, nodes=(
        TreeNode(id=0, kind="split", feature=feature, threshold=threshold, left=1, right=2),
        TreeNode(id=1, kind="leaf", class_index=left_class),
        TreeNode(id=2, kind="leaf", class_index=right_class),
    ))


def ensemble(*trees, n_features=2, n_classes=2):
    return TreeEnsemble(
        features=FeatureSchema.numeric(tuple(f"f{i}" for i in range(n_features))),
        classes=ClassSchema(tuple(str(c) for c in range(n_classes))),
        trees=trees,
        metadata={"origin": "test"},
    )


def data(rows, n_features=2):
    return Dataset(features=FeatureSchema.numeric(tuple(f"f{i}" for i in range(n_features))),
                   rows=np.asarray(rows, dtype=float), labels=None, label_names=None)


def test_stump_two_samples():
    m = ensemble(stump(0.5))
    g = build_dpg(m, data([[0.2, 0.0], [0.9, 0.0]]))
    # one sample through each branch: two predicates and two class nodes
    assert len(g.nodes) == 4
    labels = {n.id: n.label for n in g.nodes}
    weights = {(labels[e.src], labels[e.dst]): e.weight for e in g.edges}
    assert weights == {("f0 <= 0.50", "Class 0"): 1, ("f0 > 0.50", "Class 1"): 1}


def test_node_ids_follow_first_seen_order():
    m = ensemble(stump(0.5))
    g = build_dpg(m, data([[0.9, 0.0], [0.2, 0.0]]))
    # sample 0 goes right first, so "f0 > 0.50" gets id 0
    labels = [n.label for n in sorted(g.nodes, key=lambda n: n.id)]
    assert labels == ["f0 > 0.50", "Class 1", "f0 <= 0.50", "Class 0"]


def test_edge_weights_count_repeated_traversals():
    m = ensemble(stump(0.5), stump(0.5))
    g = build_dpg(m, data([[0.2, 0.0]] * 3))
    e = g.edges[0]
    assert e.weight == 6  # 2 trees x 3 samples
    assert g.total_traces() == 6


def test_shared_predicates_merge_across_trees():
    m = ensemble(stump(0.5), stump(0.5004))  # same node after rounding
    g = build_dpg(m, data([[0.2, 0.0], [0.9, 0.0]]))
    assert len(g.nodes) == 4
    assert {n.label for n in g.nodes} == {"f0 <= 0.50", "f0 > 0.50", "Class 0", "Class 1"}


def test_precision_controls_merging():
    m = ensemble(stump(0.124), stump(0.126))
    fine = build_dpg(m, data([[0.0, 0.0]]), CanonicalizationPolicy(decimals=3))
    coarse = build_dpg(m, data([[0.0, 0.0]]), CanonicalizationPolicy(decimals=1))
    assert len(fine.nodes) == 3   # 0.124 vs 0.126 distinct, one class reached
    assert len(coarse.nodes) == 2


def test_provenance_records_setup():
    m = ensemble(stump(0.5))
    d = data([[0.2, 0.0], [0.9, 0.0], [0.3, 0.0]])
    g = build_dpg(m, d)
    p = g.provenance
    assert p["features"] == ["f0", "f1"]
    assert p["classes"] == ["0", "1"]
    assert p["decimals"] == 2
    assert p["n_trees"] == 1
    assert p["n_samples"] == 3
    assert p["model_metadata"] == {"origin": "test"}
    assert sum(g.source_counts) == 3


def test_trace_edges_pairs():
    m = ensemble(stump(0.5))
    t = traverse(m.trees[0], [0.1, 0.0])
    pairs = trace_edges(t)
    assert len(pairs) == 1
    a, b = pairs[0]
    assert a.op == "<=" and b.is_class


def test_feature_mismatch_rejected():
    m = ensemble(stump(0.5))
    wrong = Dataset(features=FeatureSchema.numeric(("a", "b")),
                    rows=np.zeros((1, 2)), labels=None, label_names=None)
    with pytest.raises(DatasetError, match="feature"):
        build_dpg(m, wrong)


def test_nonfinite_sample_names_tree_and_sample():
    m = ensemble(stump(0.5), stump(0.5, feature=1))
    bad = data([[0.1, 0.0], [0.2, float("inf")]])
    with pytest.raises(TraversalError, match=r"tree 1"):
        build_dpg(m, bad)


def test_backend_selection_explicit():
    rng = np.random.default_rng(3)
    m = random_ensemble(rng, 3, 4, 3)
    d = random_dataset(rng, 25, m.features)
    g1 = build_dpg(m, d, backend="python")
    g2 = build_dpg(m, d, backend="cython")
    assert [n.label for n in g1.nodes] == [n.label for n in g2.nodes]
    assert g1.edges == g2.edges
    assert g1.source_counts == g2.source_counts
    with pytest.raises(ValueError):
        build_dpg(m, d, backend="fortran")


def test_leaf_only_tree_contributes_source_count():
    leaf = DecisionTree(root=0, nodes=(TreeNode(id=0, kind="leaf", class_index=1),))
    m = ensemble(leaf, stump(0.5))
    g = build_dpg(m, data([[0.2, 0.0]]))
    cls1 = g.node_by_label("Class 1")
    assert g.source_counts[cls1.id] == 1
    assert all(e.src != cls1.id for e in g.edges)


def test_deep_path_chains_edges():
    t = DecisionTree(root=0, nodes=(
        TreeNode(id=0, kind="split", feature=0, threshold=0.5, left=1, right=2),
        TreeNode(id=1, kind="split", feature=1, threshold=0.25, left=3, right=4),
        TreeNode(id=2, kind="leaf", class_index=1),
        TreeNode(id=3, kind="leaf", class_index=0),
        TreeNode(id=4, kind="leaf", class_index=1),
    ))
    g = build_dpg(ensemble(t), data([[0.1, 0.1]]))
    labels = {n.id: n.label for n in g.nodes}
    chain = [(labels[e.src], labels[e.dst]) for e in g.edges]
    assert ("f0 <= 0.50", "f1 <= 0.25") in chain
    assert ("f1 <= 0.25", "Class 0") in chain
