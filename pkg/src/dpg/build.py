"""Build a decision predicate graph from an ensemble and a dataset.

Every (tree, sample) pair is traversed; each trace is the ordered list of
canonicalized predicates the sample satisfies, ending in the reached class.
Consecutive steps become directed edges whose weights count occurrences over
all traces.  Node ids are assigned in order of first appearance (trees outer,
samples inner, steps in path order), which makes builds deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, TraversalError
from .graph import DPG, DPGEdge, DPGNode, render_label
from .kernels import get_backend
from .model import (
    DEFAULT_POLICY,
    CanonicalizationPolicy,
    Dataset,
    DecisionTree,
    PathTrace,
    Predicate,
    TreeEnsemble,
    canonical_predicate,
    traverse,
)

__all__ = ["build_dpg", "trace_edges", "canonical_predicate"]


def trace_edges(t: PathTrace) -> list[tuple[Predicate, Predicate]]:
    """Consecutive step pairs of one trace; empty for single-step traces."""
    return list(zip(t.steps, t.steps[1:]))


@dataclass
class _CompiledTree:
    root: int
    feat: np.ndarray
    thr: np.ndarray
    left: np.ndarray
    right: np.ndarray
    slot_true: np.ndarray
    slot_false: np.ndarray
    slots: list[Predicate]


def _compile_tree(tree: DecisionTree, policy: CanonicalizationPolicy) -> _CompiledTree | None:
    """Flatten one tree into kernel arrays; None if it has categorical splits."""
    index = {node.id: i for i, node in enumerate(tree.nodes)}
    n = len(tree.nodes)
    feat = np.full(n, -1, dtype=np.int32)
    thr = np.zeros(n, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int32)
    right = np.full(n, -1, dtype=np.int32)
    slot_true = np.zeros(n, dtype=np.int32)
    slot_false = np.zeros(n, dtype=np.int32)
    slots: list[Predicate] = []
    slot_of: dict[Predicate, int] = {}

    def slot(p: Predicate) -> int:
        s = slot_of.get(p)
        if s is None:
            s = len(slots)
            slot_of[p] = s
            slots.append(p)
        return s

    for node in tree.nodes:
        i = index[node.id]
        if node.is_leaf:
            slot_true[i] = slot_false[i] = slot(Predicate.class_terminal(node.class_index))
            continue
        if node.values is not None:
            return None
        feat[i] = node.feature
        thr[i] = node.threshold
        left[i] = index[node.left]
        right[i] = index[node.right]
        slot_true[i] = slot(
            canonical_predicate(Predicate.decision(node.feature, "<=", node.threshold), policy)
        )
        slot_false[i] = slot(
            canonical_predicate(Predicate.decision(node.feature, ">", node.threshold), policy)
        )
    return _CompiledTree(
        root=index[tree.root],
        feat=feat,
        thr=thr,
        left=left,
        right=right,
        slot_true=slot_true,
        slot_false=slot_false,
        slots=slots,
    )


class _Aggregator:
    """First-seen node registry plus commutative edge/source count merging."""

    def __init__(self):
        self.node_ids: dict[Predicate, int] = {}
        self.predicates: list[Predicate] = []
        self.edge_counts: dict[tuple[int, int], int] = {}
        self.source_counts: list[int] = []

    def node_id(self, p: Predicate) -> int:
        i = self.node_ids.get(p)
        if i is None:
            i = len(self.predicates)
            self.node_ids[p] = i
            self.predicates.append(p)
            self.source_counts.append(0)
        return i

    def add_tree_results(self, compiled: _CompiledTree, codes, order, starts) -> None:
        n_slots = len(compiled.slots)
        global_of = np.full(n_slots, -1, dtype=np.int64)
        for s in order.tolist():
            global_of[s] = self.node_id(compiled.slots[s])
        pair, count = np.unique(codes, return_counts=True)
        for code, c in zip(pair.tolist(), count.tolist()):
            key = (int(global_of[code // n_slots]), int(global_of[code % n_slots]))
            self.edge_counts[key] = self.edge_counts.get(key, 0) + c
        for s, c in enumerate(starts.tolist()):
            if c:
                self.source_counts[int(global_of[s])] += c

    def add_trace(self, steps: tuple[Predicate, ...]) -> None:
        ids = [self.node_id(p) for p in steps]
        self.source_counts[ids[0]] += 1
        for a, b in zip(ids, ids[1:]):
            self.edge_counts[(a, b)] = self.edge_counts.get((a, b), 0) + 1


def build_dpg(
    m: TreeEnsemble,
    d: Dataset,
    policy: CanonicalizationPolicy = DEFAULT_POLICY,
    backend: str | None = None,
) -> DPG:
    """Aggregate all (tree, sample) traces of `d` through `m` into a DPG."""
    if d.features.names != m.features.names:
        raise DatasetError("dataset features do not match model features")
    agg = _Aggregator()
    kern = get_backend(backend)
    X = np.ascontiguousarray(d.rows, dtype=np.float64)
    for ti, tree in enumerate(m.trees):
        compiled = _compile_tree(tree, policy)
        if compiled is not None:
            try:
                codes, order, starts = kern.traverse_pairs(
                    compiled.root,
                    compiled.feat,
                    compiled.thr,
                    compiled.left,
                    compiled.right,
                    compiled.slot_true,
                    compiled.slot_false,
                    len(compiled.slots),
                    X,
                )
            except TraversalError as exc:
                raise TraversalError(f"tree {ti}: {exc}") from None
            agg.add_tree_results(compiled, codes, order, starts)
        else:
            for si in range(X.shape[0]):
                try:
                    t = traverse(tree, d.rows[si], policy, tree_index=ti, sample_index=si)
                except TraversalError as exc:
                    raise TraversalError(f"tree {ti}: {exc}") from None
                agg.add_trace(t.steps)

    names = m.features.names
    labels = m.classes.labels
    nodes = tuple(
        DPGNode(id=i, predicate=p, label=render_label(p, names, labels, policy.decimals))
        for i, p in enumerate(agg.predicates)
    )
    edges = tuple(
        DPGEdge(src=a, dst=b, weight=w)
        for (a, b), w in sorted(agg.edge_counts.items())
    )
    provenance = {
        "features": list(names),
        "classes": list(labels),
        "decimals": policy.decimals,
        "n_trees": len(m.trees),
        "n_samples": int(X.shape[0]),
        "model_metadata": dict(m.metadata),
    }
    return DPG(
        nodes=nodes,
        edges=edges,
        provenance=provenance,
        source_counts=tuple(agg.source_counts),
    )
