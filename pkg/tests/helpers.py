"""Shared builders and brute-force oracles for the test suite.

The oracles here deliberately use naive algorithms (path enumeration,
depth-first reachability, per-trace counting) so they share no code with the
implementations they check.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from dpg.graph import DPG, DPGEdge, DPGNode, render_label
from dpg.model import (
    CanonicalizationPolicy,
    ClassSchema,
    Dataset,
    DecisionTree,
    FeatureSchema,
    Predicate,
    TreeEnsemble,
    TreeNode,
    traverse,
)


# -- random model/data builders ------------------------------------------


def random_tree(rng, n_features: int, n_classes: int, max_depth: int = 6) -> DecisionTree:
    nodes: list = []

    def grow(depth: int) -> int:
        i = len(nodes)
        nodes.append(None)
        if depth >= max_depth or rng.random() < 0.35:
            nodes[i] = TreeNode(id=i, kind="leaf", class_index=int(rng.integers(n_classes)))
        else:
            f = int(rng.integers(n_features))
            t = float(rng.normal())
            left = grow(depth + 1)
            right = grow(depth + 1)
            nodes[i] = TreeNode(
                id=i, kind="split", feature=f, threshold=t, left=left, right=right
            )
        return i

    grow(0)
    return DecisionTree(root=0, nodes=tuple(nodes))


def random_ensemble(rng, n_trees: int, n_features: int, n_classes: int,
                    max_depth: int = 6) -> TreeEnsemble:
    feats = FeatureSchema.numeric(tuple(f"x{i}" for i in range(n_features)))
    classes = ClassSchema(tuple(str(c) for c in range(n_classes)))
    trees = tuple(random_tree(rng, n_features, n_classes, max_depth) for _ in range(n_trees))
    return TreeEnsemble(features=feats, classes=classes, trees=trees, metadata={})


def random_dataset(rng, n_samples: int, features: FeatureSchema,
                   n_classes: int | None = None) -> Dataset:
    rows = rng.normal(size=(n_samples, len(features.names)))
    labels = None
    label_names = None
    if n_classes is not None:
        labels = rng.integers(n_classes, size=n_samples)
        label_names = tuple(str(c) for c in range(n_classes))
    return Dataset(features=features, rows=rows, labels=labels, label_names=label_names)


# -- arbitrary graph builder -----------------------------------------------


def make_graph(n_nodes: int, edges, n_classes: int = 0) -> DPG:
    """Directed graph wrapped as a DPG; the last *n_classes* ids are sinks."""
    feats = tuple(f"x{i}" for i in range(n_nodes))
    classes = tuple(str(c) for c in range(n_classes))
    nodes = []
    for i in range(n_nodes):
        if i >= n_nodes - n_classes:
            pred = Predicate.class_terminal(i - (n_nodes - n_classes))
        else:
            pred = Predicate.decision(i, "<=", float(i))
        nodes.append(DPGNode(id=i, predicate=pred, label=render_label(pred, feats, classes, 2)))
    e = tuple(DPGEdge(src=s, dst=d, weight=int(w)) for s, d, w in edges)
    return DPG(nodes=tuple(nodes), edges=e,
               provenance={"features": list(feats), "classes": list(classes)})


def random_graph(rng, n_nodes: int, p_edge: float = 0.3,
                 max_weight: int = 9, n_classes: int = 0) -> DPG:
    edges = []
    for s in range(n_nodes):
        if s >= n_nodes - n_classes:
            continue
        for d in range(n_nodes):
            if s != d and rng.random() < p_edge:
                edges.append((s, d, int(rng.integers(1, max_weight + 1))))
    return make_graph(n_nodes, edges, n_classes)


# -- oracles ----------------------------------------------------------------


def _adjacency(g: DPG) -> list:
    adj = [[] for _ in g.nodes]
    for e in g.edges:
        adj[e.src].append((e.dst, e.weight))
    return adj


def brute_betweenness(g: DPG, weighted: bool) -> list:
    """All-pairs shortest-path enumeration, counting pass-through nodes."""
    n = len(g.nodes)
    adj = _adjacency(g)
    bc = [0.0] * n
    for s in range(n):
        dist = {s: 0.0}
        frontier = [s]
        # Bellman-Ford style relaxation; graphs are small.
        for _ in range(n):
            nxt = []
            for u in frontier:
                for v, w in adj[u]:
                    step = float(w) if weighted else 1.0
                    nd = dist[u] + step
                    if v not in dist or nd < dist[v] - 1e-15:
                        dist[v] = nd
                        nxt.append(v)
            frontier = nxt
        for t in range(n):
            if t == s or t not in dist:
                continue
            paths: list = []

            def walk(u, acc):
                if u == t:
                    paths.append(tuple(acc))
                    return
                for v, w in adj[u]:
                    step = float(w) if weighted else 1.0
                    if v in dist and abs(dist[u] + step - dist[v]) < 1e-12:
                        walk(v, acc + [v])

            walk(s, [])
            if not paths:
                continue
            through = Counter(v for p in paths for v in p[:-1])
            for v, c in through.items():
                bc[v] += c / len(paths)
    scale = (n - 1) * (n - 2)
    return [b / scale if scale else 0.0 for b in bc]


def reachable_from(g: DPG, start: int) -> set:
    adj = _adjacency(g)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def brute_lrc_unweighted(g: DPG) -> list:
    n = len(g.nodes)
    return [(len(reachable_from(g, v)) - 1) / (n - 1) if n > 1 else 0.0
            for v in range(n)]


def brute_constraints(g: DPG, class_index: int):
    """Forward-DFS reachability from every decision node, then interval widening."""
    target = g.class_node(class_index).id
    lowers: dict = {}
    uppers: dict = {}
    includes: dict = {}
    excludes: dict = {}
    for node in g.nodes:
        p = node.predicate
        if p.kind != "decision":
            continue
        if target not in reachable_from(g, node.id):
            continue
        if p.op == ">":
            lowers[p.feature] = min(lowers.get(p.feature, math.inf), p.threshold)
        elif p.op == "<=":
            uppers[p.feature] = max(uppers.get(p.feature, -math.inf), p.threshold)
        elif p.op == "=":
            includes.setdefault(p.feature, set()).update(p.values)
        else:
            excludes.setdefault(p.feature, set()).update(p.values)
    out = {}
    for f in set(lowers) | set(uppers) | set(includes) | set(excludes):
        out[f] = (
            lowers.get(f, -math.inf),
            uppers.get(f, math.inf),
            frozenset(includes.get(f, ())),
            frozenset(excludes.get(f, ())),
        )
    return out


def trace_recount(m: TreeEnsemble, d: Dataset,
                  policy: CanonicalizationPolicy = CanonicalizationPolicy()):
    """Per-trace edge recount via the public traverse op; no kernel involved."""
    pairs: Counter = Counter()
    starts: Counter = Counter()
    for ti, tree in enumerate(m.trees):
        for si, x in enumerate(d.rows):
            t = traverse(tree, x, policy, tree_index=ti, sample_index=si)
            preds = list(t.steps)
            starts[preds[0]] += 1
            for a, b in zip(preds, preds[1:]):
                pairs[(a, b)] += 1
    return pairs, starts
