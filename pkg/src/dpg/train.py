"""Embedded CART / bagged random-forest trainer.

Greedy Gini trees with midpoint split candidates, bootstrap bagging with
per-tree RNG streams (seed + tree index), optional per-split feature
subsampling, and MDI feature importance recomputed by pushing a dataset
through the fitted trees.  Desk-scale: no pruning, no parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DatasetError
from .model import (
    ClassSchema,
    Dataset,
    DecisionTree,
    TreeEnsemble,
    TreeNode,
    predict_majority,
)

__all__ = [
    "TrainConfig",
    "SplitReport",
    "EvalReport",
    "train_test_split",
    "fit_tree",
    "fit_forest",
    "feature_importance_mdi",
    "evaluate",
]


@dataclass(frozen=True)
class TrainConfig:
    n_trees: int
    max_depth: int | None = None
    min_samples_split: int = 2
    max_features: str | int = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if isinstance(self.max_features, str):
            if self.max_features not in ("sqrt", "all"):
                raise ValueError("max_features must be 'sqrt', 'all', or a positive int")
        elif self.max_features < 1:
            raise ValueError("max_features must be 'sqrt', 'all', or a positive int")

    def n_split_features(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features == "all":
            return n_features
        return min(int(self.max_features), n_features)


@dataclass(frozen=True)
class SplitReport:
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]


@dataclass(frozen=True)
class EvalReport:
    confusion: np.ndarray  # [truth][predicted] counts, model class order
    accuracy: float

    def to_json(self) -> dict:
        return {
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
        }


def train_test_split(d: Dataset, test_fraction: float, seed: int) -> SplitReport:
    """Deterministic unstratified split: shuffle once, the leading rows of
    the permutation train and the trailing `test_fraction` rows test."""
    if d.labels is None:
        raise DatasetError("train/test split needs labeled data")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    n = len(d)
    n_test = int(round(n * test_fraction))
    perm = np.random.default_rng(seed).permutation(n)
    return SplitReport(
        train_indices=tuple(int(i) for i in perm[: n - n_test]),
        test_indices=tuple(int(i) for i in perm[n - n_test:]),
    )


def _class_count(d: Dataset) -> int:
    if d.label_names is not None:
        return len(d.label_names)
    return int(d.labels.max()) + 1 if len(d) else 0


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    frac = counts / n
    return float(1.0 - (frac * frac).sum())


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray, n_classes: int):
    """Best (gain, feature, threshold) over midpoint candidates; None if no gain."""
    n = y.shape[0]
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    parent = 1.0 - ((counts / n) ** 2).sum()
    best = None
    onehot_template = np.eye(n_classes, dtype=np.float64)
    for f in features:
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        cum = np.cumsum(onehot_template[y[order]], axis=0)
        cut = np.nonzero(xs[1:] != xs[:-1])[0] + 1  # split before position i
        if cut.size == 0:
            continue
        nl = cut.astype(np.float64)
        nr = n - nl
        lc = cum[cut - 1]
        rc = counts - lc
        gini_l = 1.0 - ((lc / nl[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((rc / nr[:, None]) ** 2).sum(axis=1)
        child = (nl * gini_l + nr * gini_r) / n
        gain = parent - child
        k = int(np.argmax(gain))
        if gain[k] > 1e-12 and (best is None or gain[k] > best[0]):
            thr = (xs[cut[k] - 1] + xs[cut[k]]) / 2.0
            best = (float(gain[k]), int(f), float(thr))
    return best


def fit_tree(
    d: Dataset,
    rows: Sequence[int],
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
) -> DecisionTree:
    """Greedy Gini CART over the given rows; splits never increase impurity."""
    if d.labels is None:
        raise DatasetError("tree fitting needs labeled data")
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise DatasetError("tree fitting needs at least one row")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n_classes = _class_count(d)
    n_features = len(d.features)
    k = cfg.n_split_features(n_features)
    X = d.rows
    y_all = d.labels

    nodes: list[TreeNode | None] = []
    stack: list[tuple[np.ndarray, int, int]] = []

    def alloc() -> int:
        nodes.append(None)
        return len(nodes) - 1

    stack.append((rows, 0, alloc()))
    while stack:
        idx, depth, nid = stack.pop()
        y = y_all[idx]
        counts = np.bincount(y, minlength=n_classes)
        majority = int(np.argmax(counts))
        pure = counts[majority] == idx.size
        capped = cfg.max_depth is not None and depth >= cfg.max_depth
        best = None
        if not pure and not capped and idx.size >= cfg.min_samples_split:
            if k < n_features:
                features = np.sort(rng.choice(n_features, size=k, replace=False))
            else:
                features = np.arange(n_features)
            best = _best_split(X[idx], y, features, n_classes)
        if best is None:
            nodes[nid] = TreeNode(id=nid, kind="leaf", class_index=majority)
            continue
        gain, f, thr = best
        assert gain > 0.0, "split must strictly decrease impurity"
        go_left = X[idx, f] <= thr
        left_id = alloc()
        right_id = alloc()
        nodes[nid] = TreeNode(
            id=nid, kind="split", feature=f, threshold=thr, left=left_id, right=right_id
        )
        stack.append((idx[~go_left], depth + 1, right_id))
        stack.append((idx[go_left], depth + 1, left_id))
    return DecisionTree(root=0, nodes=tuple(nodes))


def _class_schema(d: Dataset) -> ClassSchema:
    if d.label_names is not None and len(d.label_names) >= 2:
        return ClassSchema(tuple(d.label_names))
    return ClassSchema(tuple(str(i) for i in range(_class_count(d))))


def fit_forest(d: Dataset, cfg: TrainConfig, rows: Sequence[int] | None = None) -> TreeEnsemble:
    """Bagged forest: tree t fits a bootstrap resample drawn from stream seed+t."""
    if d.labels is None:
        raise DatasetError("forest fitting needs labeled data")
    base = np.asarray(rows if rows is not None else np.arange(len(d)), dtype=np.int64)
    if base.size == 0:
        raise DatasetError("forest fitting needs at least one row")
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(cfg.seed + t)
        if cfg.bootstrap:
            picked = base[rng.integers(0, base.size, base.size)]
        else:
            picked = base
        trees.append(fit_tree(d, picked, cfg, rng))
    metadata = {
        "source": "dpg.train",
        "n_trees": cfg.n_trees,
        "max_depth": cfg.max_depth,
        "min_samples_split": cfg.min_samples_split,
        "max_features": cfg.max_features,
        "bootstrap": cfg.bootstrap,
        "seed": cfg.seed,
    }
    return TreeEnsemble(
        features=d.features,
        classes=_class_schema(d),
        trees=tuple(trees),
        metadata=metadata,
    )


def feature_importance_mdi(m: TreeEnsemble, d: Dataset) -> np.ndarray:
    """Mean-decrease-impurity importances, recomputed by routing `d` and
    summing each split's weighted impurity decrease; normalized to sum 1."""
    if d.labels is None:
        raise DatasetError("MDI needs labeled data")
    if len(d.features) != len(m.features):
        raise DatasetError("feature count differs between model and dataset")
    n_classes = len(m.classes)
    importance = np.zeros(len(m.features), dtype=np.float64)
    X, y = d.rows, d.labels
    total = len(d)
    for tree in m.trees:
        by_id = tree.node_map()
        stack = [(tree.root, np.arange(total, dtype=np.int64))]
        while stack:
            nid, idx = stack.pop()
            node = by_id[nid]
            if node.is_leaf or idx.size == 0:
                continue
            go_left = X[idx, node.feature] <= node.threshold
            li, ri = idx[go_left], idx[~go_left]
            parent = _gini(np.bincount(y[idx], minlength=n_classes))
            child = (
                li.size * _gini(np.bincount(y[li], minlength=n_classes))
                + ri.size * _gini(np.bincount(y[ri], minlength=n_classes))
            ) / idx.size
            importance[node.feature] += (idx.size / total) * (parent - child)
            stack.append((node.left, li))
            stack.append((node.right, ri))
    s = importance.sum()
    return importance / s if s > 0 else importance


def _truth_indices(m: TreeEnsemble, d: Dataset, rows: Sequence[int]) -> np.ndarray:
    """Dataset labels mapped into the model's class order."""
    if d.labels is None:
        raise DatasetError("evaluation needs labeled data")
    if d.label_names is None:
        return d.labels[np.asarray(rows, dtype=np.int64)]
    mapping = []
    for name in d.label_names:
        if name not in m.classes.labels:
            raise DatasetError(f"dataset label {name!r} unknown to the model")
        mapping.append(m.classes.index(name))
    table = np.asarray(mapping, dtype=np.int64)
    return table[d.labels[np.asarray(rows, dtype=np.int64)]]


def evaluate(m: TreeEnsemble, d: Dataset, rows: Sequence[int]) -> EvalReport:
    """Confusion matrix and accuracy of majority-vote predictions."""
    rows = np.asarray(rows, dtype=np.int64)
    truth = _truth_indices(m, d, rows)
    n_classes = len(m.classes)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    for r, t in zip(rows, truth):
        confusion[int(t), predict_majority(m, d.rows[r])] += 1
    accuracy = float(np.trace(confusion) / confusion.sum()) if rows.size else 0.0
    return EvalReport(confusion=confusion, accuracy=accuracy)
