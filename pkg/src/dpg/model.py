"""Portable data model for tree-based ensemble classifiers.

Trees follow a fixed branch convention: the left child is taken when the
split condition is TRUE (feature <= threshold for numeric splits, feature
in value set for categorical splits), the right child when it is FALSE.
Traversal records the predicate satisfied at every visited split, so a
path through a tree becomes an ordered predicate sequence ending in the
reached leaf's class.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DatasetError, EnsembleFormatError, TraversalError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with a numeric/categorical kind per feature."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise EnsembleFormatError("feature schema is empty")
        if len(set(self.names)) != len(self.names):
            raise EnsembleFormatError("feature names are not unique")
        if any(not n for n in self.names):
            raise EnsembleFormatError("feature names must be non-empty")
        if len(self.kinds) != len(self.names):
            raise EnsembleFormatError("feature kinds length differs from names")
        bad = [k for k in self.kinds if k not in (NUMERIC, CATEGORICAL)]
        if bad:
            raise EnsembleFormatError(f"unknown feature kind(s): {bad}")

    @classmethod
    def numeric(cls, names: Sequence[str]) -> "FeatureSchema":
        return cls(tuple(names), tuple(NUMERIC for _ in names))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class ClassSchema:
    """Ordered class labels (always stored as strings)."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise EnsembleFormatError("need at least 2 class labels")
        if len(set(self.labels)) != len(self.labels):
            raise EnsembleFormatError("class labels are not unique")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class TreeNode:
    """One node of a decision tree.

    Split nodes carry (feature, threshold | values, left, right); leaves
    carry class_index.  Unused fields are None.
    """

    id: int
    kind: str  # "split" | "leaf"
    feature: int | None = None
    threshold: float | None = None
    values: frozenset[str] | None = None
    left: int | None = None
    right: int | None = None
    class_index: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind == "leaf"


@dataclass(frozen=True)
class DecisionTree:
    root: int
    nodes: tuple[TreeNode, ...]

    def node_map(self) -> dict[int, TreeNode]:
        return {n.id: n for n in self.nodes}

    def depth(self) -> int:
        """Maximum number of splits on any root-to-leaf path."""
        by_id = self.node_map()
        best = 0
        stack = [(self.root, 0)]
        while stack:
            nid, d = stack.pop()
            node = by_id[nid]
            if node.is_leaf:
                best = max(best, d)
            else:
                stack.append((node.left, d + 1))
                stack.append((node.right, d + 1))
        return best


@dataclass(frozen=True)
class TreeEnsemble:
    features: FeatureSchema
    classes: ClassSchema
    trees: tuple[DecisionTree, ...]
    metadata: Mapping = field(default_factory=dict)


@dataclass
class Dataset:
    """Row-major numeric sample matrix with optional integer class labels.

    ``label_names`` records the label vocabulary behind ``labels`` so that
    datasets and models whose class orderings differ can be aligned by
    label string.
    """

    features: FeatureSchema
    rows: np.ndarray
    labels: np.ndarray | None = None
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            self.rows = self.rows.reshape(-1, len(self.features))
        if self.rows.shape[1] != len(self.features):
            raise DatasetError(
                f"row width {self.rows.shape[1]} != feature count {len(self.features)}"
            )
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape[0] != self.rows.shape[0]:
                raise DatasetError("label count differs from row count")
            if self.label_names is not None and self.labels.size:
                lo, hi = self.labels.min(), self.labels.max()
                if lo < 0 or hi >= len(self.label_names):
                    raise DatasetError(f"label index out of range: {lo if lo < 0 else hi}")

    def __len__(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class Predicate:
    """A decision (feature, op, threshold | value set) or a class terminal.

    Instances are hashable and serve directly as graph-node identity, so
    construction must always produce the same object for the same logical
    predicate (canonicalize thresholds first, see CanonicalizationPolicy).
    """

    kind: str  # "decision" | "class"
    feature: int = -1
    op: str = ""  # "<=", ">", "=", "!="
    threshold: float = 0.0
    values: frozenset[str] | None = None
    class_index: int = -1

    OPS = ("<=", ">", "=", "!=")

    @classmethod
    def decision(
        cls,
        feature: int,
        op: str,
        threshold: float | None = None,
        values: Iterable[str] | None = None,
    ) -> "Predicate":
        if op not in cls.OPS:
            raise ValueError(f"unknown operator {op!r}")
        if op in ("<=", ">"):
            if threshold is None or not math.isfinite(threshold):
                raise ValueError("numeric predicate needs a finite threshold")
            return cls(kind="decision", feature=feature, op=op, threshold=float(threshold))
        if values is None:
            raise ValueError("categorical predicate needs a value set")
        return cls(kind="decision", feature=feature, op=op, values=frozenset(values))

    @classmethod
    def class_terminal(cls, class_index: int) -> "Predicate":
        return cls(kind="class", class_index=class_index)

    @property
    def is_class(self) -> bool:
        return self.kind == "class"


@dataclass(frozen=True)
class CanonicalizationPolicy:
    """Threshold rounding used to merge predicates across trees.

    Rounding is IEEE-754 round-half-even at ``decimals`` digits (Python's
    built-in round), so 0.125 -> 0.12 and 4.8499999 -> 4.85.
    """

    decimals: int = 2

    def __post_init__(self):
        if self.decimals < 0:
            raise ValueError("decimals must be >= 0")

    def round(self, x: float) -> float:
        return round(float(x), self.decimals)


DEFAULT_POLICY = CanonicalizationPolicy()


def canonical_predicate(p: Predicate, policy: CanonicalizationPolicy = DEFAULT_POLICY) -> Predicate:
    """Round a decision predicate's threshold per policy; class predicates pass through."""
    if p.is_class or p.op in ("=", "!="):
        return p
    rounded = policy.round(p.threshold)
    if rounded == p.threshold:
        return p
    return Predicate(kind="decision", feature=p.feature, op=p.op, threshold=rounded)


@dataclass(frozen=True)
class PathTrace:
    """The ordered predicates one sample satisfies in one tree."""

    tree_index: int
    sample_index: int
    steps: tuple[Predicate, ...]

    def __post_init__(self):
        if not self.steps or not self.steps[-1].is_class:
            raise ValueError("trace must end in exactly one class predicate")


# ---------------------------------------------------------------------------
# validation


def _validate_tree(tree: DecisionTree, ti: int, n_features: int, n_classes: int) -> list[str]:
    out = []
    by_id = {}
    for node in tree.nodes:
        if node.id in by_id:
            out.append(f"duplicate node id at tree {ti} node {node.id}")
        by_id[node.id] = node
    if tree.root not in by_id:
        out.append(f"missing root at tree {ti} node {tree.root}")
        return out

    for node in tree.nodes:
        where = f"tree {ti} node {node.id}"
        if node.kind == "leaf":
            if node.class_index is None or not (0 <= node.class_index < n_classes):
                out.append(f"leaf class index out of range at {where}")
        elif node.kind == "split":
            if node.left is None or node.right is None:
                out.append(f"split missing child at {where}")
                continue
            if node.left not in by_id or node.right not in by_id:
                out.append(f"child id unknown at {where}")
            if node.feature is None or not (0 <= node.feature < n_features):
                out.append(f"split feature out of range at {where}")
            if node.values is None:
                if node.threshold is None or not math.isfinite(node.threshold):
                    out.append(f"non-finite threshold at {where}")
            elif not node.values:
                out.append(f"empty value set at {where}")
        else:
            out.append(f"unknown node kind {node.kind!r} at {where}")
    if out:
        return out

    # Reachability: every node reached from the root exactly once (tree, no cycles).
    seen: dict[int, int] = {}
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        seen[nid] = seen.get(nid, 0) + 1
        if seen[nid] > 1:
            out.append(f"cycle at tree {ti} node {nid}")
            return out
        node = by_id[nid]
        if not node.is_leaf:
            stack.append(node.left)
            stack.append(node.right)
    unreachable = sorted(set(by_id) - set(seen))
    for nid in unreachable:
        out.append(f"unreachable node at tree {ti} node {nid}")
    return out


def validate_ensemble(m: TreeEnsemble) -> list[str]:
    """Return a list of invariant violations; empty means the ensemble is valid."""
    out = []
    if not m.trees:
        out.append("ensemble has no trees")
    for ti, tree in enumerate(m.trees):
        out.extend(_validate_tree(tree, ti, len(m.features), len(m.classes)))
    return out


# ---------------------------------------------------------------------------
# traversal and prediction


def traverse(
    tree: DecisionTree,
    x: Sequence,
    policy: CanonicalizationPolicy = DEFAULT_POLICY,
    tree_index: int = 0,
    sample_index: int = 0,
) -> PathTrace:
    """Route one sample through one tree, recording the satisfied predicates.

    Left branch records (f, <=, t) or (f, =, S); right branch records
    (f, >, t) or (f, !=, S); the trace ends with the reached leaf's class
    predicate.  Thresholds are canonicalized per policy.
    """
    by_id = tree.node_map()
    steps = []
    node = by_id[tree.root]
    while not node.is_leaf:
        value = x[node.feature]
        if node.values is not None:
            go_left = str(value) in node.values
            op = "=" if go_left else "!="
            steps.append(Predicate.decision(node.feature, op, values=node.values))
        else:
            fv = float(value)
            if not math.isfinite(fv):
                raise TraversalError(
                    f"non-finite value for feature {node.feature} in sample {sample_index}"
                )
            go_left = fv <= node.threshold
            op = "<=" if go_left else ">"
            steps.append(
                canonical_predicate(
                    Predicate.decision(node.feature, op, node.threshold), policy
                )
            )
        node = by_id[node.left if go_left else node.right]
    steps.append(Predicate.class_terminal(node.class_index))
    return PathTrace(tree_index=tree_index, sample_index=sample_index, steps=tuple(steps))


def tree_predict(tree: DecisionTree, x: Sequence) -> int:
    """Leaf class index for one sample (no predicate recording)."""
    by_id = tree.node_map()
    node = by_id[tree.root]
    while not node.is_leaf:
        value = x[node.feature]
        if node.values is not None:
            go_left = str(value) in node.values
        else:
            fv = float(value)
            if not math.isfinite(fv):
                raise TraversalError(f"non-finite value for feature {node.feature}")
            go_left = fv <= node.threshold
        node = by_id[node.left if go_left else node.right]
    return node.class_index


def predict_majority(m: TreeEnsemble, x: Sequence) -> int:
    """Class with most tree votes; ties break toward the lowest class index."""
    votes = np.zeros(len(m.classes), dtype=np.int64)
    for tree in m.trees:
        votes[tree_predict(tree, x)] += 1
    return int(np.argmax(votes))  # argmax returns the first (lowest) max index


def predict_many(m: TreeEnsemble, rows: np.ndarray) -> np.ndarray:
    return np.array([predict_majority(m, row) for row in rows], dtype=np.int64)


# ---------------------------------------------------------------------------
# portable ensemble JSON


def _node_to_json(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"id": node.id, "kind": "leaf", "class": node.class_index}
    rec = {"id": node.id, "kind": "split", "feature": node.feature}
    if node.values is not None:
        rec["values"] = sorted(node.values)
    else:
        rec["threshold"] = node.threshold
    rec["left"] = node.left
    rec["right"] = node.right
    return rec


def _node_from_json(rec: dict, ti: int) -> TreeNode:
    try:
        nid = int(rec["id"])
        kind = rec["kind"]
        if kind == "leaf":
            return TreeNode(id=nid, kind="leaf", class_index=int(rec["class"]))
        if kind == "split":
            values = rec.get("values")
            return TreeNode(
                id=nid,
                kind="split",
                feature=int(rec["feature"]),
                threshold=None if values is not None else float(rec["threshold"]),
                values=frozenset(str(v) for v in values) if values is not None else None,
                left=int(rec["left"]),
                right=int(rec["right"]),
            )
        raise EnsembleFormatError(f"unknown node kind {kind!r} at tree {ti} node {rec.get('id')}")
    except (KeyError, TypeError, ValueError) as exc:
        raise EnsembleFormatError(f"bad node record at tree {ti}: {exc}") from exc


def ensemble_to_json(m: TreeEnsemble) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "features": [
            {"name": n, "kind": k} for n, k in zip(m.features.names, m.features.kinds)
        ],
        "classes": list(m.classes.labels),
        "trees": [
            {"root": t.root, "nodes": [_node_to_json(n) for n in t.nodes]} for t in m.trees
        ],
        "metadata": dict(m.metadata),
    }


def ensemble_from_json(obj: dict) -> TreeEnsemble:
    try:
        features = FeatureSchema(
            tuple(str(f["name"]) for f in obj["features"]),
            tuple(str(f["kind"]) for f in obj["features"]),
        )
        classes = ClassSchema(tuple(str(c) for c in obj["classes"]))
        trees = tuple(
            DecisionTree(
                root=int(t["root"]),
                nodes=tuple(_node_from_json(rec, ti) for rec in t["nodes"]),
            )
            for ti, t in enumerate(obj["trees"])
        )
        metadata = dict(obj.get("metadata", {}))
    except (KeyError, TypeError) as exc:
        raise EnsembleFormatError(f"malformed ensemble JSON: {exc}") from exc
    m = TreeEnsemble(features=features, classes=classes, trees=trees, metadata=metadata)
    violations = validate_ensemble(m)
    if violations:
        raise EnsembleFormatError("; ".join(violations))
    return m


def load_ensemble(path: str | os.PathLike) -> TreeEnsemble:
    """Load and fully validate a portable ensemble JSON file."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise EnsembleFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise EnsembleFormatError(f"cannot parse {path}: {exc}") from exc
    return ensemble_from_json(obj)


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via temp file + rename so readers never observe partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def save_ensemble(m: TreeEnsemble, path: str | os.PathLike) -> None:
    atomic_write_text(path, dump_json(ensemble_to_json(m)))
