"""Per-class feature constraints extracted from a decision predicate graph.

Every decision node with a directed path into a class node contributes its
predicate to that class.  Per feature, the lower bound is the smallest
threshold among "feature > t" predicates (exclusive) and the upper bound is
the largest among "feature <= t" (inclusive); a missing side is unbounded.
The result is the widest interval a sample may occupy while still being
able to satisfy every predicate chain into the class.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import DatasetError
from .graph import DPG
from .model import Dataset

__all__ = [
    "FeatureInterval",
    "ClassConstraints",
    "reachable_to_class",
    "extract_constraints",
    "constraint_match",
    "evaluate_constraints",
]


@dataclass(frozen=True)
class FeatureInterval:
    """One feature's bounds: exclusive lower, inclusive upper.

    Infinities mark unbounded sides.  Graphs from real ensembles yield
    lower < upper; an adversarial graph can produce an empty interval
    (lower >= upper), which then matches no value.  Categorical predicates
    contribute include/exclude value sets instead of bounds (experimental).
    """

    feature: int
    lower: float = -math.inf
    upper: float = math.inf
    include_values: frozenset[str] | None = None
    exclude_values: frozenset[str] | None = None

    def contains(self, value) -> bool:
        if self.include_values is not None or self.exclude_values is not None:
            sval = str(value)
            if self.include_values is not None and sval not in self.include_values:
                return False
            if self.exclude_values is not None and sval in self.exclude_values:
                return False
            return True
        return self.lower < float(value) <= self.upper


@dataclass(frozen=True)
class ClassConstraints:
    class_index: int
    class_label: str
    intervals: tuple[FeatureInterval, ...]  # sorted by feature, one per feature


def reachable_to_class(g: DPG, class_index: int) -> frozenset[int]:
    """Ids of decision nodes with a directed path into the class node."""
    target = g.class_node(class_index).id
    preds = g.predecessors()
    seen = {target}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u, _ in preds[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    seen.discard(target)
    return frozenset(seen)


def extract_constraints(g: DPG, class_index: int) -> ClassConstraints:
    """Widest per-feature intervals over all predicates reaching the class."""
    node = g.class_node(class_index)
    lowers: dict[int, float] = {}
    uppers: dict[int, float] = {}
    includes: dict[int, set[str]] = {}
    excludes: dict[int, set[str]] = {}
    for nid in reachable_to_class(g, class_index):
        p = g.nodes[nid].predicate
        f = p.feature
        if p.op == ">":
            lowers[f] = min(lowers.get(f, math.inf), p.threshold)
        elif p.op == "<=":
            uppers[f] = max(uppers.get(f, -math.inf), p.threshold)
        elif p.op == "=":
            includes.setdefault(f, set()).update(p.values)
        elif p.op == "!=":
            excludes.setdefault(f, set()).update(p.values)
    intervals = []
    for f in sorted(set(lowers) | set(uppers) | set(includes) | set(excludes)):
        intervals.append(
            FeatureInterval(
                feature=f,
                lower=lowers.get(f, -math.inf),
                upper=uppers.get(f, math.inf),
                include_values=frozenset(includes[f]) if f in includes else None,
                exclude_values=frozenset(excludes[f]) if f in excludes else None,
            )
        )
    class_labels = g.class_labels()
    label = (
        class_labels[class_index]
        if class_index < len(class_labels)
        else str(class_index)
    )
    return ClassConstraints(
        class_index=class_index, class_label=label, intervals=tuple(intervals)
    )


def constraint_match(x: Sequence, cc: ClassConstraints) -> bool:
    """True iff every interval contains the sample's value (vacuously true)."""
    return all(iv.contains(x[iv.feature]) for iv in cc.intervals)


def evaluate_constraints(d: Dataset, rows: Sequence[int], cc: ClassConstraints) -> dict:
    """Recall of the class's own rows plus match counts leaking from others."""
    if d.labels is None:
        raise DatasetError("constraint evaluation needs labeled data")

    def is_target(label_index: int) -> bool:
        if d.label_names is not None:
            return d.label_names[label_index] == cc.class_label
        return label_index == cc.class_index

    def label_name(label_index: int) -> str:
        if d.label_names is not None:
            return d.label_names[label_index]
        return str(label_index)

    total = 0
    matched = 0
    leakage = 0
    leakage_by_class: dict[str, int] = {}
    for r in rows:
        hit = constraint_match(d.rows[r], cc)
        if is_target(int(d.labels[r])):
            total += 1
            matched += int(hit)
        elif hit:
            leakage += 1
            name = label_name(int(d.labels[r]))
            leakage_by_class[name] = leakage_by_class.get(name, 0) + 1
    recall = matched / total if total else 1.0
    return {
        "class_index": cc.class_index,
        "class_label": cc.class_label,
        "recall": recall,
        "matched": matched,
        "total": total,
        "leakage": leakage,
        "leakage_by_class": dict(sorted(leakage_by_class.items())),
    }
