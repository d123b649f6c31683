"""The decision predicate graph (DPG) data type and its JSON format.

A DPG is a directed graph whose nodes are canonicalized predicates (or
class terminals) and whose edges count how often one predicate is
satisfied immediately after another across all (tree, sample) traversals.
Node labels are rendered once at build time ("petal width (cm) <= 1.65",
"Class 2") and are the serialized identity; structured predicates are
recovered from labels plus the provenance schemas on load.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import GraphFormatError
from .model import Predicate, atomic_write_text, dump_json

DECISION = "decision"
CLASS = "class"

_OPS_BY_LENGTH = ("<=", "!=", ">", "=")  # two-char ops first for parsing


def render_label(
    p: Predicate,
    feature_names: tuple[str, ...],
    class_labels: tuple[str, ...],
    decimals: int = 2,
) -> str:
    """Stable node label: "<feature> <op> <threshold>" or "Class <label>"."""
    if p.is_class:
        return f"Class {class_labels[p.class_index]}"
    name = feature_names[p.feature]
    if p.values is not None:
        return f"{name} {p.op} {{{','.join(sorted(p.values))}}}"
    return f"{name} {p.op} {p.threshold:.{decimals}f}"


def parse_label(
    label: str,
    feature_names: tuple[str, ...],
    class_labels: tuple[str, ...],
) -> Predicate:
    """Inverse of render_label, resolving names through the provenance schemas."""
    if label.startswith("Class "):
        name = label[len("Class "):]
        if name not in class_labels:
            raise GraphFormatError(f"unknown class label in node {label!r}")
        return Predicate.class_terminal(class_labels.index(name))
    for op in _OPS_BY_LENGTH:
        sep = f" {op} "
        idx = label.rfind(sep)
        if idx < 0:
            continue
        name, rest = label[:idx], label[idx + len(sep):]
        if name not in feature_names:
            continue
        feature = feature_names.index(name)
        if op in ("=", "!="):
            if not (rest.startswith("{") and rest.endswith("}")):
                raise GraphFormatError(f"bad value set in node {label!r}")
            values = [v for v in rest[1:-1].split(",") if v]
            return Predicate.decision(feature, op, values=values)
        try:
            return Predicate.decision(feature, op, float(rest))
        except ValueError as exc:
            raise GraphFormatError(f"bad threshold in node {label!r}") from exc
    raise GraphFormatError(f"cannot parse node label {label!r}")


@dataclass(frozen=True)
class DPGNode:
    id: int
    predicate: Predicate
    label: str

    @property
    def kind(self) -> str:
        return CLASS if self.predicate.is_class else DECISION


@dataclass(frozen=True)
class DPGEdge:
    src: int
    dst: int
    weight: int


@dataclass(frozen=True)
class DPG:
    """Immutable directed predicate graph with traversal provenance.

    ``source_counts[i]`` is the number of traces whose first step is node i
    (so for every decision node, out-weight minus in-weight equals its
    source count, and the counts sum to the total number of traces).
    """

    nodes: tuple[DPGNode, ...]
    edges: tuple[DPGEdge, ...]
    provenance: Mapping = field(default_factory=dict)
    source_counts: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.source_counts:
            object.__setattr__(self, "source_counts", tuple(0 for _ in self.nodes))

    # -- lookups ---------------------------------------------------------

    def node_by_label(self, label: str) -> DPGNode:
        for n in self.nodes:
            if n.label == label:
                return n
        raise KeyError(label)

    def class_nodes(self) -> tuple[DPGNode, ...]:
        return tuple(n for n in self.nodes if n.kind == CLASS)

    def class_node(self, class_index: int) -> DPGNode:
        for n in self.class_nodes():
            if n.predicate.class_index == class_index:
                return n
        raise GraphFormatError(f"no class node with index {class_index}")

    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.provenance.get("features", ()))

    def class_labels(self) -> tuple[str, ...]:
        return tuple(self.provenance.get("classes", ()))

    def total_traces(self) -> int:
        return sum(self.source_counts)

    # -- adjacency -------------------------------------------------------

    def successors(self) -> list[list[tuple[int, int]]]:
        """Per-node list of (dst, weight), sorted by dst."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for e in self.edges:
            out[e.src].append((e.dst, e.weight))
        for lst in out:
            lst.sort()
        return out

    def predecessors(self) -> list[list[tuple[int, int]]]:
        """Per-node list of (src, weight), sorted by src."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for e in self.edges:
            out[e.dst].append((e.src, e.weight))
        for lst in out:
            lst.sort()
        return out


def validate_dpg(g: DPG) -> list[str]:
    """Structural invariant violations; empty list means valid."""
    out = []
    ids = [n.id for n in g.nodes]
    if ids != list(range(len(g.nodes))):
        out.append("node ids are not dense 0..N-1 in order")
        return out
    labels = set()
    class_ids = set()
    for n in g.nodes:
        if n.label in labels:
            out.append(f"duplicate node label {n.label!r}")
        labels.add(n.label)
        if n.kind == CLASS:
            class_ids.add(n.id)
    seen_pairs = set()
    for e in g.edges:
        if not (0 <= e.src < len(g.nodes) and 0 <= e.dst < len(g.nodes)):
            out.append(f"edge ({e.src},{e.dst}) references unknown node")
            continue
        if e.weight < 1:
            out.append(f"edge ({e.src},{e.dst}) has weight {e.weight} < 1")
        if e.src in class_ids:
            out.append(f"class node {e.src} appears as edge source")
        if (e.src, e.dst) in seen_pairs:
            out.append(f"duplicate edge ({e.src},{e.dst})")
        seen_pairs.add((e.src, e.dst))
    if len(g.source_counts) != len(g.nodes):
        out.append("source_counts length differs from node count")
    return out


# ---------------------------------------------------------------------------
# JSON


def dpg_to_json(g: DPG) -> dict:
    return {
        "nodes": [{"id": n.id, "label": n.label, "kind": n.kind} for n in g.nodes],
        "edges": [
            {"src": e.src, "dst": e.dst, "weight": e.weight}
            for e in sorted(g.edges, key=lambda e: (e.src, e.dst))
        ],
        "provenance": {**dict(g.provenance), "source_counts": list(g.source_counts)},
    }


def dpg_from_json(obj: dict) -> DPG:
    try:
        provenance = dict(obj.get("provenance", {}))
        source_counts = tuple(int(c) for c in provenance.pop("source_counts", ()))
        features = tuple(str(f) for f in provenance.get("features", ()))
        classes = tuple(str(c) for c in provenance.get("classes", ()))
        nodes = []
        for rec in obj["nodes"]:
            label = str(rec["label"])
            kind = rec["kind"]
            pred = parse_label(label, features, classes)
            if (kind == CLASS) != pred.is_class:
                raise GraphFormatError(f"node {rec['id']} kind {kind!r} contradicts label")
            nodes.append(DPGNode(id=int(rec["id"]), predicate=pred, label=label))
        edges = tuple(
            DPGEdge(src=int(r["src"]), dst=int(r["dst"]), weight=int(r["weight"]))
            for r in obj["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph JSON: {exc}") from exc
    if not source_counts:
        source_counts = tuple(0 for _ in nodes)
    g = DPG(
        nodes=tuple(nodes), edges=edges, provenance=provenance, source_counts=source_counts
    )
    violations = validate_dpg(g)
    if violations:
        raise GraphFormatError("; ".join(violations))
    return g


def load_dpg(path: str | os.PathLike) -> DPG:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"cannot parse {path}: {exc}") from exc
    return dpg_from_json(obj)


def save_dpg(g: DPG, path: str | os.PathLike) -> None:
    atomic_write_text(path, dump_json(dpg_to_json(g)))
