"""Combined analysis bundle: constraints, centrality top-K, communities."""

from __future__ import annotations

import math

from .constraints import ClassConstraints, extract_constraints
from .graph import DPG
from .metrics import (
    CentralityReport,
    betweenness_centrality,
    community_classes,
    detect_communities,
    local_reaching_centrality,
)

__all__ = ["report", "ALL_METRICS"]

ALL_METRICS = ("constraints", "bc", "lrc", "communities")


def _finite_or_none(x: float):
    return None if math.isinf(x) else x


def constraints_to_json(cc: ClassConstraints, feature_names: tuple[str, ...]) -> dict:
    intervals = []
    for iv in cc.intervals:
        name = feature_names[iv.feature] if iv.feature < len(feature_names) else str(iv.feature)
        rec = {
            "feature": name,
            "lower": _finite_or_none(iv.lower),
            "upper": _finite_or_none(iv.upper),
        }
        if iv.include_values is not None:
            rec["include_values"] = sorted(iv.include_values)
        if iv.exclude_values is not None:
            rec["exclude_values"] = sorted(iv.exclude_values)
        intervals.append(rec)
    return {"class": cc.class_label, "intervals": intervals}


def centrality_rows(r: CentralityReport, g: DPG, top: int) -> list[dict]:
    return [
        {"rank": k + 1, "label": g.nodes[i].label, "score": score}
        for k, (i, score) in enumerate(r.top(top))
    ]


def report(
    g: DPG,
    metrics: tuple[str, ...] = ALL_METRICS,
    top: int = 8,
    seed: int = 0,
    weighted_bc: bool = True,
    backend: str | None = None,
) -> dict:
    """One JSON-ready bundle; `metrics` selects which sections to compute."""
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ValueError(f"unknown metric(s): {', '.join(unknown)}")
    bundle: dict = {"provenance": {**dict(g.provenance), "n_nodes": len(g.nodes), "n_edges": len(g.edges)}}
    if "constraints" in metrics:
        names = g.feature_names()
        bundle["constraints"] = [
            constraints_to_json(extract_constraints(g, n.predicate.class_index), names)
            for n in g.class_nodes()
        ]
    if "bc" in metrics:
        bundle["bc"] = centrality_rows(
            betweenness_centrality(g, weighted=weighted_bc, backend=backend), g, top
        )
    if "lrc" in metrics:
        bundle["lrc"] = centrality_rows(local_reaching_centrality(g), g, top)
    if "communities" in metrics:
        r = detect_communities(g, seed=seed)
        bundle["communities"] = {
            "seed": r.seed,
            "iterations": r.iterations,
            "table": community_classes(r, g),
        }
    return bundle
