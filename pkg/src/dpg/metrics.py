"""Centrality and community analytics over a decision predicate graph.

Three analyses: betweenness centrality (bottleneck predicates), local
reaching centrality (hierarchy / influence of a predicate), and communities
via asynchronous label propagation (per-class predicate groupings).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import GraphFormatError
from .graph import CLASS, DPG
from .kernels import get_backend

__all__ = [
    "CentralityReport",
    "CommunityReport",
    "betweenness_centrality",
    "local_reaching_centrality",
    "detect_communities",
    "community_classes",
]


@dataclass(frozen=True)
class CentralityReport:
    """Per-node scores plus a deterministic ranking (score desc, id asc)."""

    metric: str
    scores: dict[int, float]
    ranking: tuple[int, ...]

    def top(self, k: int) -> list[tuple[int, float]]:
        return [(i, self.scores[i]) for i in self.ranking[:k]]


def _make_report(metric: str, scores: dict[int, float]) -> CentralityReport:
    ranking = tuple(sorted(scores, key=lambda i: (-scores[i], i)))
    return CentralityReport(metric=metric, scores=scores, ranking=ranking)


def _require_nonempty(g: DPG) -> None:
    if not g.nodes:
        raise GraphFormatError("graph has no nodes")


def _csr(g: DPG, reverse: bool = False):
    n = len(g.nodes)
    adj = g.predecessors() if reverse else g.successors()
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, lst in enumerate(adj):
        indptr[i + 1] = indptr[i] + len(lst)
    indices = np.empty(indptr[-1], dtype=np.int64)
    weights = np.empty(indptr[-1], dtype=np.float64)
    k = 0
    for lst in adj:
        for other, w in lst:
            indices[k] = other
            weights[k] = w
            k += 1
    return indptr, indices, weights


def betweenness_centrality(
    g: DPG, weighted: bool = False, backend: str | None = None
) -> CentralityReport:
    """Fraction of all-pairs shortest paths passing through each node.

    Directed, endpoints excluded, normalized by (N-1)(N-2).  Paths are
    hop-count shortest by default; with `weighted`, edge weights act as
    path lengths (Dijkstra).
    """
    _require_nonempty(g)
    n = len(g.nodes)
    if n < 3:
        return _make_report("bc", {i: 0.0 for i in range(n)})
    kern = get_backend(backend)
    indptr, indices, weights = _csr(g)
    rindptr, rindices, rweights = _csr(g, reverse=True)
    raw = kern.brandes(n, indptr, indices, weights, rindptr, rindices, rweights, bool(weighted))
    norm = float((n - 1) * (n - 2))
    scores = {i: float(raw[i]) / norm for i in range(n)}
    return _make_report("bc", scores)


def local_reaching_centrality(g: DPG, weighted: bool = True) -> CentralityReport:
    """Average reachability strength of each node via its outgoing edges.

    LRC(v) = (1/(N-1)) * sum over nodes u reachable from v of the mean edge
    weight along the hop-shortest v->u path.  Ties between equal-hop paths
    prefer larger total weight, then the lexicographically smallest node-id
    sequence (exact float comparison on totals).  Weights are pre-scaled by
    N / (total traces) so magnitudes do not grow with dataset size; in
    unweighted mode every edge counts 1 and no scaling is applied, which
    makes the score exactly the fraction of other nodes reachable.
    """
    _require_nonempty(g)
    n = len(g.nodes)
    succ = g.successors()
    if weighted:
        total = g.total_traces()
        scale = n / total if total > 0 else 1.0
    else:
        scale = 1.0
    scores: dict[int, float] = {}
    for v in range(n):
        if n == 1:
            scores[v] = 0.0
            continue
        dist = [-1] * n
        tw = [0.0] * n
        rank = [0] * n
        dist[v] = 0
        layer = [v]
        depth = 0
        acc = 0.0
        while layer:
            depth += 1
            best: dict[int, tuple[float, int]] = {}
            for p in layer:
                for u, w in succ[p]:
                    if dist[u] != -1 and dist[u] != depth:
                        continue
                    dist[u] = depth
                    step = 1.0 if not weighted else w * scale
                    key = (-(tw[p] + step), rank[p])
                    cur = best.get(u)
                    if cur is None or key < cur:
                        best[u] = key
            layer = sorted(best, key=lambda u: (best[u], u))
            for r, u in enumerate(layer):
                rank[u] = r
                tw[u] = -best[u][0]
                acc += tw[u] / depth
        scores[v] = acc / (n - 1)
    return _make_report("lrc", scores)


@dataclass(frozen=True)
class CommunityReport:
    """Node partition from label propagation, ordered by smallest member id."""

    communities: tuple[frozenset[int], ...]
    class_labels: tuple[tuple[str, ...], ...]
    seed: int
    iterations: int


def detect_communities(g: DPG, seed: int = 0, max_iters: int = 100) -> CommunityReport:
    """Asynchronous weighted label propagation over outgoing edges.

    Every node starts with its own label; in each sweep the nodes are
    visited in a seeded random order and adopt the label with the largest
    summed edge weight among their out-neighbours (ties break to the
    smallest label).  Nodes without outgoing edges (class terminals) never
    change label, which anchors one community per class.  Propagation stops
    once every node's label is in its neighbour-majority set, or after
    `max_iters` sweeps.
    """
    _require_nonempty(g)
    n = len(g.nodes)
    succ = g.successors()
    labels = list(range(n))

    def majorities(v: int) -> set[int]:
        wsum: dict[int, float] = {}
        for u, w in succ[v]:
            lab = labels[u]
            wsum[lab] = wsum.get(lab, 0.0) + w
        mx = max(wsum.values())
        return {lab for lab, s in wsum.items() if s == mx}

    rng = random.Random(seed)
    order = list(range(n))
    iterations = 0
    while iterations < max_iters:
        rng.shuffle(order)
        for v in order:
            if not succ[v]:
                continue
            best = majorities(v)
            if labels[v] not in best:
                labels[v] = min(best)
        iterations += 1
        if all(not succ[v] or labels[v] in majorities(v) for v in range(n)):
            break

    groups: dict[int, set[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(lab, set()).add(v)
    communities = tuple(
        frozenset(c) for c in sorted(groups.values(), key=min)
    )
    class_names = g.class_labels()
    per_comm = []
    for comm in communities:
        found = sorted(
            g.nodes[v].predicate.class_index for v in comm if g.nodes[v].kind == CLASS
        )
        per_comm.append(
            tuple(class_names[c] if c < len(class_names) else str(c) for c in found)
        )
    return CommunityReport(
        communities=communities,
        class_labels=tuple(per_comm),
        seed=seed,
        iterations=iterations,
    )


def community_classes(r: CommunityReport, g: DPG) -> list[dict]:
    """Per-community summary rows: size, features involved, class association."""
    covered = sorted(v for comm in r.communities for v in comm)
    if covered != [node.id for node in g.nodes]:
        raise GraphFormatError("community report does not partition this graph")
    rows = []
    for i, comm in enumerate(r.communities):
        preds = [g.nodes[v].predicate for v in sorted(comm) if g.nodes[v].kind != CLASS]
        features = {p.feature for p in preds}
        classes = list(r.class_labels[i])
        rows.append(
            {
                "community": i + 1,
                "n_predicates": len(preds),
                "n_features": len(features),
                "classes": classes if classes else ["unassigned"],
            }
        )
    return rows
