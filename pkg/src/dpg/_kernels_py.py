"""Pure-Python (numpy) kernels: traversal pair-counting and betweenness.

Mirrors the compiled `_speedups` extension; selected as a fallback when the
extension is unavailable or DPG_PURE_PYTHON is set.  Both backends share the
same call contract, so their outputs are interchangeable bit-for-bit.

Trees arrive compiled into flat arrays: per node a feature index (−1 for
leaves), a raw threshold, child indices, and the per-tree "slot" ids of the
canonical predicates recorded when the node routes a sample left (condition
true), right (false), or into a leaf (class slot, stored in slot_true).
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import TraversalError

NAME = "python"


def traverse_pairs(root, feat, thr, left, right, slot_true, slot_false, n_slots, X):
    """Route all samples through one compiled tree.

    Returns (codes, order, starts): raw stream of consecutive-slot pair codes
    (prev * n_slots + cur, unaggregated), slot ids in order of first visit
    (sample-major, path order), and per-slot counts of traces starting there.
    """
    n = X.shape[0]
    starts = np.zeros(n_slots, dtype=np.int64)
    code_chunks = []
    visit_slots, visit_samples, visit_levels = [], [], []

    samples = np.arange(n, dtype=np.int64)
    nodes = np.full(n, root, dtype=np.int64)
    prev = np.full(n, -1, dtype=np.int64)
    level = 0
    while samples.size:
        node_feat = feat[nodes]
        leaf = node_feat < 0
        if leaf.any():
            slots = slot_true[nodes[leaf]].astype(np.int64)
            visit_slots.append(slots)
            visit_samples.append(samples[leaf])
            visit_levels.append(np.full(slots.size, level, dtype=np.int64))
            p = prev[leaf]
            has_prev = p >= 0
            code_chunks.append(p[has_prev] * n_slots + slots[has_prev])
            if level == 0:
                starts += np.bincount(slots, minlength=n_slots)
        split = ~leaf
        samples = samples[split]
        if not samples.size:
            break
        nodes = nodes[split]
        prev = prev[split]
        f = node_feat[split]
        values = X[samples, f]
        finite = np.isfinite(values)
        if not finite.all():
            bad = int(np.argmin(finite))
            raise TraversalError(
                f"non-finite value for feature {int(f[bad])} in sample {int(samples[bad])}"
            )
        go_left = values <= thr[nodes]
        slots = np.where(go_left, slot_true[nodes], slot_false[nodes]).astype(np.int64)
        visit_slots.append(slots)
        visit_samples.append(samples)
        visit_levels.append(np.full(slots.size, level, dtype=np.int64))
        has_prev = prev >= 0
        code_chunks.append(prev[has_prev] * n_slots + slots[has_prev])
        if level == 0:
            starts += np.bincount(slots, minlength=n_slots)
        nodes = np.where(go_left, left[nodes], right[nodes])
        prev = slots
        level += 1

    codes = (
        np.concatenate(code_chunks) if code_chunks else np.empty(0, dtype=np.int64)
    )
    if visit_slots:
        all_slots = np.concatenate(visit_slots)
        all_samples = np.concatenate(visit_samples)
        all_levels = np.concatenate(visit_levels)
        seq = np.lexsort((all_levels, all_samples))
        sorted_slots = all_slots[seq]
        _, first = np.unique(sorted_slots, return_index=True)
        order = sorted_slots[np.sort(first)].astype(np.int32)
    else:
        order = np.empty(0, dtype=np.int32)
    return codes, order, starts


def brandes(n_nodes, indptr, indices, weights, rindptr, rindices, rweights, weighted):
    """Unnormalized betweenness accumulation over all sources.

    Shortest paths by hop count, or by edge weight as distance when
    `weighted`.  Dependency accumulation walks the shortest-path DAG through
    the reverse adjacency (dist[v] + len(v,w) == dist[w]), which is exactly
    the predecessor relation, so no predecessor lists are materialized.
    """
    bc = np.zeros(n_nodes, dtype=np.float64)
    dist = np.empty(n_nodes, dtype=np.float64)
    sigma = np.empty(n_nodes, dtype=np.float64)
    delta = np.empty(n_nodes, dtype=np.float64)
    settled = np.empty(n_nodes, dtype=np.int64)

    for s in range(n_nodes):
        if indptr[s] == indptr[s + 1]:
            continue
        dist.fill(np.inf)
        sigma.fill(0.0)
        delta.fill(0.0)
        dist[s] = 0.0
        sigma[s] = 1.0
        n_settled = 0
        if weighted:
            heap = [(0.0, s)]
            done = np.zeros(n_nodes, dtype=bool)
            while heap:
                d, v = heapq.heappop(heap)
                if done[v]:
                    continue
                done[v] = True
                settled[n_settled] = v
                n_settled += 1
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    nd = d + weights[k]
                    if nd < dist[w]:
                        dist[w] = nd
                        sigma[w] = sigma[v]
                        heapq.heappush(heap, (nd, w))
                    elif nd == dist[w]:
                        sigma[w] += sigma[v]
        else:
            queue = settled  # BFS visit order doubles as the settle order
            queue[0] = s
            n_settled = 1
            head = 0
            while head < n_settled:
                v = queue[head]
                head += 1
                dv = dist[v]
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if dist[w] == np.inf:
                        dist[w] = dv + 1.0
                        queue[n_settled] = w
                        n_settled += 1
                    if dist[w] == dv + 1.0:
                        sigma[w] += sigma[v]

        for i in range(n_settled - 1, 0, -1):
            w = settled[i]
            dw = dist[w]
            coeff = (1.0 + delta[w]) / sigma[w]
            for k in range(rindptr[w], rindptr[w + 1]):
                v = rindices[k]
                step = rweights[k] if weighted else 1.0
                if dist[v] + step == dw:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc
