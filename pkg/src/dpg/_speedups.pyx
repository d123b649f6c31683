# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: traversal pair-counting and betweenness accumulation.

Same call contract as `_kernels_py`; see that module for the semantics.
"""

import numpy as np

from .errors import TraversalError

cimport numpy as cnp
from libc.math cimport INFINITY, isfinite

cnp.import_array()

NAME = "cython"


def traverse_pairs(int root,
                   int[::1] feat,
                   double[::1] thr,
                   int[::1] left,
                   int[::1] right,
                   int[::1] slot_true,
                   int[::1] slot_false,
                   int n_slots,
                   double[:, ::1] X):
    cdef Py_ssize_t n_samples = X.shape[0]
    cdef Py_ssize_t n_nodes = feat.shape[0]

    # max number of splits on any root-to-leaf path, for buffer sizing
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack_n = np.empty(n_nodes + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack_d = np.empty(n_nodes + 1, dtype=np.int64)
    cdef long long[::1] sn = stack_n
    cdef long long[::1] sd = stack_d
    cdef Py_ssize_t top = 0
    cdef long long node, depth, max_depth = 0
    sn[0] = root
    sd[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = sn[top]
        depth = sd[top]
        if feat[node] < 0:
            if depth > max_depth:
                max_depth = depth
        else:
            sn[top] = left[node]
            sd[top] = depth + 1
            top += 1
            sn[top] = right[node]
            sd[top] = depth + 1
            top += 1

    cdef cnp.ndarray[cnp.int64_t, ndim=1] codes_arr = np.empty(
        n_samples * max_depth, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] order_arr = np.empty(n_slots, dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] starts_arr = np.zeros(n_slots, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] visited_arr = np.zeros(n_slots, dtype=np.uint8)
    cdef long long[::1] codes = codes_arr
    cdef int[::1] order = order_arr
    cdef long long[::1] starts = starts_arr
    cdef unsigned char[::1] visited = visited_arr

    cdef Py_ssize_t s, n_codes = 0, n_order = 0
    cdef long long i, prev, cur
    cdef int f
    cdef double v
    cdef Py_ssize_t err_sample = -1
    cdef int err_feature = -1

    with nogil:
        for s in range(n_samples):
            i = root
            prev = -1
            while feat[i] >= 0:
                f = feat[i]
                v = X[s, f]
                if not isfinite(v):
                    err_sample = s
                    err_feature = f
                    break
                if v <= thr[i]:
                    cur = slot_true[i]
                    i = left[i]
                else:
                    cur = slot_false[i]
                    i = right[i]
                if visited[cur] == 0:
                    visited[cur] = 1
                    order[n_order] = <int> cur
                    n_order += 1
                if prev >= 0:
                    codes[n_codes] = prev * n_slots + cur
                    n_codes += 1
                else:
                    starts[cur] += 1
                prev = cur
            if err_sample >= 0:
                break
            cur = slot_true[i]
            if visited[cur] == 0:
                visited[cur] = 1
                order[n_order] = <int> cur
                n_order += 1
            if prev >= 0:
                codes[n_codes] = prev * n_slots + cur
                n_codes += 1
            else:
                starts[cur] += 1

    if err_sample >= 0:
        raise TraversalError(
            f"non-finite value for feature {err_feature} in sample {err_sample}")
    return codes_arr[:n_codes].copy(), order_arr[:n_order].copy(), starts_arr


def brandes(Py_ssize_t n_nodes,
            long long[::1] indptr,
            long long[::1] indices,
            double[::1] weights,
            long long[::1] rindptr,
            long long[::1] rindices,
            double[::1] rweights,
            bint weighted):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bc_arr = np.zeros(n_nodes, dtype=np.float64)
    cdef double[::1] bc = bc_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_arr = np.empty(n_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sigma_arr = np.empty(n_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_arr = np.empty(n_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] settled_arr = np.empty(n_nodes, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_arr = np.empty(n_nodes, dtype=np.uint8)
    # pushes per source are bounded by the edge count (each edge relaxes at
    # most once when its origin settles), so size the heap for that
    cdef cnp.ndarray[cnp.float64_t, ndim=1] heap_d_arr = np.empty(
        indices.shape[0] + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] heap_v_arr = np.empty(
        indices.shape[0] + 1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef double[::1] sigma = sigma_arr
    cdef double[::1] delta = delta_arr
    cdef long long[::1] settled = settled_arr
    cdef unsigned char[::1] done = done_arr
    cdef double[::1] heap_d = heap_d_arr
    cdef long long[::1] heap_v = heap_v_arr

    cdef Py_ssize_t src, i, j, k, head
    cdef long long v, w
    cdef Py_ssize_t n_settled, heap_n
    cdef double dv, dw, nd, coeff, step, td
    cdef long long tv

    with nogil:
        for src in range(n_nodes):
            if indptr[src] == indptr[src + 1]:
                continue
            for i in range(n_nodes):
                dist[i] = INFINITY
                sigma[i] = 0.0
                delta[i] = 0.0
            dist[src] = 0.0
            sigma[src] = 1.0
            n_settled = 0

            if weighted:
                for i in range(n_nodes):
                    done[i] = 0
                heap_d[0] = 0.0
                heap_v[0] = src
                heap_n = 1
                while heap_n > 0:
                    dv = heap_d[0]
                    v = heap_v[0]
                    heap_n -= 1
                    heap_d[0] = heap_d[heap_n]
                    heap_v[0] = heap_v[heap_n]
                    # sift down
                    i = 0
                    while True:
                        j = 2 * i + 1
                        if j >= heap_n:
                            break
                        if j + 1 < heap_n and heap_d[j + 1] < heap_d[j]:
                            j += 1
                        if heap_d[j] < heap_d[i]:
                            td = heap_d[i]; heap_d[i] = heap_d[j]; heap_d[j] = td
                            tv = heap_v[i]; heap_v[i] = heap_v[j]; heap_v[j] = tv
                            i = j
                        else:
                            break
                    if done[v]:
                        continue
                    done[v] = 1
                    settled[n_settled] = v
                    n_settled += 1
                    for k in range(indptr[v], indptr[v + 1]):
                        w = indices[k]
                        nd = dv + weights[k]
                        if nd < dist[w]:
                            dist[w] = nd
                            sigma[w] = sigma[v]
                            heap_d[heap_n] = nd
                            heap_v[heap_n] = w
                            i = heap_n
                            heap_n += 1
                            while i > 0:
                                j = (i - 1) // 2
                                if heap_d[i] < heap_d[j]:
                                    td = heap_d[i]; heap_d[i] = heap_d[j]; heap_d[j] = td
                                    tv = heap_v[i]; heap_v[i] = heap_v[j]; heap_v[j] = tv
                                    i = j
                                else:
                                    break
                        elif nd == dist[w]:
                            sigma[w] += sigma[v]
            else:
                settled[0] = src
                n_settled = 1
                head = 0
                while head < n_settled:
                    v = settled[head]
                    head += 1
                    dv = dist[v]
                    for k in range(indptr[v], indptr[v + 1]):
                        w = indices[k]
                        if dist[w] == INFINITY:
                            dist[w] = dv + 1.0
                            settled[n_settled] = w
                            n_settled += 1
                        if dist[w] == dv + 1.0:
                            sigma[w] += sigma[v]

            for i in range(n_settled - 1, 0, -1):
                w = settled[i]
                dw = dist[w]
                coeff = (1.0 + delta[w]) / sigma[w]
                for k in range(rindptr[w], rindptr[w + 1]):
                    v = rindices[k]
                    if weighted:
                        step = rweights[k]
                    else:
                        step = 1.0
                    if dist[v] + step == dw:
                        delta[v] += sigma[v] * coeff
                bc[w] += delta[w]
    return bc_arr
