# cython: language_level=3
"""Compiled tracing-A* kernel.

Mirrors mazetrace.search._astar_python event for event: same neighbor
probe order, same (f, insertion counter) FIFO tie-break, same create /
close logging. The heap stores a single int64 key f * 2^32 + seq, which
orders identically to the (f, seq) tuple because both components are
non-negative and seq < 2^32.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

import numpy as np


cdef struct Heap:
    long long *key
    int *node
    int *gval
    int size
    int cap


cdef inline bint heap_push(Heap *h, long long key, int node, int gval) except 0:
    cdef int i, parent
    cdef long long k
    if h.size == h.cap:
        h.cap *= 2
        h.key = <long long *> realloc(h.key, h.cap * sizeof(long long))
        h.node = <int *> realloc(h.node, h.cap * sizeof(int))
        h.gval = <int *> realloc(h.gval, h.cap * sizeof(int))
        if h.key == NULL or h.node == NULL or h.gval == NULL:
            raise MemoryError()
    i = h.size
    h.size += 1
    h.key[i] = key
    h.node[i] = node
    h.gval[i] = gval
    while i > 0:
        parent = (i - 1) >> 1
        if h.key[parent] <= h.key[i]:
            break
        k = h.key[i]; h.key[i] = h.key[parent]; h.key[parent] = k
        node = h.node[i]; h.node[i] = h.node[parent]; h.node[parent] = node
        gval = h.gval[i]; h.gval[i] = h.gval[parent]; h.gval[parent] = gval
        i = parent
    return 1


cdef inline void heap_pop(Heap *h, int *out_node, int *out_gval):
    cdef int i = 0, child, n
    cdef long long k
    cdef int tn, tg
    out_node[0] = h.node[0]
    out_gval[0] = h.gval[0]
    h.size -= 1
    n = h.size
    if n == 0:
        return
    h.key[0] = h.key[n]
    h.node[0] = h.node[n]
    h.gval[0] = h.gval[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and h.key[child + 1] < h.key[child]:
            child += 1
        if h.key[i] <= h.key[child]:
            break
        k = h.key[i]; h.key[i] = h.key[child]; h.key[child] = k
        tn = h.node[i]; h.node[i] = h.node[child]; h.node[child] = tn
        tg = h.gval[i]; h.gval[i] = h.gval[child]; h.gval[child] = tg
        i = child


cdef inline int iabs(int v) nogil:
    return v if v >= 0 else -v


def astar(const unsigned char[::1] cells, int width, int height,
          int sx, int sy, int gx, int gy):
    """Run tracing A* over a flat row-major cell buffer.

    Returns (events, plan, solved): events is an int32 array of rows
    (kind, x, y, g, h) with kind 0=close 1=create; plan is an int32
    (len, 2) array of (x, y), empty when unsolved.
    """
    cdef int n = width * height
    cdef int start_node = sy * width + sx
    cdef int goal_node = gy * width + gx

    cdef int n_free = 0
    cdef int i
    for i in range(n):
        if cells[i] == 0:
            n_free += 1

    # <= 1 close per free cell, <= 4 creates per free cell
    events_np = np.empty((5 * n_free + 1, 5), dtype=np.int32)
    cdef int[:, ::1] events = events_np
    cdef int n_events = 0

    cdef int *best_g = <int *> malloc(n * sizeof(int))
    cdef int *parent = <int *> malloc(n * sizeof(int))
    cdef char *closed = <char *> malloc(n)
    cdef Heap heap
    heap.cap = 1024
    heap.size = 0
    heap.key = <long long *> malloc(heap.cap * sizeof(long long))
    heap.node = <int *> malloc(heap.cap * sizeof(int))
    heap.gval = <int *> malloc(heap.cap * sizeof(int))
    if (best_g == NULL or parent == NULL or closed == NULL or
            heap.key == NULL or heap.node == NULL or heap.gval == NULL):
        free(best_g); free(parent); free(closed)
        free(heap.key); free(heap.node); free(heap.gval)
        raise MemoryError()

    cdef int node, g, g2, x, y, h, nx, ny, nb, nh, d
    cdef int dx[4]
    cdef int dy[4]
    dx[0] = -1; dy[0] = 0
    dx[1] = 1;  dy[1] = 0
    dx[2] = 0;  dy[2] = -1
    dx[3] = 0;  dy[3] = 1
    cdef long long seq = 0
    cdef bint solved = False

    try:
        for i in range(n):
            best_g[i] = -1
            parent[i] = -1
            closed[i] = 0

        best_g[start_node] = 0
        h = iabs(sx - gx) + iabs(sy - gy)
        heap_push(&heap, (<long long> h << 32) | seq, start_node, 0)
        seq += 1

        while heap.size > 0:
            heap_pop(&heap, &node, &g)
            if closed[node] or g != best_g[node]:
                continue
            closed[node] = 1
            x = node % width
            y = node // width
            h = iabs(x - gx) + iabs(y - gy)
            events[n_events, 0] = 0
            events[n_events, 1] = x
            events[n_events, 2] = y
            events[n_events, 3] = g
            events[n_events, 4] = h
            n_events += 1
            if node == goal_node:
                solved = True
                break
            g2 = g + 1
            for d in range(4):
                nx = x + dx[d]
                ny = y + dy[d]
                if nx < 0 or nx >= width or ny < 0 or ny >= height:
                    continue
                nb = ny * width + nx
                if cells[nb] or closed[nb]:
                    continue
                if best_g[nb] < 0 or g2 < best_g[nb]:
                    best_g[nb] = g2
                    parent[nb] = node
                    nh = iabs(nx - gx) + iabs(ny - gy)
                    heap_push(&heap, (<long long> (g2 + nh) << 32) | seq, nb, g2)
                    seq += 1
                    events[n_events, 0] = 1
                    events[n_events, 1] = nx
                    events[n_events, 2] = ny
                    events[n_events, 3] = g2
                    events[n_events, 4] = nh
                    n_events += 1

        if solved:
            plan_len = best_g[goal_node] + 1
            plan_np = np.empty((plan_len, 2), dtype=np.int32)
            node = goal_node
            for i in range(plan_len - 1, -1, -1):
                plan_np[i, 0] = node % width
                plan_np[i, 1] = node // width
                node = parent[node]
        else:
            plan_np = np.empty((0, 2), dtype=np.int32)
    finally:
        free(best_g)
        free(parent)
        free(closed)
        free(heap.key)
        free(heap.node)
        free(heap.gval)

    return events_np[:n_events].copy(), plan_np, solved
