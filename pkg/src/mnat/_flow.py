"""Successive-shortest-path min-cost flow for small bipartite transportation problems."""

from __future__ import annotations

import itertools
import math


def _shortest_path(n_nodes, graph, source):
    # Bellman-Ford (queue variant); residual costs may be negative.
    dist = [math.inf] * n_nodes
    prev = [None] * n_nodes
    dist[source] = 0.0
    in_queue = [False] * n_nodes
    queue = [source]
    in_queue[source] = True
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        in_queue[u] = False
        du = dist[u]
        for k, (v, cap, cost, _) in enumerate(graph[u]):
            if cap > 0 and du + cost < dist[v] - 1e-12:
                dist[v] = du + cost
                prev[v] = (u, k)
                if not in_queue[v]:
                    in_queue[v] = True
                    queue.append(v)
    return dist, prev


def max_weight_transport(supply, right_caps, edges):
    """Maximum total weight of an integral flow shipping exactly ``supply[i]``
    units out of each left vertex, at most ``right_caps[j]`` into right vertex
    ``j``, along ``edges = [(i, j, w), ...]`` (0-based endpoints).

    Returns ``None`` when no such flow exists.
    """
    n_left, n_right = len(supply), len(right_caps)
    source, sink = n_left + n_right, n_left + n_right + 1
    n_nodes = sink + 1
    graph = [[] for _ in range(n_nodes)]

    def add(u, v, cap, cost):
        graph[u].append([v, cap, cost, len(graph[v])])
        graph[v].append([u, 0, -cost, len(graph[u]) - 1])

    for i, s in enumerate(supply):
        if s:
            add(source, i, s, 0.0)
    for i, j, w in edges:
        if supply[i]:
            add(i, n_left + j, supply[i], -float(w))
    for j, c in enumerate(right_caps):
        if c:
            add(n_left + j, sink, c, 0.0)

    need = sum(supply)
    shipped = 0
    cost = 0.0
    while shipped < need:
        dist, prev = _shortest_path(n_nodes, graph, source)
        if dist[sink] == math.inf:
            return None
        push = need - shipped
        v = sink
        while v != source:
            u, k = prev[v]
            push = min(push, graph[u][k][1])
            v = u
        v = sink
        while v != source:
            u, k = prev[v]
            edge = graph[u][k]
            edge[1] -= push
            graph[v][edge[3]][1] += push
            v = u
        shipped += push
        cost += push * dist[sink]
    return -cost


def _compositions(total, parts):
    """All ways to write ``total`` as an ordered sum of ``parts`` nonnegative ints."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def max_weight_transport_brute(supply, right_caps, edges):
    """Same contract as :func:`max_weight_transport`, by exhaustive enumeration."""
    per_left = [[(j, w) for i2, j, w in edges if i2 == i] for i in range(len(supply))]
    options = []
    for i, s in enumerate(supply):
        opts = list(_compositions(s, len(per_left[i])))
        if not opts:
            return None
        options.append(opts)
    best = None
    for choice in itertools.product(*options):
        load = [0] * len(right_caps)
        value = 0.0
        for i, split in enumerate(choice):
            for (j, w), units in zip(per_left[i], split):
                if units:
                    load[j] += units
                    value += w * units
        if all(a <= c for a, c in zip(load, right_caps)) and (best is None or value > best):
            best = value
    return best
