"""
Odd-cycle inequalities on the conflict graph, found as shortest paths in
its bipartite double cover with edge weights max(0, 1 - x_u - x_v).
"""

import logging

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

VIOLATION_TOL = 1e-6
MAX_SOURCES = 50


def double_cover(graph, x):
    cover = nx.Graph()
    for u, v in graph.edges:
        weight = max(0.0, 1.0 - x[u] - x[v])
        cover.add_edge((u, 0), (v, 1), weight=weight)
        cover.add_edge((u, 1), (v, 0), weight=weight)
    return cover


def simple_odd_cycle(walk):
    """
    Simple odd cycle contained in a closed walk of odd length, given as the
    vertex list with walk[0] == walk[-1].
    """
    walk = list(walk)
    while True:
        position = {}
        for k, v in enumerate(walk):
            if v not in position:
                position[v] = k
                continue
            i = position[v]
            if (k - i) % 2 == 1:
                return walk[i:k]
            # drop the even closed sub-walk, the rest is still odd and closed
            walk = walk[:i] + walk[k:]
            break
        else:
            raise ValueError('walk is not closed')


def separate_oddcycle(context):
    graph = context.structure.conflict_graph
    x = context.x
    n = context.problem.num_vars
    nodes = [v for v in graph.nodes if 1e-6 < x[v] < 1 - 1e-6 and graph.degree[v] >= 2]
    nodes.sort(key=lambda v: (abs(x[v] - 0.5), v))
    if not nodes:
        return []
    cover = double_cover(graph.subgraph([v for v in graph.nodes if x[v] > 1e-6]), x)

    cuts, seen = [], set()
    for v in nodes[:MAX_SOURCES]:
        if (v, 0) not in cover or (v, 1) not in cover:
            continue
        try:
            length, path = nx.single_source_dijkstra(cover, (v, 0), (v, 1))
        except nx.NetworkXNoPath:
            continue
        if length >= 1 - VIOLATION_TOL:
            continue
        cycle = simple_odd_cycle([u for u, _ in path])
        key = frozenset(cycle)
        if len(cycle) < 3 or key in seen:
            continue
        seen.add(key)
        dense = np.zeros(n)
        dense[cycle] = 1.0
        cut = context.finish(dense, (len(cycle) - 1) / 2, 'oddcycle')
        if cut is not None:
            cuts.append(cut)
    logger.debug('oddcycle: %d cuts', len(cuts))
    return cuts
