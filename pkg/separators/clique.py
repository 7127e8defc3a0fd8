import logging

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-6
MAX_CLIQUES = 1000


def _extend(graph, clique, x):
    """Grow a clique greedily in the full conflict graph, highest LP value first."""
    members = set(clique)
    candidates = set.intersection(*(set(graph[v]) for v in clique)) - members
    for v in sorted(candidates, key=lambda v: (-x[v], v)):
        if all(graph.has_edge(v, u) for u in members):
            members.add(v)
    return sorted(members)


def separate_clique(context):
    graph = context.structure.conflict_graph
    x = context.x
    n = context.problem.num_vars
    support = [v for v in graph.nodes if x[v] > SUPPORT_TOL]
    subgraph = graph.subgraph(support)

    cuts, seen = [], set()
    for k, clique in enumerate(nx.find_cliques(subgraph)):
        if k >= MAX_CLIQUES:
            break
        if len(clique) < 2 or sum(x[v] for v in clique) <= 1 + SUPPORT_TOL:
            continue
        members = tuple(_extend(graph, clique, x))
        if members in seen:
            continue
        seen.add(members)
        dense = np.zeros(n)
        dense[list(members)] = 1.0
        cut = context.finish(dense, 1.0, 'clique')
        if cut is not None:
            cuts.append(cut)
    logger.debug('clique: %d cuts', len(cuts))
    return cuts
