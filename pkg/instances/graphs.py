"""Random graph models used by the max-cut and independent-set generators."""

from itertools import combinations

import numpy as np


class Graph:
    """
    Undirected simple graph on nodes 0..n_nodes-1.

    Edges are stored as sorted (u, v) tuples with u < v, in insertion order,
    so that instances built from a graph are reproducible.
    """

    def __init__(self, n_nodes, edges):
        self.n_nodes = n_nodes
        self.edges = []
        seen = set()
        for u, v in edges:
            edge = (min(u, v), max(u, v))
            if edge[0] == edge[1] or edge in seen:
                continue
            seen.add(edge)
            self.edges.append(edge)
        self.degrees = np.zeros(n_nodes, dtype=int)
        self.neighbors = {node: set() for node in range(n_nodes)}
        for u, v in self.edges:
            self.degrees[u] += 1
            self.degrees[v] += 1
            self.neighbors[u].add(v)
            self.neighbors[v].add(u)

    def __len__(self):
        return self.n_nodes

    @staticmethod
    def erdos_renyi(n_nodes, edge_probability, rng):
        """Each of the n(n-1)/2 pairs becomes an edge independently."""
        pairs = list(combinations(range(n_nodes), 2))
        draws = rng.random(len(pairs))
        return Graph(n_nodes, [pair for pair, u in zip(pairs, draws) if u < edge_probability])

    @staticmethod
    def barabasi_albert(n_nodes, affinity, rng):
        """
        Preferential attachment: the first new node joins all `affinity`
        seed nodes, every later node joins `affinity` existing nodes chosen
        with probability proportional to their degree.
        """
        affinity = max(1, min(affinity, n_nodes - 1))
        edges = []
        degrees = np.zeros(n_nodes, dtype=float)
        for new_node in range(affinity, n_nodes):
            if new_node == affinity:
                neighborhood = np.arange(affinity)
            else:
                prob = degrees[:new_node] / degrees[:new_node].sum()
                neighborhood = rng.choice(new_node, affinity, replace=False, p=prob)
            for node in neighborhood:
                edges.append((int(node), new_node))
                degrees[node] += 1
                degrees[new_node] += 1
        return Graph(n_nodes, edges)

    @staticmethod
    def fixed_edge_count(n_nodes, n_edges, rng):
        """Uniform graph with exactly `n_edges` edges (the G(n, M) model)."""
        pairs = list(combinations(range(n_nodes), 2))
        if n_edges > len(pairs):
            raise ValueError(
                f'{n_nodes} vertices admit at most {len(pairs)} edges, got {n_edges}.'
            )
        chosen = np.sort(rng.choice(len(pairs), n_edges, replace=False))
        return Graph(n_nodes, [pairs[i] for i in chosen])
