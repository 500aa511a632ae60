"""
Variable/constraint interaction graph.

Bipartite graph with one node per variable and per constraint; an edge
joins a constraint to every variable it mentions.
"""

from typing import List

import networkx as nx

from ..lp import LpModel


def interaction_graph(m: LpModel) -> nx.Graph:
    g = nx.Graph()
    for var in m.variables:
        g.add_node(("var", var.name), kind="var")
    for con in m.constraints:
        g.add_node(("con", con.name), kind="con")
        for var, coef in con.terms.items():
            if coef != 0.0:
                g.add_edge(("con", con.name), ("var", var))
    return g


def variables_by_degree(m: LpModel) -> List[str]:
    """Variables ordered by how many constraints mention them (desc), ties by model order."""
    g = interaction_graph(m)
    order = {v.name: i for i, v in enumerate(m.variables)}
    return sorted(order, key=lambda v: (-g.degree(("var", v)), order[v]))


def coupled_variables(m: LpModel, seed: str, limit: int) -> List[str]:
    """
    Up to `limit` variables reachable from `seed` through shared constraints,
    nearest first (breadth-first over the bipartite graph).
    """
    g = interaction_graph(m)
    order = {v.name: i for i, v in enumerate(m.variables)}
    distances = nx.single_source_shortest_path_length(g, ("var", seed))
    reachable = [node[1] for node in distances if node[0] == "var"]
    reachable.sort(key=lambda v: (distances[("var", v)], order[v]))
    return reachable[:limit]
