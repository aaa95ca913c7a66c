"""k-core decomposition over total degree across all edge kinds."""

from __future__ import annotations

from collections import deque

from ..errors import ParameterError
from .model import EdgeKind, HeteroGraph


def k_core(g: HeteroGraph, k: int) -> HeteroGraph:
    """Maximal induced subgraph where every node's total degree is >= k.

    Peels nodes whose degree (summed over all edge kinds) falls below k
    until a fixed point. The k-core is unique, so the result does not
    depend on peeling order. May return an empty graph.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    degrees = g.total_degrees().copy()
    removed = [False] * g.node_count
    queue = deque(i for i in range(g.node_count) if degrees[i] < k)
    for i in queue:
        removed[i] = True
    while queue:
        u = queue.popleft()
        for kind in EdgeKind:
            for v in g.neighbors(u, kind):
                if removed[v]:
                    continue
                degrees[v] -= 1
                if degrees[v] < k:
                    removed[v] = True
                    queue.append(v)
    survivors = [i for i in range(g.node_count) if not removed[i]]
    return g.induced_subgraph(survivors)
