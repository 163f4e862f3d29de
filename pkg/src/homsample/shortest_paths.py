"""Hop-count shortest-path machinery shared by traceroute sampling and
edge betweenness: single-source BFS DAGs with path counts, and uniform
random draws from the set of shortest paths.

Path counts are kept as floats; only their ratios are ever used. DAGs are
rng-free, so they are cached on the graph (bounded) and reused across
replications without affecting reproducibility.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph import Graph

# per-graph cache bound; beyond it DAGs are recomputed on demand
_CACHE_LIMIT = 8192


class PathDag:
    """BFS shortest-path DAG from one source.

    ``preds[v]`` lists the predecessors of ``v`` on shortest paths,
    ``pred_eids[v]`` the matching edge ids, and ``pred_cum[v]`` the
    cumulative path counts used for proportional backtracking.
    """

    __slots__ = ("source", "dist", "sigma", "order", "preds", "pred_eids", "pred_cum")

    def __init__(self, source, dist, sigma, order, preds, pred_eids, pred_cum):
        self.source = source
        self.dist = dist
        self.sigma = sigma
        self.order = order
        self.preds = preds
        self.pred_eids = pred_eids
        self.pred_cum = pred_cum


def path_dag(g: Graph, source: int) -> PathDag:
    """Shortest-path DAG from ``source``, cached on the graph."""
    cached = g._sp_cache.get(source)
    if cached is not None:
        return cached
    n = g.node_count
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n)
    preds = [() for _ in range(n)]
    pred_eids = [() for _ in range(n)]
    dist[source] = 0
    sigma[source] = 1.0
    order = [source]
    queue = deque([source])
    indptr, nbr, nbr_eid = g._indptr, g._nbr, g._nbr_eid
    while queue:
        v = queue.popleft()
        dv = dist[v]
        sv = sigma[v]
        for k in range(indptr[v], indptr[v + 1]):
            w = nbr[k]
            if dist[w] < 0:
                dist[w] = dv + 1
                queue.append(w)
                order.append(w)
            if dist[w] == dv + 1:
                sigma[w] += sv
                preds[w] = preds[w] + (v,)
                pred_eids[w] = pred_eids[w] + (int(nbr_eid[k]),)
    pred_cum = [np.cumsum(sigma[list(p)]) if len(p) > 1 else None for p in preds]
    dag = PathDag(source, dist, sigma, np.array(order, dtype=np.int64), preds, pred_eids, pred_cum)
    if len(g._sp_cache) < _CACHE_LIMIT:
        g._sp_cache[source] = dag
    return dag


def sample_path(dag: PathDag, t: int, rng) -> tuple[list[int], list[int]] | None:
    """Uniform draw from all shortest source-t paths.

    Returns ``(nodes, edge_ids)`` with nodes ordered source -> t, or None
    when t is unreachable. Backtracking picks each predecessor with
    probability proportional to its path count, which makes every complete
    shortest path equally likely.
    """
    t = int(t)
    if dag.dist[t] < 0:
        return None
    nodes = [t]
    eids = []
    v = t
    preds, pred_eids, pred_cum = dag.preds, dag.pred_eids, dag.pred_cum
    while v != dag.source:
        p = preds[v]
        if len(p) == 1:
            k = 0
        else:
            cum = pred_cum[v]
            k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            if k == len(p):  # guard against r landing exactly on the total
                k = len(p) - 1
        eids.append(pred_eids[v][k])
        v = int(p[k])
        nodes.append(v)
    nodes.reverse()
    eids.reverse()
    return nodes, eids
