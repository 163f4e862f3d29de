"""Network sampling designs: Bernoulli-induced, SRS-induced, traceroute.

Every design is a frozen dataclass carrying its parameters and a seed;
``draw_sample(graph, design)`` is a pure function of that pair. Induced
designs observe exactly the edges with both endpoints in the sampled node
set; traceroute observes the union of edges on one random shortest path
per source-target pair.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .graph import Graph
from .rng import DEFAULT_SEED, make_rng
from .shortest_paths import path_dag, sample_path


@dataclass(frozen=True)
class BernoulliDesign:
    """Independent node retention with probability p, induced edges."""

    p: float
    seed: int = DEFAULT_SEED
    kind = "bernoulli"

    def validate(self, n: int):
        if not 0 < self.p <= 1:
            raise ValueError(f"p must be in (0, 1], got {self.p}")

    def params(self) -> dict:
        return {"p": self.p}


@dataclass(frozen=True)
class SrsDesign:
    """Uniform node subset of fixed size without replacement, induced edges."""

    n_star: int
    seed: int = DEFAULT_SEED
    kind = "srs"

    def validate(self, n: int):
        if not 1 <= self.n_star <= n:
            raise ValueError(f"n_star must be in [1, {n}], got {self.n_star}")

    def params(self) -> dict:
        return {"n_star": self.n_star}


@dataclass(frozen=True)
class TracerouteDesign:
    """Edges discovered along shortest paths between sampled sources and targets.

    Sources and targets are two independent SRS draws (overlap allowed);
    source = target pairs contribute nothing.
    """

    n_sources: int
    n_targets: int
    seed: int = DEFAULT_SEED
    kind = "traceroute"

    def validate(self, n: int):
        for name, value in (("n_sources", self.n_sources), ("n_targets", self.n_targets)):
            if not 1 <= value <= n:
                raise ValueError(f"{name} must be in [1, {n}], got {value}")

    def params(self) -> dict:
        return {"n_sources": self.n_sources, "n_targets": self.n_targets}


SampleDesign = Union[BernoulliDesign, SrsDesign, TracerouteDesign]

_DESIGN_TYPES = {"bernoulli": BernoulliDesign, "srs": SrsDesign, "traceroute": TracerouteDesign}


def design_to_dict(design: SampleDesign) -> dict:
    return {"kind": design.kind, "seed": design.seed, **design.params()}


def design_from_dict(d: dict) -> SampleDesign:
    d = dict(d)
    kind = d.pop("kind", None)
    try:
        cls = _DESIGN_TYPES[kind]
    except KeyError:
        raise ValueError(f"unknown design kind {kind!r}") from None
    try:
        return cls(**d)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind!r} design: {exc}") from None


def with_seed(design: SampleDesign, seed: int) -> SampleDesign:
    return replace(design, seed=int(seed))


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """Observed subgraph with provenance.

    ``edge_index`` holds parent edge ids so per-edge values and inclusion
    probabilities can be looked up on the parent graph's edge arrays.
    ``pi`` is filled by :meth:`with_inclusion` once a model is chosen.
    ``design`` is None for subgraphs built directly from a node set.
    """

    design: SampleDesign | None
    parent_node_count: int
    nodes: np.ndarray
    edge_index: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_w: np.ndarray
    pi: np.ndarray | None = None
    paths: tuple | None = None
    meta: dict | None = None

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edge_index)

    def with_inclusion(self, model) -> "SampledGraph":
        pi = model.pi[self.edge_index]
        return replace(self, pi=np.asarray(pi, dtype=np.float64))

    def to_json_dict(self) -> dict:
        pi = self.pi if self.pi is not None else [None] * self.edge_count
        out = {
            "design": design_to_dict(self.design) if self.design is not None else None,
            "seed": self.design.seed if self.design is not None else None,
            "parent_node_count": self.parent_node_count,
            "nodes": [int(v) for v in self.nodes],
            "edges": [
                {"i": int(i), "j": int(j), "w": float(w), "pi": (float(p) if p is not None else None)}
                for i, j, w, p in zip(self.edge_i, self.edge_j, self.edge_w, pi)
            ],
        }
        if self.paths is not None:
            out["paths"] = [list(map(int, p)) for p in self.paths]
        if self.meta:
            out["meta"] = self.meta
        return out


def bernoulli_node_sample(g: Graph, p: float, rng) -> np.ndarray:
    """Each node retained independently with probability p, in node order."""
    if not 0 < p <= 1:
        raise ValueError(f"p must be in (0, 1], got {p}")
    return np.nonzero(rng.random(g.node_count) < p)[0]


def srs_node_sample(g: Graph, n_star: int, rng) -> np.ndarray:
    """Uniform size-n_star node subset without replacement, sorted."""
    if not 1 <= n_star <= g.node_count:
        raise ValueError(f"n_star must be in [1, {g.node_count}], got {n_star}")
    return np.sort(rng.choice(g.node_count, size=n_star, replace=False))


def induced_edge_ids(g: Graph, nodes: np.ndarray) -> np.ndarray:
    """Parent ids of edges with both endpoints in ``nodes``."""
    mask = np.zeros(g.node_count, dtype=bool)
    mask[nodes] = True
    return np.nonzero(mask[g.edge_i] & mask[g.edge_j])[0]


def induced_subgraph(g: Graph, nodes, design: SampleDesign | None = None) -> SampledGraph:
    """Subgraph induced by a node set (inclusion probabilities unfilled)."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64).ravel())
    if len(nodes) and (nodes[0] < 0 or nodes[-1] >= g.node_count):
        raise ValueError(f"node id out of range [0, {g.node_count})")
    ids = induced_edge_ids(g, nodes)
    return SampledGraph(
        design=design,
        parent_node_count=g.node_count,
        nodes=nodes,
        edge_index=ids,
        edge_i=g.edge_i[ids],
        edge_j=g.edge_j[ids],
        edge_w=g.edge_w[ids],
    )


def random_shortest_path(g: Graph, s: int, t: int, rng) -> list[int] | None:
    """One path of minimal hop length, uniform over all shortest s-t paths.

    Returns None when t is unreachable from s.
    """
    if s == t:
        raise ValueError("source and target must differ")
    res = sample_path(path_dag(g, s), t, rng)
    return None if res is None else res[0]


def _traceroute_realize(g: Graph, n_sources: int, n_targets: int, rng, keep_paths: bool):
    """Shared traceroute mechanics: returns (edge ids, paths, skipped pairs)."""
    sources = srs_node_sample(g, n_sources, rng)
    targets = srs_node_sample(g, n_targets, rng)
    seen = np.zeros(g.edge_count, dtype=bool)
    paths = [] if keep_paths else None
    skipped = 0
    for s in sources:
        dag = path_dag(g, int(s))
        for t in targets:
            if s == t:
                continue
            res = sample_path(dag, int(t), rng)
            if res is None:
                skipped += 1
                continue
            nodes, eids = res
            seen[eids] = True
            if keep_paths:
                paths.append(tuple(nodes))
    return np.nonzero(seen)[0], (tuple(paths) if keep_paths else None), skipped


def traceroute_sample(g: Graph, n_sources: int, n_targets: int, rng,
                      design: SampleDesign | None = None, keep_paths: bool = True) -> SampledGraph:
    """Union of one random shortest path per source-target pair.

    Sampled nodes are exactly the endpoints of sampled edges; unreachable
    pairs are skipped and counted in ``meta``.
    """
    for name, value in (("n_sources", n_sources), ("n_targets", n_targets)):
        if not 1 <= value <= g.node_count:
            raise ValueError(f"{name} must be in [1, {g.node_count}], got {value}")
    ids, paths, skipped = _traceroute_realize(g, n_sources, n_targets, rng, keep_paths)
    nodes = np.unique(np.concatenate([g.edge_i[ids], g.edge_j[ids]])) if len(ids) else np.empty(0, dtype=np.int64)
    return SampledGraph(
        design=design,
        parent_node_count=g.node_count,
        nodes=nodes,
        edge_index=ids,
        edge_i=g.edge_i[ids],
        edge_j=g.edge_j[ids],
        edge_w=g.edge_w[ids],
        paths=paths,
        meta={"skipped_pairs": skipped,
              "pair_rule": "sources and targets drawn by independent SRS; s=t pairs skipped"},
    )


def realize_edge_ids(g: Graph, design: SampleDesign, rng) -> np.ndarray:
    """One design realization reduced to its sampled parent edge ids.

    Same mechanics (and rng consumption for induced designs) as
    :func:`draw_sample`; used by the Monte Carlo inclusion oracle where
    only edge membership matters.
    """
    design.validate(g.node_count)
    if isinstance(design, BernoulliDesign):
        return induced_edge_ids(g, bernoulli_node_sample(g, design.p, rng))
    if isinstance(design, SrsDesign):
        return induced_edge_ids(g, srs_node_sample(g, design.n_star, rng))
    ids, _, _ = _traceroute_realize(g, design.n_sources, design.n_targets, rng, keep_paths=False)
    return ids


def draw_sample(g: Graph, design: SampleDesign) -> SampledGraph:
    """Realize a design on a graph; deterministic in (graph, design, seed)."""
    design.validate(g.node_count)
    rng = make_rng(design.seed)
    if isinstance(design, BernoulliDesign):
        return induced_subgraph(g, bernoulli_node_sample(g, design.p, rng), design)
    if isinstance(design, SrsDesign):
        return induced_subgraph(g, srs_node_sample(g, design.n_star, rng), design)
    return traceroute_sample(g, design.n_sources, design.n_targets, rng, design)
