"""Horvitz-Thompson estimation of edge-total homophily statistics.

The point estimator weights each observed per-edge value by its reciprocal
inclusion probability, which is design-unbiased for the population total
whenever every edge has positive inclusion probability. Its variance is
estimable from the sample when pairwise joint inclusion probabilities
exist (induced designs); under traceroute they do not, and variance is
reported as unsupported rather than approximated.

Normalized metrics are estimated either as a ratio of two HT totals
("hajek_ratio", the default: consistent, not exactly unbiased) or by
dividing one HT total by the parent graph's known normalizer
("known_denominator": exactly unbiased, requires the parent). Node
homophily is a mean of per-node ratios, not an edge total, and is only
offered as a plug-in on the sampled subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphSignal, total_edge_weight
from .inclusion import InclusionModel, JointUnavailableError
from .metrics import (
    DIRICHLET_NORMALIZED,
    DIRICHLET_TOTAL,
    EDGE_HOMOPHILY,
    METRIC_KINDS,
    NODE_HOMOPHILY,
)
from .sampling import SampledGraph, design_to_dict

# estimators refuse inclusion probabilities below this unless overridden
PI_FLOOR = 1e-12

HT_TOTAL = "ht_total"
PLUG_IN = "plug_in"
HAJEK_RATIO = "hajek_ratio"
KNOWN_DENOMINATOR = "known_denominator"

MODES_FOR_KIND = {
    DIRICHLET_TOTAL: (HT_TOTAL, PLUG_IN),
    DIRICHLET_NORMALIZED: (HAJEK_RATIO, KNOWN_DENOMINATOR, PLUG_IN),
    EDGE_HOMOPHILY: (HAJEK_RATIO, KNOWN_DENOMINATOR, PLUG_IN),
    NODE_HOMOPHILY: (PLUG_IN,),
}

VARIANCE_EXACT = "exact_design"
VARIANCE_UNSUPPORTED = "unsupported"
VARIANCE_CLAMPED = "negative_clamped"


class DegenerateSampleError(ValueError):
    """The realization cannot support the requested estimator (e.g. zero denominator)."""


@dataclass(frozen=True)
class EstimateReport:
    """Point estimate with variance status and sample provenance."""

    kind: str
    mode: str
    point: float
    variance: float | None
    variance_status: str
    sampled_nodes: int
    sampled_edges: int
    design: dict | None
    seed: int | None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "mode": self.mode,
            "point": self.point,
            "variance": self.variance,
            "variance_status": self.variance_status,
            "sampled_nodes": self.sampled_nodes,
            "sampled_edges": self.sampled_edges,
            "design": self.design,
            "seed": self.seed,
        }


def _sampled_values(sample: SampledGraph, values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (sample.edge_count,):
        raise ValueError(f"expected one value per sampled edge ({sample.edge_count}), "
                         f"got shape {values.shape}")
    return values


def ht_total(sample: SampledGraph, values, incl: InclusionModel,
             pi_floor: float = PI_FLOOR) -> float:
    """Sum of observed values weighted by reciprocal inclusion probabilities."""
    values = _sampled_values(sample, values)
    if sample.edge_count == 0:
        return 0.0
    pi = incl.require_positive(sample.edge_index, pi_floor)
    return float((values / pi).sum())


def plug_in_total(sample: SampledGraph, values) -> float:
    """Unweighted total over the sampled edges (biased by pi under any design)."""
    return float(_sampled_values(sample, values).sum())


def ht_variance(sample: SampledGraph, values, incl: InclusionModel,
                pi_floor: float = PI_FLOOR, clamp_negative: bool = True) -> tuple[float | None, str]:
    """Design variance estimate of the HT total, from the sample alone.

    Returns ``(value, status)``: the double sum over sampled edge pairs of
    ``V_e V_f (1/(pi_e pi_f) - 1/pi_ef)``, with ``pi_ee = pi_e``. Negative
    numerical results clamp to 0 with status "negative_clamped" (the raw
    estimator is the design-unbiased one; pass ``clamp_negative=False`` to
    get it). Designs without joint probabilities yield
    ``(None, "unsupported")``.
    """
    values = _sampled_values(sample, values)
    if sample.edge_count == 0:
        if not incl.has_joint:
            return None, VARIANCE_UNSUPPORTED
        return 0.0, VARIANCE_EXACT
    try:
        joint = incl.joint_matrix(sample.edge_index)
    except JointUnavailableError:
        return None, VARIANCE_UNSUPPORTED
    if np.any(joint <= 0):
        a, b = np.argwhere(joint <= 0)[0]
        raise ValueError(
            f"observed edge pair (ids {sample.edge_index[a]}, {sample.edge_index[b]}) "
            "has joint inclusion probability 0; the inclusion model contradicts "
            "this realization")
    pi = incl.require_positive(sample.edge_index, pi_floor)
    weighted = values / pi
    est = float(np.outer(weighted, weighted).sum() - (np.outer(values, values) / joint).sum())
    if est < 0 and clamp_negative:
        return 0.0, VARIANCE_CLAMPED
    return est, VARIANCE_EXACT


def hajek_ratio(sample: SampledGraph, numerator_values, denominator_values,
                incl: InclusionModel, pi_floor: float = PI_FLOOR) -> float:
    """Ratio of two HT totals; under uniform pi this is the plain sample ratio."""
    den = ht_total(sample, denominator_values, incl, pi_floor)
    if den == 0.0:
        raise DegenerateSampleError("zero HT denominator (empty or degenerate sample)")
    return ht_total(sample, numerator_values, incl, pi_floor) / den


def _variation_values(sample: SampledGraph, signal: GraphSignal) -> np.ndarray:
    d = signal.rows[sample.edge_i] - signal.rows[sample.edge_j]
    return sample.edge_w * np.einsum("ef,ef->e", d, d)


def _same_label_values(sample: SampledGraph, signal: GraphSignal) -> np.ndarray:
    if signal.labels is None:
        raise ValueError("metric requires labels")
    return sample.edge_w * (signal.labels[sample.edge_i] == signal.labels[sample.edge_j])


def _plug_in_node_homophily(sample: SampledGraph, signal: GraphSignal) -> float:
    if signal.labels is None:
        raise ValueError("metric requires labels")
    if sample.edge_count == 0:
        raise DegenerateSampleError("no sampled edges; node homophily undefined")
    n = sample.parent_node_count
    match = (signal.labels[sample.edge_i] == signal.labels[sample.edge_j]).astype(np.float64)
    deg = np.bincount(sample.edge_i, minlength=n) + np.bincount(sample.edge_j, minlength=n)
    same = (np.bincount(sample.edge_i, weights=match, minlength=n)
            + np.bincount(sample.edge_j, weights=match, minlength=n))
    active = deg > 0
    return float(np.mean(same[active] / deg[active]))


def estimate_metric(sample: SampledGraph, signal: GraphSignal, kind: str, mode: str,
                    incl: InclusionModel | None = None, parent: Graph | None = None,
                    pi_floor: float = PI_FLOOR) -> EstimateReport:
    """Estimate one homophily metric from a sampled graph.

    ``incl`` is required for HT-weighted modes; ``parent`` only for
    "known_denominator", where the parent graph's total edge weight is
    treated as known. Degenerate realizations (empty sample under a ratio
    mode) raise DegenerateSampleError so callers can flag the replication.
    """
    if kind not in METRIC_KINDS:
        raise ValueError(f"unknown metric kind {kind!r}")
    if mode not in MODES_FOR_KIND[kind]:
        raise ValueError(f"mode {mode!r} not supported for {kind!r} "
                         f"(supported: {', '.join(MODES_FOR_KIND[kind])})")
    if mode in (HT_TOTAL, HAJEK_RATIO, KNOWN_DENOMINATOR) and incl is None:
        raise ValueError(f"mode {mode!r} requires an inclusion model")

    variance = None
    variance_status = VARIANCE_UNSUPPORTED

    if kind == NODE_HOMOPHILY:
        point = _plug_in_node_homophily(sample, signal)
    elif kind == DIRICHLET_TOTAL:
        values = _variation_values(sample, signal)
        if mode == PLUG_IN:
            point = plug_in_total(sample, values)
        else:
            point = ht_total(sample, values, incl, pi_floor)
            variance, variance_status = ht_variance(sample, values, incl, pi_floor)
    else:
        if kind == DIRICHLET_NORMALIZED:
            numerator = _variation_values(sample, signal)
            den_scale = 2.0
        else:
            numerator = _same_label_values(sample, signal)
            den_scale = 1.0
        if mode == PLUG_IN:
            den = float((den_scale * sample.edge_w).sum())
            if den == 0.0:
                raise DegenerateSampleError("empty sample; plug-in ratio undefined")
            point = plug_in_total(sample, numerator) / den
        elif mode == HAJEK_RATIO:
            point = hajek_ratio(sample, numerator, den_scale * sample.edge_w, incl, pi_floor)
        else:  # known_denominator
            if parent is None:
                raise ValueError("known_denominator mode requires the parent graph")
            den = den_scale * total_edge_weight(parent)
            if den <= 0:
                raise ValueError("parent graph has no edge weight")
            point = ht_total(sample, numerator, incl, pi_floor) / den
            var, variance_status = ht_variance(sample, numerator, incl, pi_floor)
            variance = var / den ** 2 if var is not None else None

    if not np.isfinite(point):
        raise DegenerateSampleError(f"non-finite estimate for {kind}/{mode}")
    return EstimateReport(
        kind=kind,
        mode=mode,
        point=float(point),
        variance=variance,
        variance_status=variance_status,
        sampled_nodes=sample.node_count,
        sampled_edges=sample.edge_count,
        design=design_to_dict(sample.design) if sample.design is not None else None,
        seed=sample.design.seed if sample.design is not None else None,
    )
