import numpy as np
import pytest

from homsample import (
    BernoulliDesign,
    DegenerateSampleError,
    Graph,
    GraphSignal,
    SrsDesign,
    TracerouteDesign,
    draw_sample,
    edge_variation_values,
    estimate_metric,
    hajek_ratio,
    ht_total,
    ht_variance,
    inclusion_for,
    induced_subgraph,
    plug_in_total,
)
from homsample.estimators import (
    HAJEK_RATIO,
    HT_TOTAL,
    KNOWN_DENOMINATOR,
    PLUG_IN,
    VARIANCE_CLAMPED,
    VARIANCE_EXACT,
    VARIANCE_UNSUPPORTED,
)
from homsample.metrics import dirichlet_energy, node_homophily
from oracles import random_graph, random_onehot_signal, srs_expectation, srs_subsets


def _srs_enumeration(g, s, n_star, clamp=True):
    """Per-subset (ht, var_est) pairs plus the exact design variance."""
    design = SrsDesign(n_star=n_star)
    incl = inclusion_for(g, design)
    values = edge_variation_values(g, s)
    hts, var_ests = [], []
    for subset in srs_subsets(g.node_count, n_star):
        sample = induced_subgraph(g, subset, design)
        vals = values[sample.edge_index]
        hts.append(ht_total(sample, vals, incl))
        v, _ = ht_variance(sample, vals, incl, clamp_negative=clamp)
        var_ests.append(v)
    hts = np.array(hts)
    true_var = float(np.mean(hts ** 2) - np.mean(hts) ** 2)
    return hts, np.array(var_ests), true_var


def test_census_is_exact(karate):
    g, s = karate
    design = SrsDesign(n_star=g.node_count, seed=4)
    incl = inclusion_for(g, design)
    sample = draw_sample(g, design)
    values = edge_variation_values(g, s)[sample.edge_index]
    assert ht_total(sample, values, incl) == dirichlet_energy(g, s)
    assert plug_in_total(sample, values) == dirichlet_energy(g, s)
    var, status = ht_variance(sample, values, incl)
    assert var == pytest.approx(0.0, abs=1e-9) and status in (VARIANCE_EXACT, VARIANCE_CLAMPED)


def test_k3_srs_worked_example(triangle):
    # subsets of size 2 yield HT values {0, 6, 6}: mean 4 = TV
    g, s = triangle
    design = SrsDesign(n_star=2)
    incl = inclusion_for(g, design)
    values = edge_variation_values(g, s)
    sample = induced_subgraph(g, [0, 2], design)
    assert ht_total(sample, values[sample.edge_index], incl) == pytest.approx(6.0)
    hts = [ht_total(sm, values[sm.edge_index], incl)
           for sm in (induced_subgraph(g, sub, design) for sub in srs_subsets(3, 2))]
    assert sorted(hts) == [0.0, 6.0, 6.0]
    assert np.mean(hts) == pytest.approx(4.0)


def test_k3_plug_in_expectation_matches_pi_scaling(triangle):
    g, s = triangle
    values = edge_variation_values(g, s)
    expect = srs_expectation(3, 2, lambda sub: plug_in_total(
        induced_subgraph(g, sub), values[induced_subgraph(g, sub).edge_index]))
    assert expect == pytest.approx(4.0 / 3.0)   # TV * pi with pi = 1/3
    assert plug_in_total(induced_subgraph(g, []), np.array([])) == 0.0


def test_star_variance_enumeration(star):
    g, s = star
    hts, var_ests, true_var = _srs_enumeration(g, s, 3)
    assert sorted(hts.tolist()) == [0.0, 4.0, 4.0, 8.0]
    assert sorted(var_ests.tolist()) == [0.0, 8.0, 8.0, 16.0]
    assert true_var == pytest.approx(8.0, abs=1e-12)
    assert np.mean(var_ests) == pytest.approx(true_var, abs=1e-12)


def test_bernoulli_identity_ht_is_scaled_plug_in(karate):
    g, s = karate
    values = edge_variation_values(g, s)
    for p in (0.2, 0.5, 0.9):
        design = BernoulliDesign(p=p, seed=31)
        incl = inclusion_for(g, design)
        sample = draw_sample(g, design)
        vals = values[sample.edge_index]
        assert ht_total(sample, vals, incl) == pytest.approx(
            plug_in_total(sample, vals) / p ** 2, rel=1e-12)


def test_bernoulli_disjoint_pair_cross_term_is_zero():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    s = GraphSignal.from_labels([0, 1, 0, 1], 2)
    design = BernoulliDesign(p=0.6)
    incl = inclusion_for(g, design)
    sample = induced_subgraph(g, [0, 1, 2, 3], design)
    values = edge_variation_values(g, s)
    var, status = ht_variance(sample, values, incl)
    # independence: cross terms vanish, only diagonal terms remain
    expected = sum(v * v * (1 / 0.6 ** 4 - 1 / 0.6 ** 2) for v in values)
    assert var == pytest.approx(expected, rel=1e-12)
    assert status == VARIANCE_EXACT


def test_hajek_reductions(triangle):
    g, s = triangle
    design = SrsDesign(n_star=2)
    incl = inclusion_for(g, design)
    values = edge_variation_values(g, s)
    sample = induced_subgraph(g, [0, 1], design)   # single same-label edge
    ones = np.ones(sample.edge_count)
    assert hajek_ratio(sample, ones, ones, incl) == 1.0
    # uniform pi: ratio equals the unweighted sample ratio
    vals = values[sample.edge_index]
    assert hajek_ratio(sample, vals, 2 * sample.edge_w, incl) == pytest.approx(
        vals.sum() / (2 * sample.edge_w.sum()))
    with pytest.raises(DegenerateSampleError, match="denominator"):
        empty = induced_subgraph(g, [], design)
        hajek_ratio(empty, np.array([]), np.array([]), incl)


def test_exhaustive_unbiasedness_random_graphs():
    rng = np.random.default_rng(47)
    for _ in range(12):
        n = int(rng.integers(3, 8))
        g = random_graph(rng, n, 0.55)
        if g.edge_count == 0:
            continue
        s = random_onehot_signal(rng, n, 2)
        tv = dirichlet_energy(g, s)
        for n_star in range(2, n + 1):
            # unclamped: the raw double-sum estimator is the unbiased one
            hts, var_ests, true_var = _srs_enumeration(g, s, n_star, clamp=False)
            assert np.mean(hts) == pytest.approx(tv, abs=1e-10)
            min_m = 4 if _has_disjoint_pair(g) else 3
            if g.edge_count == 1:
                min_m = 2
            if n_star >= min_m:
                assert np.mean(var_ests) == pytest.approx(true_var, abs=1e-10)


def _has_disjoint_pair(g):
    for e in range(g.edge_count):
        for f in range(e + 1, g.edge_count):
            if len({int(g.edge_i[e]), int(g.edge_j[e]),
                    int(g.edge_i[f]), int(g.edge_j[f])}) == 4:
                return True
    return False


def test_variance_negative_clamp_flagged():
    # Perfect matching under SRS: realized samples holding two disjoint
    # cross-label edges have dominant negative cross terms, so the raw
    # estimate goes negative and gets clamped with an explicit status.
    g = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
    s = GraphSignal.from_labels([0, 1, 0, 1, 0, 1], 2)
    design = SrsDesign(n_star=4)
    incl = inclusion_for(g, design)
    values = edge_variation_values(g, s)
    sample = induced_subgraph(g, [0, 1, 2, 3], design)   # two disjoint edges
    raw, _ = ht_variance(sample, values[sample.edge_index], incl, clamp_negative=False)
    assert raw < 0
    clamped, status = ht_variance(sample, values[sample.edge_index], incl)
    assert clamped == 0.0 and status == VARIANCE_CLAMPED
    # clamping is reporting policy; the raw estimator stays design-unbiased
    _, var_ests, true_var = _srs_enumeration(g, s, 4, clamp=False)
    assert np.mean(var_ests) == pytest.approx(true_var, abs=1e-10)


def test_variance_unsupported_for_traceroute(karate):
    g, s = karate
    design = TracerouteDesign(3, 3, seed=8)
    incl = inclusion_for(g, design)
    sample = draw_sample(g, design)
    values = edge_variation_values(g, s)[sample.edge_index]
    var, status = ht_variance(sample, values, incl)
    assert var is None and status == VARIANCE_UNSUPPORTED
    report = estimate_metric(sample, s, "dirichlet_total", HT_TOTAL, incl=incl)
    assert report.variance is None and report.variance_status == VARIANCE_UNSUPPORTED
    assert report.point > 0


def test_ht_rejects_missing_pi(karate):
    g, s = karate
    design = SrsDesign(n_star=10, seed=2)
    sample = draw_sample(g, design)
    incl = inclusion_for(g, design)
    values = edge_variation_values(g, s)[sample.edge_index]
    bad = type(incl)(source=incl.source, pi=np.zeros(g.edge_count),
                     edge_i=incl.edge_i, edge_j=incl.edge_j,
                     node_count=incl.node_count)
    with pytest.raises(ValueError, match="below the floor"):
        ht_total(sample, values, bad)


def test_estimate_metric_modes_and_validation(karate):
    g, s = karate
    design = SrsDesign(n_star=12, seed=6)
    incl = inclusion_for(g, design)
    sample = draw_sample(g, design)

    r = estimate_metric(sample, s, "dirichlet_normalized", KNOWN_DENOMINATOR,
                        incl=incl, parent=g)
    assert 0 <= r.point and r.variance is not None and r.variance_status == VARIANCE_EXACT
    r2 = estimate_metric(sample, s, "dirichlet_normalized", HAJEK_RATIO, incl=incl)
    assert r2.variance_status == VARIANCE_UNSUPPORTED
    r3 = estimate_metric(sample, s, "edge_homophily", PLUG_IN)
    assert 0 <= r3.point <= 1
    r4 = estimate_metric(sample, s, "node_homophily", PLUG_IN)
    assert 0 <= r4.point <= 1

    with pytest.raises(ValueError, match="not supported"):
        estimate_metric(sample, s, "node_homophily", HAJEK_RATIO, incl=incl)
    with pytest.raises(ValueError, match="inclusion model"):
        estimate_metric(sample, s, "dirichlet_total", HT_TOTAL)
    with pytest.raises(ValueError, match="parent graph"):
        estimate_metric(sample, s, "edge_homophily", KNOWN_DENOMINATOR, incl=incl)
    with pytest.raises(ValueError, match="unknown metric"):
        estimate_metric(sample, s, "assortativity", PLUG_IN)


def test_estimate_metric_census_recovers_exact(karate):
    g, s = karate
    design = SrsDesign(n_star=34, seed=1)
    incl = inclusion_for(g, design)
    sample = draw_sample(g, design)
    from homsample.metrics import edge_homophily, normalized_dirichlet

    pairs = [("dirichlet_normalized", HAJEK_RATIO, normalized_dirichlet(g, s)),
             ("edge_homophily", HAJEK_RATIO, edge_homophily(g, s)),
             ("node_homophily", PLUG_IN, node_homophily(g, s)),
             ("dirichlet_total", HT_TOTAL, dirichlet_energy(g, s))]
    for kind, mode, exact in pairs:
        r = estimate_metric(sample, s, kind, mode, incl=incl, parent=g)
        assert r.point == pytest.approx(exact, rel=1e-12)


def test_node_homophily_plug_in_on_triangle(triangle):
    g, s = triangle
    sample = induced_subgraph(g, [0, 1, 2])
    r = estimate_metric(sample, s, "node_homophily", PLUG_IN)
    assert r.point == pytest.approx(node_homophily(g, s))
    with pytest.raises(DegenerateSampleError):
        estimate_metric(induced_subgraph(g, [0]), s, "node_homophily", PLUG_IN)


def test_report_provenance(karate):
    g, s = karate
    design = BernoulliDesign(p=0.4, seed=55)
    incl = inclusion_for(g, design)
    sample = draw_sample(g, design)
    r = estimate_metric(sample, s, "dirichlet_total", HT_TOTAL, incl=incl)
    d = r.to_json_dict()
    assert d["design"]["kind"] == "bernoulli" and d["seed"] == 55
    assert d["sampled_nodes"] == sample.node_count
    assert d["sampled_edges"] == sample.edge_count
