"""Hand-checked centrality values and community behavior on small graphs."""

import pytest

from dpg.errors import GraphFormatError
from dpg.metrics import (
    betweenness_centrality,
    community_classes,
    detect_communities,
    local_reaching_centrality,
)
from helpers import make_graph


def test_bc_on_directed_path():
    # 0 -> 1 -> 2 -> 3: node 1 lies on (0,2) and (0,3); node 2 on (0,3), (1,3)
    g = make_graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    r = betweenness_centrality(g)
    assert r.scores[0] == 0.0
    assert r.scores[1] == pytest.approx(2 / 6)
    assert r.scores[2] == pytest.approx(2 / 6)
    assert r.scores[3] == 0.0


def test_bc_splits_between_parallel_routes():
    # two equal-hop routes 0->1->3 and 0->2->3 share the pair (0,3)
    g = make_graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])
    r = betweenness_centrality(g)
    assert r.scores[1] == pytest.approx(0.5 / 6)
    assert r.scores[2] == pytest.approx(0.5 / 6)


def test_bc_weighted_mode_uses_weights_as_distance():
    # by weight the route through node 1 (cost 2) beats node 2 (cost 10)
    g = make_graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 9)])
    r = betweenness_centrality(g, weighted=True)
    assert r.scores[1] == pytest.approx(1 / 6)
    assert r.scores[2] == 0.0


def test_bc_tiny_graphs_are_all_zero():
    g = make_graph(2, [(0, 1, 3)])
    assert set(betweenness_centrality(g).scores.values()) == {0.0}


def test_ranking_breaks_score_ties_by_id():
    g = make_graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])
    r = betweenness_centrality(g)
    assert r.ranking[0] == 1
    assert r.ranking[1] == 2
    assert r.top(2) == [(1, r.scores[1]), (2, r.scores[2])]


def test_lrc_weighted_hand_values():
    # from 0: nodes 1 (tw 2, 1 hop) and 2 (tw 1 via the direct 1-hop edge)
    g = make_graph(3, [(0, 1, 2), (1, 2, 4), (0, 2, 1)])
    r = local_reaching_centrality(g)
    assert r.scores[0] == pytest.approx((2 / 1 + 1 / 1) / 2)
    assert r.scores[1] == pytest.approx((4 / 1) / 2)
    assert r.scores[2] == 0.0


def test_lrc_equal_hop_tie_prefers_heavier_path():
    # node 2 sits two hops from 0 via either (2+4)=6 or (5+3)=8; 8 wins
    g = make_graph(4, [(0, 1, 2), (0, 3, 5), (1, 2, 4), (3, 2, 3)])
    r = local_reaching_centrality(g)
    assert r.scores[0] == pytest.approx((2 + 5 + 8 / 2) / 3)


def test_lrc_weighted_scaling_uses_trace_total():
    from dpg.graph import DPG

    base = make_graph(3, [(0, 1, 2), (1, 2, 4), (0, 2, 1)])
    g = DPG(nodes=base.nodes, edges=base.edges, provenance=base.provenance,
            source_counts=(6, 0, 0))
    # scale = n / total = 3/6, applied to every edge weight
    r = local_reaching_centrality(g)
    assert r.scores[1] == pytest.approx((4 * 0.5) / 2)


def test_lrc_unweighted_is_reachable_fraction():
    g = make_graph(4, [(0, 1, 7), (1, 2, 7)])
    r = local_reaching_centrality(g, weighted=False)
    assert r.scores[0] == pytest.approx(2 / 3)
    assert r.scores[1] == pytest.approx(1 / 3)
    assert r.scores[2] == 0.0
    assert r.scores[3] == 0.0


def test_communities_split_disjoint_cycles():
    g = make_graph(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1)])
    r = detect_communities(g, seed=5)
    assert r.communities == (frozenset({0, 1}), frozenset({2, 3}))


def test_communities_anchor_on_class_sinks():
    g = make_graph(6, [(0, 1, 5), (1, 4, 5), (2, 3, 5), (3, 5, 5)], n_classes=2)
    r = detect_communities(g, seed=0)
    assert r.communities == (frozenset({0, 1, 4}), frozenset({2, 3, 5}))
    assert r.class_labels == (("0",), ("1",))


def test_communities_deterministic_per_seed():
    g = make_graph(6, [(0, 1, 2), (1, 2, 3), (2, 0, 1), (3, 4, 2), (4, 5, 9),
                       (5, 3, 1), (0, 3, 1)])
    a = detect_communities(g, seed=9)
    b = detect_communities(g, seed=9)
    assert a == b
    assert a.iterations >= 1


def test_community_class_table():
    g = make_graph(6, [(0, 1, 5), (1, 4, 5), (2, 3, 5), (3, 5, 5)], n_classes=2)
    r = detect_communities(g, seed=0)
    rows = community_classes(r, g)
    assert rows == [
        {"community": 1, "n_predicates": 2, "n_features": 2, "classes": ["0"]},
        {"community": 2, "n_predicates": 2, "n_features": 2, "classes": ["1"]},
    ]


def test_community_class_table_rejects_foreign_partition():
    g = make_graph(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1)])
    other = make_graph(6, [(0, 1, 5), (1, 4, 5), (2, 3, 5), (3, 5, 5)], n_classes=2)
    r = detect_communities(other, seed=0)
    with pytest.raises(GraphFormatError):
        community_classes(r, g)


def test_empty_graph_rejected():
    from dpg.graph import DPG

    with pytest.raises(GraphFormatError):
        betweenness_centrality(DPG(nodes=(), edges=()))
