from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metacompose.registry import Registry, op
from metacompose.similarity import (SimilarityKind, SimilarityNetwork, WrongKindError, build_similarity_network,
                                    common_inputs, communities, excess_sim, full_sim, maximal_cliques, partial_sim,
                                    relation_sim)


@pytest.mark.parametrize("pred, a, b, expected", [
    (full_sim, ({"a"}, {"e"}), ({"a", "b"}, {"e"}), True),
    (full_sim, ({"a"}, {"e"}), ({"a"}, {"e"}), True),
    (full_sim, ({"a"}, {"e"}), ({"b"}, {"e"}), False),
    (partial_sim, ({"a"}, {"e", "f"}), ({"a"}, {"e"}), True),
    (partial_sim, ({"a"}, {"e"}), ({"a"}, {"e"}), False),
    (partial_sim, ({"a"}, {"e", "f"}), ({"b"}, {"e"}), False),
    (excess_sim, ({"a", "b"}, {"e"}), ({"a"}, {"e", "f"}), True),
    (excess_sim, ({"a"}, {"e"}), ({"a"}, {"e"}), False),
    (excess_sim, ({"a"}, {"e"}), ({"a", "b"}, {"e", "f"}), False),
    (relation_sim, ({"a"}, {"e"}), ({"b"}, {"e"}), True),
    (relation_sim, ({"a"}, {"e"}), ({"a"}, {"e"}), False),
    (relation_sim, ({"a"}, {"e"}), ({"b"}, {"f"}), False),
])
def test_predicates(pred, a, b, expected):
    assert pred(op("o1", *a), op("o2", *b)) is expected


@pytest.mark.parametrize("pred", [full_sim, partial_sim, excess_sim, relation_sim])
def test_same_id_rejected(pred):
    o = op("o", {"a"}, {"b"})
    with pytest.raises(ValueError):
        pred(o, o)


def test_four_communities_communities(four_communities):
    net = build_similarity_network(four_communities)
    assert [c.members for c in communities(net)] == [("o1", "o2", "o3", "o4"), ("o5", "o6"), ("o7",), ("o8",)]
    assert [c.id for c in communities(net)] == ["c1", "c2", "c3", "c4"]


def test_four_communities_largest_clique(four_communities):
    cliques = maximal_cliques(build_similarity_network(four_communities))
    assert cliques[0] == {"o2", "o3", "o4"}
    assert common_inputs(four_communities, cliques[0]) == {"b"}


def test_empty_and_single():
    assert build_similarity_network(Registry()).edges == ()
    net = build_similarity_network(Registry((op("o", {"a"}, {"b"}),)))
    assert net.nodes == ("o",) and net.edges == ()
    assert [c.members for c in communities(net)] == [("o",)]


def test_no_edges_gives_singletons():
    net = SimilarityNetwork(SimilarityKind.FULL, ("a", "b", "c"), ())
    assert [c.members for c in communities(net)] == [("a",), ("b",), ("c",)]


def test_complete_graph_single_community():
    nodes = ("a", "b", "c", "d")
    net = SimilarityNetwork(SimilarityKind.FULL, nodes, tuple(combinations(nodes, 2)))
    assert [c.members for c in communities(net)] == [nodes]
    assert maximal_cliques(net) == [frozenset(nodes)]


def test_triangle_and_path_cliques():
    tri = SimilarityNetwork(SimilarityKind.FULL, ("a", "b", "c"), (("a", "b"), ("a", "c"), ("b", "c")))
    assert maximal_cliques(tri) == [{"a", "b", "c"}]
    path = SimilarityNetwork(SimilarityKind.FULL, ("a", "b", "c"), (("a", "b"), ("b", "c")))
    assert maximal_cliques(path) == [{"a", "b"}, {"b", "c"}]


def test_wrong_kind(four_communities):
    with pytest.raises(WrongKindError):
        communities(build_similarity_network(four_communities, SimilarityKind.RELATION))
    with pytest.raises(WrongKindError):
        maximal_cliques(build_similarity_network(four_communities, SimilarityKind.PARTIAL))


def test_directed_edge_orientation():
    big = op("big", {"a"}, {"e", "f"})
    small = op("small", {"a"}, {"e"})
    net = build_similarity_network(Registry((big, small)), "partial")
    # small is partially similar to big
    assert net.edges == (("small", "big"),)


def test_network_round_trip(four_communities):
    for kind in SimilarityKind:
        net = build_similarity_network(four_communities, kind)
        assert SimilarityNetwork.from_dict(net.to_dict()) == net


# brute-force references

def _components(nodes, edges):
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x
    for u, v in edges:
        parent[find(u)] = find(v)
    groups = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    return {frozenset(g) for g in groups.values()}


def _maximal_cliques(nodes, edges):
    adj = {frozenset(e) for e in edges}
    cliques = [frozenset(s) for k in range(1, len(nodes) + 1) for s in combinations(nodes, k)
               if all(frozenset(p) in adj for p in combinations(s, 2))]
    return {c for c in cliques if not any(c < d for d in cliques)}


params = st.sampled_from("abcdef")
io_sets = st.frozensets(params, min_size=1, max_size=3)


@st.composite
def registries(draw, max_ops=8):
    n = draw(st.integers(0, max_ops))
    return Registry(tuple(op(f"o{i}", draw(io_sets), draw(io_sets)) for i in range(n)))


@settings(max_examples=150, deadline=None)
@given(registries())
def test_components_match_brute_force(reg):
    net = build_similarity_network(reg)
    comms = communities(net)
    assert {frozenset(c.members) for c in comms} == _components(net.nodes, net.edges)
    members = [m for c in comms for m in c.members]
    assert sorted(members) == sorted(reg.ids)


@settings(max_examples=150, deadline=None)
@given(registries())
def test_cliques_match_brute_force(reg):
    net = build_similarity_network(reg)
    cliques = maximal_cliques(net)
    assert set(cliques) == _maximal_cliques(net.nodes, net.edges)
    assert [len(c) for c in cliques] == sorted((len(c) for c in cliques), reverse=True)


@settings(max_examples=150, deadline=None)
@given(registries())
def test_community_invariants(reg):
    net = build_similarity_network(reg)
    comms = communities(net)
    for c in comms:
        assert len({reg[m].outputs for m in c.members}) == 1
    for clique in maximal_cliques(net):
        assert sum(clique <= set(c.members) for c in comms) == 1
        for a, b in combinations(clique, 2):
            assert reg[a].inputs & reg[b].inputs


@settings(max_examples=100, deadline=None)
@given(registries(max_ops=6), st.sampled_from(list(SimilarityKind)))
def test_edges_are_exactly_the_predicate(reg, kind):
    net = build_similarity_network(reg, kind)
    pred = {SimilarityKind.FULL: full_sim, SimilarityKind.PARTIAL: partial_sim,
            SimilarityKind.EXCESS: excess_sim, SimilarityKind.RELATION: relation_sim}[kind]
    expected = set()
    for a in reg:
        for b in reg:
            if a.id != b.id and pred(a, b):
                expected.add((b.id, a.id) if kind.directed else tuple(sorted((a.id, b.id))))
    assert set(net.edges) == expected
    assert all(u != v for u, v in net.edges)


@settings(max_examples=500, deadline=None)
@given(io_sets, io_sets, io_sets, io_sets)
def test_predicate_algebra(i1, o1, i2, o2):
    a, b = op("a", i1, o1), op("b", i2, o2)
    assert full_sim(a, b) == full_sim(b, a)
    assert relation_sim(a, b) == relation_sim(b, a)
    assert not (full_sim(a, b) and relation_sim(a, b))
    assert not (partial_sim(a, b) and partial_sim(b, a))
    assert not (excess_sim(a, b) and excess_sim(b, a))
