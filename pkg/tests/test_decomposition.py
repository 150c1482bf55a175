import random

import pytest

from cqcount import decomposition as dec
from cqcount import homs
from cqcount.model import Query, gaifman_adjacency, graph

from helpers import random_graph, random_query


def path(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def clique(n):
    return graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n):
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def tw(g):
    width, _ = dec.exact_treewidth(g)
    return width


def test_exact_treewidth_values():
    assert tw(graph(0, [])) == -1
    assert tw(graph(3, [])) == 0
    assert tw(path(5)) == 1
    assert tw(cycle(4)) == 2
    assert tw(clique(4)) == 3
    assert tw(clique(6)) == 5


def test_treewidth_limit_raises():
    with pytest.raises(dec.TreewidthLimitError):
        dec.exact_treewidth(clique(8), limit=3)


def test_decompositions_validate_and_are_nice():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 7))
        width, td = dec.exact_treewidth(g)
        assert dec.validate_decomposition(td, g)
        assert td.width == width
        assert td.root["bag"] == ()


def test_heuristic_decomposition_is_still_valid():
    rng = random.Random(5)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 8))
        adj = {v: set(ns) for v, ns in gaifman_adjacency(g).items()}
        width, td = dec.decompose_graph((adj, list(g.vertices())), exact=False)
        assert dec.validate_decomposition(td, g)
        assert width >= tw(g)


def test_dp_hom_count_matches_brute_force():
    rng = random.Random(7)
    for _ in range(80):
        s = random_graph(rng, rng.randint(1, 5))
        t = random_graph(rng, rng.randint(0, 5))
        _, td = dec.exact_treewidth(s)
        q = Query(s, tuple(range(s.n)))
        assert dec.count_homs_dp(s, t, td) == homs.count_answers(q, t)


def test_dp_answer_count_matches_brute_force():
    rng = random.Random(11)
    for _ in range(80):
        n = rng.randint(1, 5)
        s = random_graph(rng, n)
        q = Query(s, tuple(range(n)))
        t = random_graph(rng, rng.randint(0, 5))
        _, td = dec.exact_treewidth(s)
        assert dec.count_answers_dp(q, t, td) == homs.count_answers(q, t)


def test_dp_answer_count_rejects_quantified_or_constrained_queries():
    s = path(3)
    _, td = dec.exact_treewidth(s)
    with pytest.raises(ValueError):
        dec.count_answers_dp(Query(s, (0, 2)), path(3), td)
    q = Query(s, (0, 1, 2), inequalities=[frozenset((0, 2))])
    with pytest.raises(ValueError):
        dec.count_answers_dp(q, path(3), td)


def test_quantified_components_and_boundaries():
    # two free endpoints joined through one quantified center
    q = Query(path(3), (0, 2))
    comps = dec.quantified_components(q)
    assert comps == [[1]]
    assert dec.component_boundary(q, comps[0]) == [0, 2]
    # a loose quantified vertex has an empty boundary
    q2 = Query(graph(2, []), (0,))
    comps2 = dec.quantified_components(q2)
    assert comps2 == [[1]]
    assert dec.component_boundary(q2, comps2[0]) == []
    # two separate quantified pendants give two components
    q3 = Query(path(3), (1,))
    assert dec.quantified_components(q3) == [[0], [2]]


def test_extendability_relation_on_the_wedge():
    q = Query(path(3), (0, 2))
    rel = dec.extendability_relation(q, path(3), 0)
    assert len(rel) == homs.count_answers(q, path(3)) == 5
    assert all(len(tup) == 2 for tup in rel)


def test_dss_count_matches_brute_force():
    rng = random.Random(13)
    for _ in range(120):
        q = random_query(rng, 5)
        t = random_graph(rng, rng.randint(0, 5))
        assert dec.count_answers_dss(q, t) == homs.count_answers(q, t)


def test_dss_rejects_side_constraints():
    q = Query(path(3), (0, 2), inequalities=[frozenset((0, 2))])
    with pytest.raises(ValueError):
        dec.count_answers_dss(q, path(3))


def test_derived_free_query_has_only_free_variables():
    rng = random.Random(19)
    for _ in range(40):
        q = random_query(rng, 5)
        t = random_graph(rng, rng.randint(1, 4))
        derived = dec.derived_free_query(q, t)
        if derived is None:
            assert homs.count_answers(q, t) == 0
            continue
        dq, dt = derived
        assert dq.quantified() == []
        assert homs.count_answers(dq, dt) == homs.count_answers(q, t)
