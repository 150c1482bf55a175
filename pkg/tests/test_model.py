import random

import pytest

from cqcount.model import (Coloring, Query, Signature, Structure,
                           clone_by_multiplicity, clone_vertices,
                           complement_structure, complement_symbol,
                           disjoint_union, gaifman_adjacency, gaifman_graph,
                           graph, graph_edges, induced_substructure,
                           lift_structure, tensor_product)

from helpers import random_graph


def test_graph_builder_rejects_loops():
    with pytest.raises(ValueError):
        graph(2, [(0, 0)])


def test_graph_stores_both_orientations():
    g = graph(3, [(0, 1)])
    assert (0, 1) in g.relations["E"] and (1, 0) in g.relations["E"]
    assert graph_edges(g) == [(0, 1)]


def test_gaifman_adjacency_of_ternary_atom():
    sig = Signature((("R", 3),))
    s = Structure(sig, 3, {"R": {(0, 1, 2)}})
    adj = gaifman_adjacency(s)
    assert adj[0] == {1, 2} and adj[1] == {0, 2}
    gg = gaifman_graph(s)
    assert sorted(graph_edges(gg)) == [(0, 1), (0, 2), (1, 2)]


def test_complement_is_reflexive_and_involutive():
    g = graph(4, [(0, 1), (2, 3)])
    c = complement_structure(g)
    assert (0, 0) in c.relations["E"]
    assert (0, 1) not in c.relations["E"]
    assert (0, 2) in c.relations["E"]
    back = complement_structure(c)
    assert back.relations["E"] == g.relations["E"]


def test_tensor_product_sizes_and_projection():
    rng = random.Random(1)
    for _ in range(20):
        a = random_graph(rng, rng.randint(1, 4))
        b = random_graph(rng, rng.randint(1, 4))
        t = tensor_product(a, b)
        assert t.n == a.n * b.n


def test_clone_by_multiplicity_counts():
    g = graph(2, [(0, 1)])
    cloned, origin = clone_by_multiplicity(g, [2, 3])
    assert cloned.n == 5
    assert sorted(origin) == [0, 0, 1, 1, 1]
    assert len(graph_edges(cloned)) == 6


def test_clone_vertices_demands_positive_multiplicity():
    g = graph(2, [(0, 1)])
    c = Coloring([0, 1], g, g)
    with pytest.raises(ValueError):
        clone_vertices(g, c, {0: 0, 1: 1})


def test_coloring_validates_the_hom_property():
    pattern = graph(2, [(0, 1)])
    bad = graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        Coloring([0, 0], bad, pattern)
    Coloring([0, 1], bad, pattern)


def test_query_side_constraints_must_be_free():
    g = graph(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        Query(g, (0,), inequalities=[frozenset((0, 1))])
    with pytest.raises(ValueError):
        Query(g, (0,), negated_atoms=[("E", (0, 2))])
    q = Query(g, (0, 1), inequalities=[frozenset((0, 1))])
    assert not q.is_plain()
    assert q.quantified() == [2]


def test_lift_structure_adds_complement_symbols():
    g = graph(2, [(0, 1)])
    lifted = lift_structure(g)
    name = complement_symbol("E")
    assert name in lifted.signature.arity
    assert (0, 0) in lifted.relations[name]
    assert (0, 1) not in lifted.relations[name]
    with pytest.raises(ValueError):
        lift_structure(lifted)


def test_induced_substructure_and_union():
    g = graph(3, [(0, 1), (1, 2)])
    sub, old_to_new = induced_substructure(g, (1, 2))
    assert sub.n == 2 and len(graph_edges(sub)) == 1
    assert old_to_new[1] == 0 and old_to_new[2] == 1
    u = disjoint_union(g, sub)
    assert u.n == 5 and len(graph_edges(u)) == 3
