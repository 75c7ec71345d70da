import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dag_and_triple, dags
from faithbn.errors import CycleError, GuardError, InputError, PreconditionError
from faithbn.graph import (
    And,
    Atom,
    Dag,
    IndependenceStatement as I,
    Or,
    all_dags,
    ancestors_of,
    canonical_triples,
    count_canonical_triples,
    d_separated,
    decide_sentence,
    enumerate_entailed,
    find_d_connecting_path,
    markov_equivalent,
    negate,
    singly_connected_subgraph,
    topological_order,
)
from oracles import brute_all_dags, naive_d_connected, path_is_d_connecting


def test_topological_order_chain(chain):
    assert topological_order(chain) == ["X", "Y", "Z"]


def test_topological_order_edgeless_keeps_declaration_order():
    assert topological_order(Dag(["B", "A"])) == ["B", "A"]
    assert topological_order(Dag("AB")) == ["A", "B"]


def test_topological_order_double_collider_valid_and_stable(double_collider):
    order = topological_order(double_collider)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[t] < pos[h] for t, h in double_collider.edges)
    assert order == topological_order(Dag(double_collider.vertices, double_collider.sorted_edges()))


def test_cycle_rejected_with_vertices():
    with pytest.raises(CycleError) as exc:
        Dag("XYZW", [("X", "Y"), ("Y", "Z"), ("Z", "X"), ("Z", "W")])
    assert exc.value.vertices == {"X", "Y", "Z"}


@pytest.mark.parametrize(
    "edges",
    [[("X", "X")], [("X", "Y"), ("X", "Y")], [("X", "Q")]],
)
def test_bad_edges_rejected(edges):
    with pytest.raises(InputError):
        Dag("XY", edges)


def test_ancestors(chain, double_collider):
    assert ancestors_of(chain, {"Z"}) == {"X", "Y", "Z"}
    assert ancestors_of(chain, set()) == frozenset()
    assert ancestors_of(double_collider, {"C1", "C2"}) == {"A", "B", "C1", "C2", "D"}
    with pytest.raises(InputError):
        ancestors_of(chain, {"Q"})


def test_d_separated_examples(chain, collider, double_collider):
    assert d_separated(chain, "X", "Z", {"Y"})
    assert d_separated(collider, "X", "Y", ())
    assert not d_separated(collider, "X", "Y", {"Z"})
    assert not d_separated(double_collider, "A", "B", {"C1", "C2"})


def test_overlapping_sets_rejected(chain):
    with pytest.raises(InputError):
        d_separated(chain, {"X"}, {"X", "Z"}, ())
    with pytest.raises(InputError):
        d_separated(chain, "X", "Z", {"Z"})


def test_find_path_collider(collider):
    p = find_d_connecting_path(collider, "X", "Y", {"Z"})
    assert p.vertices == ("X", "Z", "Y")
    assert p.edges == (("X", "Z"), ("Y", "Z"))
    assert p.colliders == (True,)


def test_find_path_absent_when_separated(chain):
    assert find_d_connecting_path(chain, "X", "Z", {"Y"}) is None


def test_find_path_double_collider(double_collider):
    p = find_d_connecting_path(double_collider, "A", "B", {"C1", "C2"})
    assert p.vertices == ("A", "C1", "D", "C2", "B")
    assert p.collider_vertices() == ("C1", "C2")


@given(dag_and_triple())
def test_d_separation_matches_naive_enumerator(case):
    g, a, b, c = case
    assert d_separated(g, a, b, c) == (not naive_d_connected(g.vertices, g.edges, a, b, c))


@given(dag_and_triple())
def test_d_separation_symmetric(case):
    g, a, b, c = case
    assert d_separated(g, a, b, c) == d_separated(g, b, a, c)


@given(dag_and_triple(), st.data())
def test_d_separation_decomposes(case, data):
    g, a, b, c = case
    if d_separated(g, a, b, c):
        sub = data.draw(st.sets(st.sampled_from(sorted(a)), min_size=1))
        assert d_separated(g, sub, b, c)


@given(dag_and_triple())
def test_found_path_is_a_real_d_connecting_path(case):
    g, a, b, c = case
    p = find_d_connecting_path(g, a, b, c)
    assert (p is None) == d_separated(g, a, b, c)
    if p is not None:
        assert p.vertices[0] in a and p.vertices[-1] in b
        assert len(set(p.vertices)) == len(p.vertices)
        for (u, v), (t, h) in zip(zip(p.vertices, p.vertices[1:]), p.edges):
            assert {u, v} == {t, h} and g.has_edge(t, h)
        for i, flag in enumerate(p.colliders, 1):
            assert flag == (p.edges[i - 1][1] == p.vertices[i] == p.edges[i][1])
        assert path_is_d_connecting(g.edges, list(p.vertices), c)


def test_singly_connected_already_tree(double_collider, chain):
    assert singly_connected_subgraph(double_collider, "A", "B", {"C1", "C2"}) == double_collider
    assert singly_connected_subgraph(chain, "X", "Z", ()) == chain


def test_singly_connected_prunes_shared_descendant():
    g = Dag(
        ["A", "D1", "M", "D2", "B", "C"],
        [("A", "D1"), ("M", "D1"), ("M", "D2"), ("B", "D2"), ("D1", "C"), ("D2", "C")],
    )
    sub = singly_connected_subgraph(g, "A", "B", {"C"})
    assert sub.edges == {("A", "D1"), ("D1", "C"), ("B", "D2"), ("D2", "C")}
    # oracle: some simple path in the pruned graph d-connects
    assert naive_d_connected(sub.vertices, sub.edges, {"A"}, {"B"}, {"C"})
    assert path_is_d_connecting(sub.edges, ["A", "D1", "C", "D2", "B"], {"C"})


def test_singly_connected_requires_connection(chain):
    with pytest.raises(PreconditionError):
        singly_connected_subgraph(chain, "X", "Z", {"Y"})


@given(dag_and_triple(max_vertices=7))
def test_singly_connected_postconditions(case):
    g, a, b, c = case
    x, y = min(a), min(b)
    if d_separated(g, x, y, c):
        return
    sub = singly_connected_subgraph(g, x, y, c)
    assert sub.edges <= g.edges
    assert sub.is_singly_connected()
    assert not d_separated(sub, x, y, c)


def test_canonical_triple_count_matches_formula():
    for n in range(1, 6):
        vs = "ABCDE"[:n]
        triples = list(canonical_triples(vs))
        assert len(triples) == count_canonical_triples(n) == len(set(triples))
        # brute force over ordered pairs of disjoint sets
        brute = 0
        for labels in itertools.product(range(4), repeat=n):
            if 1 in labels and 2 in labels:
                brute += 1
        assert len(triples) * 2 == brute


def _naive_entailed(g):
    out = set()
    vs = sorted(g.vertices)
    for labels in itertools.product(range(4), repeat=len(vs)):
        a = {v for v, l in zip(vs, labels) if l == 1}
        b = {v for v, l in zip(vs, labels) if l == 2}
        c = {v for v, l in zip(vs, labels) if l == 3}
        if a and b and sorted(a) < sorted(b) and not naive_d_connected(g.vertices, g.edges, a, b, c):
            out.add(I.of(a, b, c))
    return out


def test_enumerate_entailed_collider(collider):
    assert enumerate_entailed(collider) == _naive_entailed(collider) == {I.of("X", "Y")}


def test_enumerate_entailed_chain(chain):
    ent = enumerate_entailed(chain)
    assert ent == _naive_entailed(chain) == {I.of("X", "Z", "Y")}
    assert not any(not s.c for s in ent)


def test_enumerate_entailed_edgeless():
    g = Dag("ABC")
    assert enumerate_entailed(g) == set(canonical_triples(g.vertices))


def test_enumerate_entailed_guard():
    with pytest.raises(GuardError, match="triples"):
        enumerate_entailed(Dag("ABCDEFGHI"))


def test_decide_sentence(chain, collider):
    s = And((Atom(I.of("X", "Y")), Atom(I.of("X", "Y", "Z"), negated=True)))
    assert decide_sentence(collider, s)
    i = Atom(I.of("X", "Z"))
    assert decide_sentence(chain, Or((i, negate(i))))
    assert not decide_sentence(chain, Atom(I.of("X", "Z", "Y"), negated=True))
    with pytest.raises(InputError):
        decide_sentence(chain, And(()))
    with pytest.raises(InputError):
        decide_sentence(chain, "I(X;Z)")


@given(dag_and_triple())
def test_decide_atom_is_d_separation(case):
    g, a, b, c = case
    assert decide_sentence(g, Atom(I.of(a, b, c))) == d_separated(g, a, b, c)


def test_markov_equivalent_examples():
    assert markov_equivalent(Dag("XYZ", [("X", "Y"), ("Y", "Z")]), Dag("XYZ", [("Y", "X"), ("Z", "Y")]))
    assert not markov_equivalent(Dag("XYZ", [("X", "Z"), ("Y", "Z")]), Dag("XYZ", [("X", "Z"), ("Z", "Y")]))
    with pytest.raises(InputError):
        markov_equivalent(Dag("XY"), Dag("XZ"))


@given(dags())
def test_markov_equivalent_reflexive(g):
    assert markov_equivalent(g, g)


@given(dags(max_vertices=4), dags(max_vertices=4))
def test_markov_equivalence_means_same_entailments(g1, g2):
    if set(g1.vertices) != set(g2.vertices):
        return
    assert markov_equivalent(g1, g2) == (enumerate_entailed(g1) == enumerate_entailed(g2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_all_dags_count_against_brute_force(n):
    assert len(list(all_dags("ABCD"[:n]))) == brute_all_dags(n)


def test_all_dags_three_vertices_is_25():
    assert brute_all_dags(3) == 25
    assert len(list(all_dags("ABC"))) == 25
