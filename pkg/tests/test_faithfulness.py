from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from conftest import dag_and_triple, dags
from faithbn.discrete import (
    StateSpace,
    ci_holds,
    cpts_from_function,
    extend_statespace,
    joint_from_cpts,
    markov_holds,
    random_cpts,
)
from faithbn.errors import GuardError, InputError, PreconditionError
from faithbn.faithfulness import (
    CovarianceOracle,
    GraphOracle,
    TableOracle,
    draw_oracle,
    faithful_draw,
    faithfulness_report,
    local_dependence_cpts,
    measure_zero_experiment,
    recover_equivalence_class,
    verify_strong_completeness,
    witness_discrete,
    witness_gaussian,
)
from faithbn.gaussian import ci_holds_gaussian, implied_covariance
from faithbn.graph import Dag, IndependenceStatement as I, all_dags, canonical_triples, d_separated, markov_equivalent


@pytest.fixture
def abc_collider():
    return Dag("ABC", [("A", "C"), ("B", "C")])


def test_report_collider_random_is_faithful(abc_collider):
    ss = StateSpace.uniform("ABC")
    t = joint_from_cpts(abc_collider, ss, random_cpts(abc_collider, ss, 0))
    rep = faithfulness_report(abc_collider, TableOracle(t))
    assert rep.verdict == "faithful"
    assert len(rep.classifications) == len(list(canonical_triples("ABC")))
    assert rep.min_residual is not None and rep.min_residual > 0


def test_report_constant_child_is_unfaithful(abc_collider):
    ss = StateSpace.uniform("ABC")
    theta = cpts_from_function(abc_collider, ss, lambda v, pa: (F(1, 3), F(2, 3)))
    rep = faithfulness_report(abc_collider, TableOracle(joint_from_cpts(abc_collider, ss, theta)))
    assert rep.verdict == "unfaithful"
    assert I.of("A", "B", "C") in rep.unfaithful_triples
    label = {t.stmt: t.label for t in rep.classifications}
    assert label[I.of("A", "B", "C")] == "not-entailed-independent"
    assert not rep.markov_violations


def test_report_markov_violation_detected():
    xy = Dag("XY", [("X", "Y")])
    ss = StateSpace.uniform("XY")
    t = joint_from_cpts(xy, ss, random_cpts(xy, ss, 0))
    rep = faithfulness_report(Dag("XY"), TableOracle(t))
    assert rep.verdict == "markov-violating"
    assert rep.counts()["entailed-dependent"] == 1


@given(dags(max_vertices=5))
def test_graph_oracle_is_always_faithful(g):
    assert faithfulness_report(g, GraphOracle(g)).faithful


def test_report_guard_and_explicit_triples():
    g = Dag("ABCDEF")
    with pytest.raises(GuardError):
        faithfulness_report(g, GraphOracle(g))
    rep = faithfulness_report(g, GraphOracle(g), triples=[I.of("A", "F")])
    assert len(rep.classifications) == 1 and rep.faithful


def test_report_vertex_mismatch(chain):
    with pytest.raises(InputError):
        faithfulness_report(chain, GraphOracle(Dag("XY")))


def test_local_dependence_cpts(chain):
    theta = local_dependence_cpts(chain)
    assert theta.rows["X"][()] == (F(1, 2), F(1, 2))
    assert theta.rows["Y"][(1,)] == (F(1, 5), F(4, 5))
    t = joint_from_cpts(chain, StateSpace.uniform("XYZ"), theta)
    for u, v in chain.edges:
        assert not ci_holds(t, u, v, ())


def test_witness_collider(abc_collider):
    w = witness_discrete(abc_collider, I.of("A", "B", "C"))
    assert w.success and w.resamples == 0
    assert markov_holds(abc_collider, w.table)
    assert not ci_holds(w.table, "A", "B", "C")


def test_witness_double_collider(double_collider):
    stmt = I.of("A", "B", {"C1", "C2"})
    w = witness_discrete(double_collider, stmt)
    assert w.success
    assert w.subgraph.is_singly_connected()
    assert not ci_holds(w.table, stmt)
    assert ci_holds(w.table, "A", "B", ())


def test_witness_ternary_padding(double_collider):
    stmt = I.of("A", "B", {"C1", "C2"})
    tern = StateSpace.uniform(double_collider.vertices, 3)
    w = witness_discrete(double_collider, stmt, tern)
    assert w.success and w.table.probs.shape == (3,) * 5
    assert not ci_holds(w.table, stmt)
    binary = witness_discrete(double_collider, stmt)
    assert extend_statespace(binary.table, tern) == w.table


def test_witness_parameters_reproduce_table(double_collider):
    stmt = I.of("A", "B", {"C1", "C2"})
    for ss in (StateSpace.uniform(double_collider.vertices), StateSpace({"A": 3, "C1": 2, "D": 3, "C2": 2, "B": 2})):
        w = witness_discrete(double_collider, stmt, ss)
        assert joint_from_cpts(double_collider, ss, w.params) == w.table


def test_witness_rejects_entailed_and_sets(chain):
    with pytest.raises(PreconditionError):
        witness_discrete(chain, I.of("X", "Z", "Y"))
    g = Dag("ABC", [("A", "C"), ("B", "C")])
    with pytest.raises(PreconditionError):
        witness_discrete(g, I.of({"A", "B"}, "C"))
    assert witness_discrete(g, I.of({"A", "B"}, "C"), mode="random").success


def test_witness_unknown_mode(chain):
    with pytest.raises(InputError):
        witness_discrete(chain, I.of("X", "Z"), mode="clever")


@settings(max_examples=40)
@given(dag_and_triple(max_vertices=4))
def test_structured_and_random_agree(case):
    g, a, b, c = case
    x, y = min(a), min(b)
    stmt = I.of(x, y, c)
    if d_separated(g, stmt):
        return
    s = witness_discrete(g, stmt, mode="structured")
    r = witness_discrete(g, stmt, mode="random", seed=3)
    assert s.success and r.success
    for w in (s, r):
        t = joint_from_cpts(g, w.statespace, w.params)
        assert markov_holds(g, t) and not ci_holds(t, stmt)


def test_witness_gaussian_double_collider(double_collider):
    w = witness_gaussian(double_collider, I.of("A", "B", {"C1", "C2"}))
    assert w.success
    assert not ci_holds_gaussian(implied_covariance(double_collider, w.params), I.of("A", "B", {"C1", "C2"}))


def test_measure_zero_empty(double_collider):
    res = measure_zero_experiment(double_collider, None, 0)
    assert res.unfaithful == 0 and res.markov_violations == 0 and res.verdicts == ()


def test_measure_zero_deterministic(double_collider):
    r1 = measure_zero_experiment(double_collider, None, 15, seed=4)
    r2 = measure_zero_experiment(double_collider, None, 15, seed=4)
    assert r1 == r2 and r1.verdicts == r2.verdicts
    assert r1.markov_violations == 0


def test_measure_zero_parallel_matches_serial(chain):
    serial = measure_zero_experiment(chain, None, 8, seed=1)
    parallel = measure_zero_experiment(chain, None, 8, seed=1, workers=2)
    assert serial.verdicts == parallel.verdicts


def test_measure_zero_gaussian(double_collider):
    res = measure_zero_experiment(double_collider, None, 10, family="gaussian")
    assert res.unfaithful == 0 and res.markov_violations == 0


def test_measure_zero_guard():
    with pytest.raises(GuardError):
        measure_zero_experiment(Dag("ABCDEF"), None, 1)


def test_verify_edgeless():
    g = Dag("ABC")
    rep = verify_strong_completeness(g, seed=11)
    assert rep.faithful
    assert all(t.label == "entailed-independent" for t in rep.classifications)


def test_verify_all_three_vertex_dags():
    graphs = list(all_dags("ABC"))
    assert len(graphs) == 25
    for g in graphs:
        rep = verify_strong_completeness(g, seed=0)
        assert rep.faithful and rep.resamples <= 1


def test_verify_double_collider_gaussian(double_collider):
    rep = verify_strong_completeness(double_collider, family="gaussian")
    assert rep.faithful


def test_draw_oracle_unknown_family(chain):
    with pytest.raises(InputError):
        draw_oracle(chain, None, 0, "poisson")


def test_recover_chain_class(chain):
    _, oracle = faithful_draw(chain)
    out = recover_equivalence_class(oracle, chain.vertices)
    assert len(out) == 3
    assert {frozenset(g.edges) for g in out} == {
        frozenset({("X", "Y"), ("Y", "Z")}),
        frozenset({("Z", "Y"), ("Y", "X")}),
        frozenset({("Y", "X"), ("Y", "Z")}),
    }


def test_recover_collider(collider):
    _, oracle = faithful_draw(collider)
    assert recover_equivalence_class(oracle, collider.vertices) == [collider]


def test_recover_independent():
    g = Dag("ABC")
    _, oracle = faithful_draw(g)
    assert recover_equivalence_class(oracle, "ABC") == [g]


def test_recover_gaussian_oracle(chain):
    _, oracle = faithful_draw(chain, family="gaussian")
    assert isinstance(oracle, CovarianceOracle)
    out = recover_equivalence_class(oracle, chain.vertices)
    assert chain in out and all(markov_equivalent(chain, h) for h in out)


def test_recover_guard():
    g = Dag("ABCDE")
    with pytest.raises(GuardError):
        recover_equivalence_class(GraphOracle(g), g.vertices)
