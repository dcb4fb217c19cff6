"""Query evaluation: valuations, three-valued conditions, patterns.

The worked examples use D0 = default {(a,p,b)}, g1 {(b,q,c)} throughout.
Bulk agreement with the naive evaluator lives in the acceptance suite;
a smaller batch runs here for quick feedback.
"""

import pytest

from quadvc.algebra import (
    EMPTY_VALUATION, Truth3, UnboundVariable, Valuation, difference,
    eval_condition, eval_construct, eval_pattern, eval_query, eval_select,
    instantiate, join, left_join, truth_and, truth_not, truth_or, union,
)
from quadvc.ast import (
    And, BasicPattern, Bound, Equals, Filter, GraphBlock, Join, Not, Opt, Or,
    Select, TripleBlock, TriplePattern, Union, Var,
)
from quadvc.model import DEFAULT, Dataset, Iri, Literal, Triple

from generators import atom_pool, make_rng, random_dataset, random_pattern
from oracle import naive_eval_pattern

SEED = 2026_04
QUICK_PAIRS = 150

A, B, C = Iri("urn:x:a"), Iri("urn:x:b"), Iri("urn:x:c")
P, Q = Iri("urn:x:p"), Iri("urn:x:q")
G1, G2 = Iri("urn:g1"), Iri("urn:g2")
X, Y, Z, G = Var("x"), Var("y"), Var("z"), Var("g")

D0 = Dataset.of({Triple(A, P, B)}, {G1: {Triple(B, Q, C)}})


def val(**kw):
    return Valuation.of(kw)


def rows(vs):
    return {tuple(m.bindings) for m in vs}


# -- three-valued logic -------------------------------------------------

def test_truth_order_and_tables():
    F, E, T = Truth3.FALSE, Truth3.ERROR, Truth3.TRUE
    assert F < E < T
    assert truth_and(T, E) is E and truth_and(F, E) is F and truth_and(T, T) is T
    assert truth_or(T, E) is T and truth_or(F, E) is E and truth_or(F, F) is F
    assert truth_not(T) is F and truth_not(F) is T and truth_not(E) is E


# -- valuations ---------------------------------------------------------

def test_valuation_merge_example():
    m1 = val(x=A, y=B)
    m2 = val(y=B, z=C)
    assert m1.compatible(m2)
    assert m1.merge(m2) == val(x=A, y=B, z=C)


def test_valuation_incompatible():
    assert not val(x=A).compatible(val(x=B))


def test_valuation_resolve_lifts_over_atoms():
    m = val(x=A)
    assert m.resolve(X) == A
    assert m.resolve(B) == B
    assert m.resolve(Y) is None


def test_set_operations():
    o1 = frozenset({val(x=A), val(x=B)})
    o2 = frozenset({val(x=A, y=C)})
    assert join(o1, o2) == frozenset({val(x=A, y=C)})
    assert union(o1, o2) == o1 | o2
    assert difference(o1, o2) == frozenset({val(x=B)})
    assert left_join(o1, o2) == frozenset({val(x=A, y=C), val(x=B)})


# -- conditions ---------------------------------------------------------

def test_equals_unresolvable_is_error():
    m = val(x=A)
    assert eval_condition(Equals(X, A), m) is Truth3.TRUE
    assert eval_condition(Equals(X, B), m) is Truth3.FALSE
    assert eval_condition(Equals(Y, A), m) is Truth3.ERROR
    assert eval_condition(Equals(Y, Z), m) is Truth3.ERROR


def test_bound_and_connectives():
    m = val(x=A)
    assert eval_condition(Bound(X), m) is Truth3.TRUE
    assert eval_condition(Bound(Y), m) is Truth3.FALSE
    assert eval_condition(Not(Equals(Y, A)), m) is Truth3.ERROR
    assert eval_condition(Or(Bound(X), Equals(Y, A)), m) is Truth3.TRUE
    assert eval_condition(And(Bound(X), Equals(Y, A)), m) is Truth3.ERROR


# -- instantiate --------------------------------------------------------

def test_instantiate_graph_variable_example():
    c = BasicPattern((GraphBlock(G, (TriplePattern(X, Q, C),)),))
    got = instantiate(val(g=G1, x=B), c)
    assert got == Dataset.of(set(), {G1: {Triple(B, Q, C)}})


def test_instantiate_requires_all_variables():
    c = BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),))
    with pytest.raises(UnboundVariable):
        instantiate(val(x=A), c)


def test_instantiate_empty_graph_block_defines():
    c = BasicPattern((GraphBlock(G1, ()),))
    got = instantiate(EMPTY_VALUATION, c)
    assert got.defined(G1) and got.graph(G1) == frozenset()


# -- basic patterns -----------------------------------------------------

def test_default_block_match():
    p = BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),))
    assert rows(eval_pattern(p, D0)) == {(("x", A), ("y", B))}


def test_graph_block_match_example():
    p = BasicPattern((GraphBlock(G1, (TriplePattern(X, Q, Y),)),))
    assert rows(eval_pattern(p, D0)) == {(("x", B), ("y", C))}


def test_domain_is_exactly_pattern_vars():
    p = BasicPattern((TripleBlock((TriplePattern(X, P, B),)),))
    got = eval_pattern(p, D0)
    assert rows(got) == {(("x", A),)}


def test_graph_variable_ranges_over_defined_names_only():
    d = Dataset.of({Triple(A, P, B)}, {G1: {Triple(A, P, B)}, G2: set()})
    p = BasicPattern((GraphBlock(G, (TriplePattern(A, P, B),)),))
    assert rows(eval_pattern(p, d)) == {(("g", G1),)}
    # an empty GRAPH block sees every defined graph, never the default
    p_any = BasicPattern((GraphBlock(G, ()),))
    assert rows(eval_pattern(p_any, d)) == {(("g", G1),), (("g", G2),)}


def test_empty_graph_block_is_a_definedness_test():
    present = BasicPattern((GraphBlock(G1, ()),))
    absent = BasicPattern((GraphBlock(G2, ()),))
    assert eval_pattern(present, D0) == frozenset({EMPTY_VALUATION})
    assert eval_pattern(absent, D0) == frozenset()


def test_unit_pattern():
    assert eval_pattern(BasicPattern(), D0) == frozenset({EMPTY_VALUATION})


def test_shared_variable_across_blocks():
    p = BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),
                      GraphBlock(G1, (TriplePattern(Y, Q, Z),))))
    assert rows(eval_pattern(p, D0)) == {(("x", A), ("y", B), ("z", C))}


# -- operators ----------------------------------------------------------

def test_opt_extends_when_possible():
    p = Opt(BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)),
            BasicPattern((GraphBlock(G1, (TriplePattern(Y, Q, Z),)),)))
    assert rows(eval_pattern(p, D0)) == {(("x", A), ("y", B), ("z", C))}


def test_opt_keeps_bare_rows_when_no_extension():
    d = Dataset.of({Triple(A, P, B)}, {})
    p = Opt(BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)),
            BasicPattern((GraphBlock(G1, (TriplePattern(Y, Q, Z),)),)))
    assert rows(eval_pattern(p, d)) == {(("x", A), ("y", B))}


def test_union_and_join():
    p = Union(BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)),
              BasicPattern((GraphBlock(G1, (TriplePattern(X, Q, Y),)),)))
    assert rows(eval_pattern(p, D0)) == {(("x", A), ("y", B)), (("x", B), ("y", C))}
    j = Join(BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)),
             BasicPattern((GraphBlock(G1, (TriplePattern(Y, Q, Z),)),)))
    assert rows(eval_pattern(j, D0)) == {(("x", A), ("y", B), ("z", C))}


def test_filter_keeps_only_true():
    base = BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),))
    kept = Filter(base, Equals(X, A))
    dropped = Filter(base, Equals(X, B))
    error_cond = Filter(base, Equals(Z, A))  # z unbound: error, not kept
    assert rows(eval_pattern(kept, D0)) == {(("x", A), ("y", B))}
    assert eval_pattern(dropped, D0) == frozenset()
    assert eval_pattern(error_cond, D0) == frozenset()


# -- queries ------------------------------------------------------------

def test_select_projects():
    q = Select((X,), BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)))
    assert rows(eval_select(q, D0)) == {(("x", A),)}


def test_select_projection_can_collapse_rows():
    d = Dataset.of({Triple(A, P, B), Triple(A, P, C)}, {})
    q = Select((X,), BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)))
    assert rows(eval_select(q, d)) == {(("x", A),)}


def test_construct_skips_rows_missing_template_vars():
    template = BasicPattern((TripleBlock((TriplePattern(Y, Q, Z),)),))
    where = Opt(BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)),
                BasicPattern((GraphBlock(G1, (TriplePattern(Y, Q, Z),)),)))
    d = Dataset.of({Triple(A, P, B)}, {})  # no g1: z never binds
    assert eval_construct(template, where, d) == Dataset()
    assert eval_construct(template, where, D0) == Dataset.of({Triple(B, Q, C)}, {})


def test_construct_example_targets_named_graph():
    template = BasicPattern((GraphBlock(G1, (TriplePattern(X, Iri("urn:x:p2"), Y),)),))
    where = BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),))
    got = eval_construct(template, where, D0)
    assert got == Dataset.of(set(), {G1: {Triple(A, Iri("urn:x:p2"), B)}})


def test_eval_query_dispatch():
    q = Select((X,), BasicPattern((TripleBlock((TriplePattern(X, P, Y),)),)))
    assert eval_query(q, D0) == eval_select(q, D0)


# -- agreement with the naive evaluator ---------------------------------

def test_quick_oracle_agreement():
    rng = make_rng(SEED)
    pool = atom_pool(rng)
    for _ in range(QUICK_PAIRS):
        d = random_dataset(rng, pool)
        p = random_pattern(rng, pool)
        engine = {tuple(m.bindings) for m in eval_pattern(p, d)}
        naive = set(naive_eval_pattern(p, d))
        assert engine == naive
