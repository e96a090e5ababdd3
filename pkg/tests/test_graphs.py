import itertools
import random

import pytest

from starfield import (
    DiffPoly,
    KontsevichGraph,
    LeibnizGraph,
    eval_graph,
    expand_leibniz,
    is_admissible,
    jacobiator,
    normalize,
)
from starfield.graphs import GraphError

from helpers import poisson_examples, rand_bivector, rand_point_poly, upoly


def test_admissibility():
    assert not is_admissible(KontsevichGraph(2, ((0, 0),)))     # double edge
    assert not is_admissible(KontsevichGraph(2, ((2, 0),)))     # tadpole
    assert is_admissible(KontsevichGraph(2, ((0, 1),)))
    # every graph of the order-2 expansion is admissible
    for edges in (((0, 1),), ((0, 1), (0, 1)), ((0, 3), (0, 1)),
                  ((1, 3), (0, 1)), ((0, 3), (2, 1))):
        assert is_admissible(KontsevichGraph(2, edges))


def test_normalize_sorts_pairs_with_sign():
    canon, sign = normalize(KontsevichGraph(2, ((0, 1),)))
    assert sign == 1 and canon.edges == ((0, 1),)
    canon2, sign2 = normalize(KontsevichGraph(2, ((1, 0),)))
    assert sign2 == -1 and canon2 == canon


def test_normalize_idempotent_and_relabel_invariant():
    # every admissible 2-sink graph with <= 3 internal vertices lands on the
    # same canonical key under any internal relabelling
    rng = random.Random(31)
    graphs = []
    for k in (1, 2, 3):
        nv = 2 + k
        all_pairs = [(a, b) for a in range(nv) for b in range(nv) if a != b]
        for _ in range(40):
            edges = []
            ok = True
            for v in range(2, nv):
                cands = [(a, b) for (a, b) in all_pairs if a != v and b != v]
                edges.append(rng.choice(cands))
            graphs.append(KontsevichGraph(2, tuple(edges)))
    for g in graphs:
        canon, _sign = normalize(g)
        assert normalize(canon)[0] == canon
        assert normalize(canon)[1] == 1
        k = g.internal
        for perm in itertools.permutations(range(k)):
            relabel = list(range(2)) + [2 + perm[i] for i in range(k)]
            edges = [None] * k
            for i, (a, b) in enumerate(g.edges):
                edges[perm[i]] = (relabel[a], relabel[b])
            assert normalize(KontsevichGraph(2, tuple(edges)))[0] == canon


def test_towered_wedge_encodings_share_canonical_key():
    g_a = KontsevichGraph(2, ((0, 3), (0, 1)))
    g_b = KontsevichGraph(2, ((0, 1), (2, 0)))
    assert normalize(g_a)[0] == normalize(g_b)[0]


def test_edge_swap_negates_evaluation():
    rng = random.Random(32)
    for _ in range(10):
        P = rand_bivector(rng, 3, 2)
        args = [rand_point_poly(rng, 3, 2) for _ in range(2)]
        g = KontsevichGraph(2, ((0, 3), (0, 1)))
        swapped = KontsevichGraph(2, ((3, 0), (0, 1)))
        assert eval_graph(swapped, P, args) == -eval_graph(g, P, args)


def test_leibniz_wellformedness():
    with pytest.raises(GraphError):
        LeibnizGraph(3, (), ()).check()                   # no Jacobiator
    with pytest.raises(GraphError):
        LeibnizGraph(3, (), ((0, 1, 1),)).check()         # repeated target
    with pytest.raises(GraphError):
        LeibnizGraph(3, (), ((0, 1, 3),)).check()         # lands on itself


def test_bare_jacobiator_expands_to_three_wedge_pairs():
    total = expand_leibniz(LeibnizGraph(3, (), ((0, 1, 2),)))
    assert len(total) == 3
    for graph, _coef in total.items():
        assert graph.internal == 2 and graph.sinks == 3


def test_bare_jacobiator_matches_cyclic_bracket_formula():
    # the three-term expansion evaluates to {{f,g},h} + {{g,h},f} + {{h,f},g}
    rng = random.Random(33)
    total = expand_leibniz(LeibnizGraph(3, (), ((0, 1, 2),)))
    for _ in range(5):
        P = rand_bivector(rng, 3, 2)
        args = [rand_point_poly(rng, 3, 2) for _ in range(3)]
        val = DiffPoly.zero()
        for graph, coef in total.items():
            val = val + coef * eval_graph(graph, P, args)
        assert val == jacobiator(P, *args)


def test_arrow_into_jacobiator_distributes_by_leibniz():
    L = LeibnizGraph(3, ((0, 4),), ((0, 1, 2),))
    total = expand_leibniz(L)
    assert len(total) == 6
    for graph, _coef in total.items():
        assert graph.internal == 3


def test_leibniz_expansions_vanish_on_poisson_structures():
    # spot check; the exhaustive sweep runs in the acceptance suite
    rng = random.Random(34)
    bivs = poisson_examples()
    cases = [
        LeibnizGraph(3, (), ((0, 1, 2),)),
        LeibnizGraph(3, ((0, 4),), ((1, 2, 3),)),
        LeibnizGraph(3, ((1, 4),), ((0, 2, 3),)),
        LeibnizGraph(3, ((0, 1), (0, 5)), ((1, 2, 3),)),
    ]
    args = [upoly(1), upoly(2), upoly(3)]
    for L in cases:
        total = expand_leibniz(L)
        for P in bivs:
            val = DiffPoly.zero()
            for graph, coef in total.items():
                val = val + coef * eval_graph(graph, P, args)
            assert val.is_zero()
