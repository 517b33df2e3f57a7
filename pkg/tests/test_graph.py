"""graph-core: construction, girth, cycles, contraction, distances, format."""

import math

import numpy as np
import pytest

from girthlab import corpus
from girthlab.errors import BudgetError, ValidationError
from girthlab.graph import (
    ACYCLIC,
    Matching,
    ball,
    build_graph,
    canonical_cycle,
    contract_matching,
    distance,
    enumerate_short_cycles,
    girth,
    read_graph_text,
    write_graph_text,
)


def test_triangle_build():
    g = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert g.declared_degree == 2
    assert g.m == 3
    assert sorted(g.neighbors(0).tolist()) == [1, 2]


def test_duplicate_edge_rejected():
    with pytest.raises(ValidationError, match=r"duplicate edge \(0, 1\)"):
        build_graph(2, [(0, 1), (1, 0)])


def test_loop_rejected():
    with pytest.raises(ValidationError, match="loop"):
        build_graph(3, [(1, 1)])


def test_out_of_range_rejected():
    with pytest.raises(ValidationError, match="outside"):
        build_graph(3, [(0, 3)])


def test_petersen_is_cubic():
    g = corpus.petersen()
    assert g.n == 10 and g.m == 15
    assert g.declared_degree == 3
    assert (g.degrees() == 3).all()


def test_symmetry_invariant():
    g = corpus.petersen()
    for u in range(g.n):
        for v in g.neighbors(u):
            assert u in g.neighbors(int(v))


def test_girth_cycle_and_tree():
    assert girth(corpus.cycle_graph(7)) == 7
    assert girth(corpus.path_graph(9)) == ACYCLIC
    assert girth(corpus.star_graph(5)) == ACYCLIC


def test_girth_known_graphs():
    assert girth(corpus.petersen()) == 5
    assert girth(corpus.heawood()) == 6
    assert girth(corpus.complete_graph(4)) == 3


def test_girth_matches_bruteforce_on_random_graphs():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(5, 14))
        mask = rng.random((n, n)) < 0.3
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
        if not edges:
            continue
        g = build_graph(n, edges)
        cycles = enumerate_short_cycles(g, n) if girth(g) != ACYCLIC else []
        expect = min((c.length for c in cycles), default=ACYCLIC)
        assert girth(g) == expect


def test_enumerate_cycles_c5():
    g = corpus.cycle_graph(5)
    assert len(enumerate_short_cycles(g, 5)) == 1
    assert enumerate_short_cycles(g, 4) == []


def test_enumerate_cycles_petersen():
    g = corpus.petersen()
    pentagons = enumerate_short_cycles(g, 5)
    assert len(pentagons) == 12
    assert all(c.length == 5 for c in pentagons)


def test_enumerate_respects_girth_boundary():
    for g in (corpus.petersen(), corpus.heawood(), corpus.cycle_graph(8)):
        gg = girth(g)
        if gg > 3:
            assert enumerate_short_cycles(g, gg - 1) == []
        assert len(enumerate_short_cycles(g, gg)) > 0


def test_enumerate_budget_cap():
    g = corpus.complete_graph(12)
    with pytest.raises(BudgetError):
        enumerate_short_cycles(g, 12, cap=50)


def test_cycle_canonicalization():
    a = canonical_cycle([3, 1, 2])
    b = canonical_cycle([1, 3, 2])  # reversal, shifted
    c = canonical_cycle([2, 3, 1])
    assert a == b == c
    assert a.length == 3
    assert a.vertices[0] == min(a.vertices)


def test_contract_path():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    g2, vmap = contract_matching(g, Matching(((1, 2),)))
    assert g2.n == 3 and g2.m == 2
    assert vmap[1] == vmap[2]


def test_contract_c6_gives_c5():
    g = corpus.cycle_graph(6)
    g2, _ = contract_matching(g, Matching(((0, 1),)))
    assert g2.n == 5
    assert girth(g2) == 5


def test_contract_rejects_parallel():
    g = corpus.complete_graph(3)
    with pytest.raises(ValidationError, match="parallel"):
        contract_matching(g, Matching(((0, 1),)))


def test_contract_girth_invariant():
    # contraction of a matching halves cycle lengths at most
    g = corpus.cycle_graph(9)
    m = Matching(((0, 1), (3, 4), (6, 7)))
    g2, _ = contract_matching(g, m)
    assert girth(g2) >= math.ceil(girth(g) / 2)


def test_distance_and_ball():
    g = corpus.petersen()
    assert distance(g, 3, 3) == 0
    assert distance(g, 0, 1) == 1
    # Petersen has diameter 2: every non-adjacent pair sits at distance 2
    for u in range(10):
        for v in range(u + 1, 10):
            expect = 1 if g.has_edge(u, v) else 2
            assert distance(g, u, v) == expect
    assert ball(g, 0, 1) == {0, 1, 4, 5}
    assert len(ball(g, 0, 2)) == 10


def test_distance_unreachable():
    g = build_graph(4, [(0, 1), (2, 3)])
    assert distance(g, 0, 3) == math.inf


def test_ball_growth_invariant():
    # |ball(u, floor(g/2)-1)| >= d^(floor(g/2)-1) for (d+1)-regular girth-g graphs
    for g in (corpus.petersen(), corpus.heawood()):
        d = g.declared_degree - 1
        r = girth(g) // 2 - 1
        for u in range(g.n):
            assert len(ball(g, u, r)) >= d ** r


def test_graph_text_roundtrip():
    for g in (corpus.petersen(), corpus.heawood(), corpus.path_graph(5),
              build_graph(3, [])):
        text = write_graph_text(g)
        assert text.startswith("# girthlab-graph n=")
        assert text.endswith("\n")
        g2 = read_graph_text(text)
        assert g2 == g


def test_graph_text_rejects_malformed():
    with pytest.raises(ValidationError):
        read_graph_text("0 1\n")
    with pytest.raises(ValidationError):
        read_graph_text("# girthlab-graph n=2 m=xx d=*\n0 1\n")
    with pytest.raises(ValidationError):
        read_graph_text("# girthlab-graph n=2 m=2 d=*\n0 1\n")


def test_matching_bijection_enforced():
    with pytest.raises(ValidationError):
        Matching(((0, 1), (1, 2)))
