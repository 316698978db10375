"""Every connected graph on at most six vertices against vertex-level brute force."""

import itertools
import random

import networkx as nx
import pytest

import oracles
from tanglekit.inverse_system import critical_sets, ends
from tanglekit.presentation import Presentation, components_minus
from tanglekit.separations import consistent, le, separations_at, star_and_interior
from tanglekit.tangle_space import tangles

NAMES = "abcdef"
PAIR_SAMPLE = 15000         # le pairs per six-vertex graph; smaller graphs are checked exhaustively
SET_SAMPLE = 150            # random sets per graph for consistency and star checks


def small_graphs():
    out = []
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() <= 6 and nx.is_connected(g):
            V = [NAMES[i] for i in g.nodes]
            E = [[NAMES[a], NAMES[b]] for a, b in g.edges]
            out.append((V, E))
    return out


GRAPHS = small_graphs()


def test_graph_count():
    # 1 + 1 + 2 + 6 + 21 + 112 connected graphs on 1..6 vertices
    assert len(GRAPHS) == 143


class Case:
    def __init__(self, V, E):
        self.V, self.E = V, E
        self.p = Presentation.from_term({"kind": "Finite", "vertices": V, "edges": E})
        self.adj = oracles.graph_from_edges(V, [tuple(e) for e in E])
        self.seps = [s for k in range(len(V) + 1) for X in itertools.combinations(V, k)
                     for s in separations_at(self.p, frozenset(X))]

    def vertex_level(self, s):
        X = s.separator
        comps = oracles.components(self.adj, X)
        chosen = []
        for key in s.selection.explicit:
            assert key.startswith("C:")
            chosen += [c for c in comps if key[2:] in c]
        return oracles.vertex_separation(self.adj, X, chosen)


def check_components(case):
    for k in range(len(case.V) + 1):
        for X in itertools.combinations(case.V, k):
            X = frozenset(X)
            space = components_minus(case.p, X)
            want = {(c, oracles.neighbourhood(case.adj, c)) for c in oracles.components(case.adj, X)}
            got = {(d.vertices, d.neighbourhood) for d in space.descriptors}
            assert got == want, (case.E, sorted(X))
            assert all(d.kind == "finite" and not d.is_family for d in space.descriptors)
            for d in space.descriptors:
                assert d.key == "C:" + min(d.vertices, key=case.p.rank)


def check_separations(case):
    vl = [case.vertex_level(s) for s in case.seps]
    want = {sep for _, _, sep in oracles.all_vertex_separations(case.adj)}
    assert len(vl) == len(want) and set(vl) == want
    return vl


def check_le(case, vl, rng):
    n = len(case.seps)
    if len(case.V) < 6:
        pairs = itertools.product(range(n), repeat=2)
    else:
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(PAIR_SAMPLE)]
    for i, j in pairs:
        assert le(case.seps[i], case.seps[j]) == oracles.v_le(vl[i], vl[j]), (case.E, case.seps[i], case.seps[j])


def check_sets(case, vl, rng):
    n = len(case.seps)
    for _ in range(SET_SAMPLE):
        idx = rng.sample(range(n), min(n, rng.randint(1, 4)))
        S = [case.seps[i] for i in idx]
        W = list(dict.fromkeys(vl[i] for i in idx))
        assert bool(consistent(S)) == oracles.v_consistent(W), (case.E, S)
        rep = star_and_interior(S)
        assert rep.is_star == oracles.v_is_star(W), (case.E, S)
        assert rep.interior_finite
        assert rep.interior.vertices() == oracles.v_interior(W, case.V), (case.E, S)


def check_no_tangles(case):
    assert ends(case.p).count == 0
    assert critical_sets(case.p).sets == ()
    T = tangles(case.p)
    assert T.handles() == []
    # the empty star already has the finite interior V
    rep = star_and_interior([], case.p)
    assert rep.is_star and rep.interior_finite and rep.interior.vertices() == frozenset(case.V)


def sweep():
    rng = random.Random(20260101)
    for V, E in GRAPHS:
        case = Case(V, E)
        check_components(case)
        vl = check_separations(case)
        check_le(case, vl, rng)
        check_sets(case, vl, rng)
        check_no_tangles(case)


@pytest.mark.parametrize("index", [0, 3, 10, 42, 100, 142])
def test_single_graph(index):
    V, E = GRAPHS[index]
    case = Case(V, E)
    rng = random.Random(index)
    check_components(case)
    vl = check_separations(case)
    check_le(case, vl, rng)
    check_sets(case, vl, rng)
    check_no_tangles(case)


def test_vertex_level_oracle_sanity():
    # path a-b-c: separating at b
    adj = oracles.graph_from_edges("abc", [("a", "b"), ("b", "c")])
    seps = oracles.all_vertex_separations(adj)
    assert (frozenset("ab"), frozenset("bc")) in {s for _, _, s in seps}
    r = (frozenset("ab"), frozenset("bc"))
    assert oracles.v_le(r, (frozenset("abc"), frozenset("c")))
    # r points at c, the other at a: they point away from each other
    assert not oracles.v_consistent([r, (frozenset("abc"), frozenset("a"))])
    assert oracles.v_consistent([r, (frozenset("a"), frozenset("abc"))])
