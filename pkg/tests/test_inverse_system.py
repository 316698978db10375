import itertools
import random

import pytest

import oracles
from conftest import BUILTINS, load
from tanglekit.errors import DomainError
from tanglekit.inverse_system import (bonding, critical_sets, dominates, ends, resolve_end,
                                      thread_prefixes)
from tanglekit.presentation import components_minus, exhaustion

LOCALLY_FINITE = ["ray", "double_ray", "grid", "binary_tree", "comb"]


# bonding maps


@pytest.mark.parametrize("name", BUILTINS)
def test_bonding_maps_compose(name):
    p = load(name)
    rng = random.Random(name)
    base = p.vertices(8)
    triples = [(0, 2, 5), (1, 4, 8), (0, 0, 3), (2, 3, 3)]
    for _ in range(6):
        triples.append(tuple(sorted(rng.sample(range(9), 3))))
    for a, b, c in triples:
        X, X1, X2 = map(frozenset, (base[:a], base[:b], base[:c]))
        f21, f10, f20 = bonding(p, X1, X2), bonding(p, X, X1), bonding(p, X, X2)
        src = components_minus(p, X2)
        for d in src.descriptors:
            members = [None] if not d.is_family else d.indices.take(3)
            for m in members:
                assert f10(*f21(d.key, m)) == f20(d.key, m), (name, a, b, c, d.key, m)


def test_bonding_needs_nested_sets():
    with pytest.raises(DomainError):
        bonding(load("ray"), {"v1"}, {"v0"})


def test_identity_bonding():
    p = load("star_omega")
    f = bonding(p, {"center"}, {"center"})
    assert f("F:leaf", 4) == ("F:leaf", 4)


# ends


def test_end_counts():
    assert ends(load("ray")).count == 1
    assert ends(load("star_omega")).count == 0
    assert ends(load("double_ray")).count == 2
    assert ends(load("dominated_ray")).count == 1
    assert ends(load("spider_3")).count == 3
    sp = ends(load("spider_omega"))
    assert sp.count == "omega" and [f.kind for f in sp.families] == ["member-family"]
    bt = ends(load("binary_tree"))
    assert bt.count == "continuum" and bt.families[0].kind == "tree"


def test_binary_tree_prefixes():
    p = load("binary_tree")
    counts = thread_prefixes(p, 31)
    # X_n is the first n vertices breadth-first; the full levels give 2^d prefixes
    for d in range(1, 6):
        assert counts[2 ** d - 1] == 2 ** d
    assert counts[:7] == [1, 2, 3, 4, 5, 6, 7]


@pytest.mark.parametrize("kind", LOCALLY_FINITE + ["dominated_ray"])
def test_thread_prefixes_match_bfs(kind):
    # infinite components of G - X_n are the BFS components that reach the truncation frontier
    p = load(kind)
    outer = exhaustion(p, 500)
    adj = oracles.induced_graph(kind, outer.vertices)
    inner = set(p.vertices(250))
    frontier = {v for v in inner if adj[v] - inner}
    inner_adj = {v: adj[v] & inner for v in inner}
    counts = thread_prefixes(p, 8)
    for n in range(9):
        comps = oracles.components(inner_adj, p.canonical(n))
        want = sum(1 for c in comps if c & frontier)
        assert counts[n] == want, (kind, n)


@pytest.mark.parametrize("name", ["ray", "double_ray", "dominated_ray", "comb", "grid", "spider_3"])
def test_threads_are_compatible(name):
    p = load(name)
    for h in ends(p).ends:
        thread = h.thread(p, 8)
        for n in range(1, 9):
            f = bonding(p, p.canonical(n - 1), p.canonical(n))
            assert f(*thread[n]) == thread[n - 1]


def test_spider_member_threads():
    p = load("spider_omega")
    for i in (0, 1, 4):
        h = resolve_end(p, f"end:leg{i}")
        thread = h.thread(p, 10)
        for n in range(1, 11):
            f = bonding(p, p.canonical(n - 1), p.canonical(n))
            assert f(*thread[n]) == thread[n - 1]


def test_end_references():
    p = load("double_ray")
    refs = [h.ref for h in ends(p).ends]
    assert refs == ["end:ray+", "end:ray-"]
    assert resolve_end(p, "end:0").ref == "end:ray+"
    assert resolve_end(p, "end:1").ref == "end:ray-"
    with pytest.raises(DomainError):
        resolve_end(p, "end:2")
    with pytest.raises(DomainError):
        resolve_end(load("spider_omega"), "end:arm3")


# critical sets


def test_critical_examples():
    assert critical_sets(load("ray"), 6).sets == ()
    star = critical_sets(load("star_omega"), 2)
    assert [set(c.X) for c in star.sets] == [{"center"}]
    assert critical_sets(load("dominated_ray"), 6).sets == ()
    assert [set(c.X) for c in critical_sets(load("theta_omega"), 2).sets] == [{"u", "v"}]
    assert [set(c.X) for c in critical_sets(load("spider_omega"), 3).sets] == [{"body"}]


@pytest.mark.parametrize("kind", ["ray", "double_ray", "grid", "binary_tree"])
def test_locally_finite_have_no_critical_sets(kind):
    for bound in range(7):
        res = critical_sets(load(kind), bound)
        assert res.sets == () and res.searched == 2 ** bound and res.complete


def test_critical_set_needs_infinite_degree():
    # brute force: a critical set is adjacent to infinitely many components, so one of its vertices has
    # infinitely many neighbours
    for name in BUILTINS:
        p = load(name)
        infinite_degree = p.normal.infinite_degree()
        for c in critical_sets(p, 4).sets:
            assert c.X & infinite_degree


def test_critical_set_found_beyond_the_bound():
    # the attachment pattern is checked even when it lies outside X_bound
    res = critical_sets(load("ray_plus_star"), 0)
    assert [set(c.X) for c in res.sets] == [{"1:center"}]


# domination


def test_dominating_vertex():
    p = load("dominated_ray")
    end = resolve_end(p, "end:ray")
    assert dominates(p, "c", end).dominates


def _check_witness(p, kind, v, end, X):
    # none of v's neighbours (by the name oracle) lies in C(X, end)
    assert v not in X
    space = components_minus(p, X)
    loc = end.location(space)
    nbrs = [u for u in exhaustion(p, 200).vertices if oracles.adjacent(kind, v, u)]
    assert nbrs
    assert all(space.locate(u) != loc for u in nbrs if u not in X)


def test_ray_start_does_not_dominate():
    p = load("ray")
    end = resolve_end(p, "end:ray")
    got = dominates(p, "v0", end)
    assert not got.dominates
    _check_witness(p, "ray", "v0", end, got.witness)


@pytest.mark.parametrize("v", ["(0,0)", "(2,1)", "(3,3)"])
def test_grid_vertices_do_not_dominate(v):
    p = load("grid")
    end = resolve_end(p, "end:grid")
    got = dominates(p, v, end)
    assert not got.dominates
    _check_witness(p, "grid", v, end, got.witness)


def test_domination_of_end_families_is_false():
    p = load("spider_omega")
    fam = ends(p).families[0]
    assert not dominates(p, "body", fam).dominates
