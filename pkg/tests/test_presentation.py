import itertools
import json

import pytest

import oracles
from conftest import BUILTINS, ORACLE_KINDS, PRESENTATIONS, load, term
from tanglekit.errors import DomainError, PresentationError
from tanglekit.presentation import OMEGA, Presentation, adjacency, components_minus, exhaustion
from tanglekit.presentation.components import image


def P(doc):
    return Presentation.from_term(doc)


# adjacency and exhaustion


def test_ray_adjacency():
    assert set(adjacency(load("ray"), "v3").finite) == {"v2", "v4"}
    assert set(adjacency(load("ray"), "v0").finite) == {"v1"}


def test_star_center_has_a_leaf_family():
    nb = adjacency(load("star_omega"), "center")
    assert nb.finite == () and nb.infinite
    assert nb.families[0]["gadget"] == "leaf"


def test_dominating_vertex_neighbours_deduplicated():
    nb = adjacency(load("dominated_ray"), "c")
    # v0 is a member of the family, so it is not listed again
    assert nb.finite == () and len(nb.families) == 1


def test_exhaustion_examples():
    ray = load("ray")
    assert exhaustion(ray, 0).vertices == () and exhaustion(ray, 0).separator == frozenset()
    ex = exhaustion(ray, 3)
    assert ex.vertices == ("v0", "v1", "v2")
    assert set(ex.edges) == {("v0", "v1"), ("v1", "v2")}
    g = exhaustion(load("grid"), 4)
    assert g.vertices == ("(0,0)", "(0,1)", "(1,0)", "(0,2)")
    assert set(g.edges) == {("(0,0)", "(0,1)"), ("(0,0)", "(1,0)"), ("(0,1)", "(0,2)")}


@pytest.mark.parametrize("kind", ORACLE_KINDS)
def test_exhaustion_matches_name_oracle(kind):
    ex = exhaustion(load(kind), 60)
    assert len(set(ex.vertices)) == 60
    assert oracles.graph_from_edges(ex.vertices, ex.edges) == oracles.induced_graph(kind, ex.vertices)


@pytest.mark.parametrize("kind", ORACLE_KINDS)
def test_rank_order_is_prefix_stable(kind):
    p = load(kind)
    long = p.vertices(50)
    assert p.vertices(20) == long[:20]
    assert [p.rank(v) for v in long] == list(range(50))
    assert [p.vertex(r) for r in range(50)] == long


# components_minus worked examples


def test_ray_minus_v0():
    space = components_minus(load("ray"), {"v0"})
    (d,) = space.descriptors
    assert d.kind == "infinite" and d.neighbourhood == {"v0"} and d.key == "C:v1"


def test_star_minus_center():
    space = components_minus(load("star_omega"), {"center"})
    (d,) = space.descriptors
    assert d.is_family and d.neighbourhood == {"center"} and d.member_size == 1
    assert str(d.indices) == "all"


def test_dominated_ray_minus_c_v3():
    space = components_minus(load("dominated_ray"), {"c", "v3"})
    fin = [d for d in space.descriptors if d.kind == "finite"]
    inf = [d for d in space.descriptors if d.kind == "infinite"]
    assert len(fin) == 1 and len(inf) == 1 and len(space.descriptors) == 2
    assert fin[0].vertices == {"v0", "v1", "v2"} and fin[0].neighbourhood == {"c", "v3"}
    assert inf[0].neighbourhood == {"c", "v3"} and inf[0].min_vertex == "v4"


def test_empty_deletion_of_connected_graph():
    for kind in ORACLE_KINDS:
        assert len(components_minus(load(kind), set()).descriptors) == 1


def test_spider_body_and_first_leg_vertex():
    space = components_minus(load("spider_omega"), {"body", "leg0.0"})
    fam = [d for d in space.descriptors if d.is_family]
    assert len(fam) == 1 and str(fam[0].indices) == "~{0}"
    tails = [d for d in space.descriptors if d.kind == "infinite"]
    assert len(tails) == 1 and tails[0].neighbourhood == {"leg0.0"}


def test_theta_minus_both_hubs():
    space = components_minus(load("theta_omega"), {"u", "v"})
    (d,) = space.descriptors
    assert d.is_family and d.neighbourhood == {"u", "v"}


def test_unknown_vertex_is_a_domain_error():
    with pytest.raises(DomainError):
        components_minus(load("ray"), {"w7"})


# brute force on truncations

OUTER = 400
SUBSET_POOL = 5



@pytest.mark.parametrize("kind", ORACLE_KINDS)
def test_components_agree_with_bfs_on_truncations(kind):
    p = load(kind)
    outer = exhaustion(p, OUTER)
    adj = oracles.induced_graph(kind, outer.vertices)
    inner = set(p.vertices(40))
    # inner vertices with a neighbour outside the inner truncation
    frontier = {v for v in inner if adj[v] - inner}
    inner_adj = {v: adj[v] & inner for v in inner}
    probe = p.vertices(14)
    for k in range(SUBSET_POOL + 1):
        for X in itertools.combinations(p.vertices(SUBSET_POOL), k):
            X = frozenset(X)
            space = components_minus(p, X)
            comps = oracles.components(inner_adj, X)
            # finite components clear of the frontier are reported exactly
            for c in comps:
                if c & frontier:
                    continue
                key, member = space.locate(min(c, key=p.rank))
                d = space[key]
                if d.is_family:
                    assert member in d.indices
                    _, gad = p.normal.family_gadget(d.family)
                    assert set(gad.member_vertices(member)) == c
                    assert oracles.neighbourhood(adj, c) == d.neighbourhood
                else:
                    assert d.kind == "finite" and d.vertices == c, (kind, sorted(X))
                    assert d.neighbourhood == oracles.neighbourhood(adj, c)
            for d in space.explicit:
                if d.kind == "finite":
                    assert d.vertices in comps and not d.vertices & frontier
            # connectivity among low-rank vertices, both directions
            outer_comps = oracles.components(adj, X)
            where = {v: n for n, c in enumerate(outer_comps) for v in c}
            pts = [v for v in probe if v not in X]
            for a, b in itertools.combinations(pts, 2):
                same = space.locate(a) == space.locate(b)
                assert same == (where[a] == where[b]), (kind, sorted(X), a, b)


@pytest.mark.parametrize("kind", ORACLE_KINDS)
def test_monotone_refinement(kind):
    p = load(kind)
    probe = p.vertices(16)
    for n, m in [(0, 2), (1, 3), (2, 5), (3, 6), (1, 6)]:
        X, X2 = p.canonical(n), p.canonical(m)
        src, dst = components_minus(p, X2), components_minus(p, X)
        for d in src.descriptors:
            im = image(src, d.key, dst)
            assert im.key in dst
        for v in probe:
            if v in X2:
                continue
            key, member = src.locate(v)
            im = image(src, key, dst)
            want = (im.key, member) if im.identity else (im.key, im.member)
            assert dst.locate(v) == want


@pytest.mark.parametrize("name", BUILTINS)
def test_descriptors_are_deterministic(name):
    a = Presentation.load(PRESENTATIONS / f"{name}.json")
    b = Presentation.from_term(term(name))
    for n in range(5):
        assert components_minus(a, a.canonical(n)).to_json() == components_minus(b, b.canonical(n)).to_json()
    assert a.digest == b.digest


# the file format


def test_every_builtin_file_parses():
    for name in BUILTINS:
        p = load(name)
        assert p.kind == term(name)["kind"]


def test_finite_star_and_spider():
    assert len(P({"kind": "Star", "size": 5}).vertices(100)) == 6
    s = P({"kind": "Spider", "legs": 3})
    assert len(components_minus(s, {"body"}).descriptors) == 3


def test_counts_accept_omega_literal():
    assert OMEGA == "omega"
    P({"kind": "AttachLeaves", "of": {"kind": "Ray"}, "vertex": "v2", "count": OMEGA})


def test_disjoint_union_prefixes():
    p = P({"kind": "DisjointUnion", "parts": [{"kind": "Ray"}, {"kind": "Ray"}]})
    assert set(p.vertices(4)) == {"0:v0", "1:v0", "0:v1", "1:v1"}
    assert len(components_minus(p, set()).descriptors) == 2


def test_identify_two_vertices():
    p = P({"kind": "Identify", "of": {"kind": "Finite", "vertices": ["a", "b", "c"],
                                       "edges": [["a", "b"], ["b", "c"]]}, "pairs": [["a", "c"]]})
    assert len(exhaustion(p, 10).vertices) == 2


@pytest.mark.parametrize("doc, fragment", [
    ({"kind": "Nope"}, "unknown constructor"),
    ({"kind": "Star"}, "Star size"),
    ({"kind": "Star", "size": -2}, "Star size"),
    ({"kind": "Spider", "legs": True}, "Spider legs"),
    ({"kind": "Finite", "edges": [["a"]]}, "pairs"),
    ({"kind": "DisjointUnion", "parts": []}, "non-empty"),
    ({"kind": "AttachLeaves", "of": {"kind": "Ray"}, "vertex": "zz", "count": 2}, "unknown vertex"),
    ({"kind": "Identify", "of": {"kind": "Finite", "vertices": ["a", "b"], "edges": [["a", "b"]]},
      "pairs": [["a", "b"]]}, "loop"),
    ([1, 2], "kind"),
])
def test_rejected_documents(doc, fragment):
    with pytest.raises(PresentationError) as exc:
        P(doc)
    assert fragment in str(exc.value)
    assert exc.value.path is not None


def test_nested_error_path():
    with pytest.raises(PresentationError) as exc:
        P({"kind": "DisjointUnion", "parts": [{"kind": "Ray"}, {"kind": "Star", "size": "lots"}]})
    assert exc.value.path == "$.parts[1].size"


def test_syntax_error_has_line_and_column():
    with pytest.raises(PresentationError) as exc:
        Presentation.from_json('{"kind":\n  "Ray",,}')
    assert (exc.value.line, exc.value.column) == (2, 9)


def test_schema_document_lists_every_constructor():
    text = (PRESENTATIONS.parent / "docs" / "presentation-schema.md").read_text()
    for kind in ["Ray", "DoubleRay", "Star", "Spider", "DominatedRay", "Comb", "Grid", "BinaryTree",
                 "Finite", "DisjointUnion", "Identify", "AttachLeaves"]:
        assert f"`{kind}`" in text
    # the examples in the document are valid presentations
    blocks = text.split("```json")[1:]
    for b in blocks:
        P(json.loads(b.split("```")[0]))
