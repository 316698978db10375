import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from tanglekit.errors import DomainError
from tanglekit.indexsets import IndexSet
from tanglekit.presentation import Presentation, components_minus
from tanglekit.separations import (Selection, check_tangle_axioms, consistent, le, lt, parse_selection,
                                   sep_from_side, separations_at, star_and_interior)
from tanglekit.tangle_space import orient, resolve

K13 = Presentation.from_term({"kind": "Star", "size": 3})
PATH3 = Presentation.from_term({"kind": "Finite", "vertices": ["v0", "v1", "v2"],
                                "edges": [["v0", "v1"], ["v1", "v2"]]})


# sep_from_side


def test_ray_tail_separation():
    s = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    small = s.small_side()
    assert small.finite and small.vertices() == {"v0"}
    assert not s.big_side().finite
    assert s.to_json() == {"X": ["v0"], "bigSide": ["C:v1"]}


def test_star_empty_selection():
    s = sep_from_side(load("star_omega"), {"center"}, [])
    assert s.big_side().vertices() == {"center"}
    assert not s.small_side().finite


def test_path_split():
    s = sep_from_side(PATH3, {"v1"}, ["C:v2"])
    assert s.small_side().vertices() == {"v0", "v1"}
    assert s.big_side().vertices() == {"v1", "v2"}


def test_bad_selection_handle():
    with pytest.raises(DomainError):
        sep_from_side(load("ray"), {"v0"}, ["C:v7"])


def test_family_handles_round_trip():
    space = components_minus(load("star_omega"), {"center"})
    sel = parse_selection(space, ["F:leaf[evens]"])
    assert sel.handles(space) == ["F:leaf[evens]"]
    assert sel.complement(space).handles(space) == ["F:leaf[odds]"]
    assert parse_selection(space, ["F:leaf"]) == Selection.everything(space)


# le


def test_le_reflexive_example():
    s = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    assert le(s, s) and not lt(s, s)


def test_le_ray_nested_tails():
    ray = load("ray")
    s0 = sep_from_side(ray, {"v0"}, ["C:v1"])
    s1 = sep_from_side(ray, {"v0", "v1"}, ["C:v2"])
    # ({v0}, V) <= ({v0, v1}, {v1, v2, ...})
    assert le(s0, s1)
    assert not le(s1, s0)


def test_fixed_separator_law_on_k13():
    seps = separations_at(K13, frozenset({"center"}))
    assert len(seps) == 8
    for a, b in itertools.product(seps, repeat=2):
        assert le(a, b) == (set(b.selection.explicit) <= set(a.selection.explicit))


def test_le_across_presentations_is_an_error():
    a = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    b = sep_from_side(load("double_ray"), {"v0"}, [])
    with pytest.raises(DomainError):
        le(a, b)


# consistency


def test_singleton_is_consistent():
    s = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    assert consistent([s, s])


def test_ray_pointing_away():
    ray = load("ray")
    s0 = sep_from_side(ray, {"v0"}, ["C:v1"])
    s1 = sep_from_side(ray, {"v0", "v1"}, ["C:v2"])
    rep = consistent([s0.inverse(), s1])
    assert not rep
    r, t = rep.witness
    assert {r, t} == {s0.inverse(), s1}


def test_ray_end_orientation_is_consistent():
    ray = load("ray")
    end = resolve(ray, "end:ray")
    sample = [orient(ray, end, s) for k in range(4)
              for X in itertools.combinations(["v0", "v1", "v2"], k)
              for s in separations_at(ray, frozenset(X))]
    assert len(set(sample)) == 12
    assert consistent(sample)
    # the big side always holds the tail
    assert all(s.in_big_side("v9") for s in sample)


# stars and interiors


def test_singleton_star():
    s = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    rep = star_and_interior([s])
    assert rep.is_star and not rep.interior_finite


def test_complementary_family_split_has_finite_interior():
    star = load("star_omega")
    a = sep_from_side(star, {"center"}, ["F:leaf[~{0}]"])
    b = sep_from_side(star, {"center"}, ["F:leaf[{0}]"])
    rep = star_and_interior([a, b])
    assert rep.is_star and rep.interior_finite
    assert rep.interior.vertices() == {"center"}


def test_empty_star_needs_presentation():
    with pytest.raises(DomainError):
        star_and_interior([])
    rep = star_and_interior([], load("ray"))
    assert rep.is_star and not rep.interior_finite


def test_nested_pair_is_not_a_star():
    ray = load("ray")
    s0 = sep_from_side(ray, {"v0"}, ["C:v1"])                 # ({v0}, V)
    s2 = sep_from_side(ray, {"v1"}, ["C:v2"])                 # ({v0, v1}, {v1, v2, ...})
    assert not star_and_interior([s0, s2]).is_star
    # ({v0}, V) and ({v0, v1}, V) do point towards each other
    assert star_and_interior([s0, sep_from_side(ray, {"v0", "v1"}, ["C:v2"])]).is_star


# tangle axiom refuter


def test_ray_end_sample_passes_axioms():
    ray = load("ray")
    end = resolve(ray, "end:ray")
    sample = [orient(ray, end, s) for k in range(4) for X in itertools.combinations(ray.vertices(3), k)
              for s in separations_at(ray, frozenset(X))]
    rep = check_tangle_axioms(sample, 3)
    assert rep.passed and not rep.certifies


def _toward_center(s):
    V = K13.vertices(10)
    def score(t):
        B = [v for v in V if t.in_big_side(v)]
        A = [v for v in V if t.in_small_side(v)]
        return ("center" in B and "center" not in A, len(B) - len(A), sorted(B))
    return max([s, s.inverse()], key=score)


def test_finite_star_has_a_finite_interior_star():
    seen, sample = set(), []
    V = K13.vertices(10)
    for k in range(len(V) + 1):
        for X in itertools.combinations(V, k):
            for s in separations_at(K13, frozenset(X)):
                if s in seen or s == s.inverse():
                    continue
                seen |= {s, s.inverse()}
                sample.append(_toward_center(s))
    rep = check_tangle_axioms(sample, 3)
    assert rep.consistent and not rep.passed
    assert star_and_interior(list(rep.violating_star)).interior_finite


def test_empty_sample_passes():
    assert check_tangle_axioms([]).passed


def test_both_orientations_rejected():
    s = sep_from_side(load("ray"), {"v0"}, ["C:v1"])
    with pytest.raises(DomainError):
        check_tangle_axioms([s, s.inverse()])


# order laws on infinite presentations, checked against vertex membership on a truncation

ATOM_KINDS = ["ray", "star_omega", "dominated_ray", "spider_omega", "comb", "theta_omega", "grid"]
TRUNC = 120


def _atoms(d):
    out = [IndexSet.empty(), d.indices, IndexSet.finite([d.indices.min()]),
           d.indices & IndexSet.residue(0, 2), d.indices & IndexSet.residue(1, 2)]
    return list(dict.fromkeys(out))


_POOL = {}


def pool(kind):
    if kind not in _POOL:
        p = load(kind)
        seps = [s for k in range(4) for X in itertools.combinations(p.vertices(3), k)
                for s in separations_at(p, frozenset(X), _atoms)]
        _POOL[kind] = (p, seps, p.vertices(TRUNC))
    return _POOL[kind]


def truncated_le(a, b, verts):
    """A ⊆ C and B ⊇ D, restricted to the truncation."""
    return all((not a.in_small_side(v) or b.in_small_side(v)) and (not b.in_big_side(v) or a.in_big_side(v))
               for v in verts)


@st.composite
def pairs(draw, n=2):
    kind = draw(st.sampled_from(ATOM_KINDS))
    p, seps, verts = pool(kind)
    picks = [draw(st.sampled_from(seps)) for _ in range(n)]
    return verts, picks


@settings(max_examples=300, deadline=None)
@given(pairs())
def test_le_matches_truncated_vertex_sets(case):
    verts, (a, b) = case
    assert le(a, b) == truncated_le(a, b, verts)


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_inversion_reverses_order(case):
    _, (a, b) = case
    assert a.inverse().inverse() == a
    assert le(a, b) == le(b.inverse(), a.inverse())


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_antisymmetry(case):
    _, (a, b) = case
    if le(a, b) and le(b, a):
        assert a == b


@settings(max_examples=300, deadline=None)
@given(pairs(3))
def test_transitivity(case):
    _, (a, b, c) = case
    if le(a, b) and le(b, c):
        assert le(a, c)


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_fixed_separator_law(case):
    _, (a, b) = case
    if a.separator == b.separator:
        contained = all(s.issubset(a.selection.family_map.get(k, IndexSet.empty()))
                        for k, s in b.selection.families)
        assert le(a, b) == (set(b.selection.explicit) <= set(a.selection.explicit) and contained)


@settings(max_examples=200, deadline=None)
@given(pairs(3))
def test_consistency_is_pairwise(case):
    _, S = case
    want = all(consistent([r, t]) for r, t in itertools.combinations(S, 2))
    assert bool(consistent(S)) == want
