"""Finite-order separations built from component data.

A separation ``s_{X->C}`` is stored as its separator X plus a selection of
components of G - X; the sides are ``A = V - V[C]`` and ``B = X | V[C]``.
Infinite sides are never enumerated: comparisons go through the component
space of the union of the two separators.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import DomainError
from .indexsets import IndexSet, parse_index_set
from .presentation.components import components_minus, image


@dataclass(frozen=True)
class Selection:
    """A set of components of G - X: explicit keys plus index sets of family members."""

    explicit: frozenset = frozenset()
    families: tuple = ()          # sorted ((family key, IndexSet), ...), no empty sets

    @classmethod
    def make(cls, space, explicit=(), families=None):
        explicit = frozenset(explicit)
        for k in explicit:
            if k not in space or space[k].is_family:
                raise DomainError(f"{k!r} is not an explicit component of G - {sorted(space.deleted)}")
        fams = {}
        for k, s in (families or {}).items():
            if k not in space or not space[k].is_family:
                raise DomainError(f"{k!r} is not a component family of G - {sorted(space.deleted)}")
            s = s & space[k].indices
            if not s.is_empty():
                fams[k] = s
        return cls(explicit, tuple(sorted(fams.items(), key=lambda kv: kv[0])))

    @classmethod
    def everything(cls, space):
        return cls.make(space, [d.key for d in space.explicit],
                        {d.key: d.indices for d in space.families})

    @classmethod
    def nothing(cls):
        return cls()

    @property
    def family_map(self):
        return dict(self.families)

    def contains(self, key, member=None):
        if member is None:
            return key in self.explicit
        got = self.family_map.get(key)
        return got is not None and member in got

    def complement(self, space):
        return Selection.make(space, {d.key for d in space.explicit} - self.explicit,
                              {d.key: d.indices - self.family_map.get(d.key, IndexSet.empty())
                               for d in space.families})

    def union(self, other, space):
        a, b = self.family_map, other.family_map
        return Selection.make(space, self.explicit | other.explicit,
                              {k: a.get(k, IndexSet.empty()) | b.get(k, IndexSet.empty()) for k in set(a) | set(b)})

    def intersection(self, other, space):
        a, b = self.family_map, other.family_map
        return Selection.make(space, self.explicit & other.explicit,
                              {k: a[k] & b[k] for k in set(a) & set(b)})

    def is_empty(self):
        return not self.explicit and not self.families

    def size(self, space):
        """Number of vertices in V[C], or None when infinite."""
        total = 0
        for k in self.explicit:
            d = space[k]
            if d.infinite:
                return None
            total += d.size
        for k, s in self.families:
            d = space[k]
            if s.is_infinite() or d.member_size is None:
                return None
            total += len(s.elements()) * d.member_size
        return total

    def handles(self, space):
        out = sorted(self.explicit, key=lambda k: space.normal.rank(space[k].min_vertex))
        for k, s in self.families:
            out.append(k if s == space[k].indices else f"{k}[{s}]")
        return out


_HANDLE = re.compile(r"^(F:.+?)\[(.*)\]$")


def parse_selection(space, handles):
    """Inverse of :meth:`Selection.handles`."""
    explicit, fams = [], {}
    for h in handles:
        m = _HANDLE.match(h)
        if m:
            fams[m.group(1)] = fams.get(m.group(1), IndexSet.empty()) | parse_index_set(m.group(2))
        elif h.startswith("F:"):
            if h not in space:
                raise DomainError(f"unknown component family {h!r}")
            fams[h] = space[h].indices
        else:
            explicit.append(h)
    return Selection.make(space, explicit, fams)


@dataclass(frozen=True, eq=False)
class OrientedSeparation:
    """``(A, B) = (V - V[C], X | V[C])`` for a selection C of components of G - X."""

    space: object = field(repr=False)
    selection: Selection

    @property
    def separator(self):
        return self.space.deleted

    @property
    def presentation(self):
        return self.space.presentation

    def inverse(self):
        return OrientedSeparation(self.space, self.selection.complement(self.space))

    def same_underlying(self, other):
        return self == other or self == other.inverse()

    def _key(self):
        return (id(self.space.presentation), self.space.deleted, self.selection)

    def __eq__(self, other):
        return isinstance(other, OrientedSeparation) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key()[1:])

    def big_side(self):
        return SideDescription.of(self.space, self.separator, self.selection)

    def small_side(self):
        inv = self.selection.complement(self.space)
        return SideDescription.of(self.space, self.separator, inv)

    def in_big_side(self, v):
        if v in self.separator:
            return True
        return self.selection.contains(*self.space.locate(v))

    def in_small_side(self, v):
        if v in self.separator:
            return True
        return not self.selection.contains(*self.space.locate(v))

    def to_json(self):
        normal = self.space.normal
        return {"X": sorted(self.separator, key=normal.rank),
                "bigSide": self.selection.handles(self.space)}

    def __repr__(self):
        body = self.to_json()
        return f"s({body['X']} -> {body['bigSide']})"


@dataclass(frozen=True)
class SideDescription:
    """``S | V[K]`` with S a subset of the separator Z and K a selection of components of G - Z."""

    separator_part: frozenset
    space: object = field(repr=False, compare=False)
    selection: Selection = Selection()
    cardinality: int | None = None       # None = countably infinite

    @classmethod
    def of(cls, space, part, selection):
        size = selection.size(space)
        return cls(frozenset(part), space, selection, None if size is None else size + len(part))

    @property
    def finite(self):
        return self.cardinality is not None

    def contains(self, v):
        if v in self.space.deleted:
            return v in self.separator_part
        return self.selection.contains(*self.space.locate(v))

    def vertices(self):
        """Explicit vertex set of a finite side."""
        if not self.finite:
            raise DomainError("the side is infinite")
        out = set(self.separator_part)
        for k in self.selection.explicit:
            out |= self.space[k].vertices
        for k, s in self.selection.families:
            for i in s.elements():
                out |= set(self.space.presentation.normal.family_gadget(k[2:])[1].member_vertices(i))
        return frozenset(out)

    def to_json(self):
        normal = self.space.normal
        return {"separatorPart": sorted(self.separator_part, key=normal.rank),
                "components": self.selection.handles(self.space),
                "cardinality": self.cardinality if self.finite else "countably-infinite"}


def sep_from_side(p, X, selection):
    """``s_{X->C}``; ``selection`` is a :class:`Selection` or a list of handles."""
    space = components_minus(p, X)
    if not isinstance(selection, Selection):
        selection = parse_selection(space, selection)
    else:
        Selection.make(space, selection.explicit, selection.family_map)
    return OrientedSeparation(space, selection)


def pull_back(selection, src, dst):
    """The selection of components of ``src`` (deleted Z) lying inside ``V[selection]`` of ``dst``."""
    explicit, fams = [], {}
    for d in src.explicit:
        im = image(src, d.key, dst)
        if selection.contains(im.key, im.member):
            explicit.append(d.key)
    smap = selection.family_map
    for d in src.families:
        im = image(src, d.key, dst)
        if im.identity:
            got = d.indices & smap.get(im.key, IndexSet.empty())
        else:
            got = d.indices if selection.contains(im.key, im.member) else IndexSet.empty()
        fams[d.key] = got
    return Selection.make(src, explicit, fams)


def _contained(sel_sub, sel_sup, space):
    if not sel_sub.explicit <= sel_sup.explicit:
        return False
    sup = sel_sup.family_map
    return all(s.issubset(sup.get(k, IndexSet.empty())) for k, s in sel_sub.families)


def le(a, b):
    """``(A,B) <= (C,D)`` iff A ⊆ C and B ⊇ D."""
    if a.presentation is not b.presentation:
        raise DomainError("separations from different presentations")
    if a == b:
        return True
    X, Y = a.separator, b.separator
    if X == Y:
        return _contained(b.selection, a.selection, a.space)
    Z = components_minus(a.presentation, X | Y)
    # V[D] ⊆ V[C]: no vertex of X - Y in V[D], and components of G - Z inside V[D] lie inside V[C]
    for x in X - Y:
        if b.selection.contains(*b.space.locate(x)):
            return False
    for y in Y - X:
        if not a.selection.contains(*a.space.locate(y)):
            return False
    return _contained(pull_back(b.selection, Z, b.space), pull_back(a.selection, Z, a.space), Z)


def lt(a, b):
    return a != b and le(a, b)


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    witness: tuple | None = None    # (r, t) in S with inverse(r) < t

    def __bool__(self):
        return self.consistent


def consistent(S):
    """No two separations in S pointing away from each other."""
    S = list(dict.fromkeys(S))
    for r in S:
        inv = r.inverse()
        for t in S:
            if t.same_underlying(r):
                continue
            if lt(inv, t):
                return ConsistencyReport(False, (r, t))
    return ConsistencyReport(True)


def interior(sigma):
    """Intersection of the big sides as a :class:`SideDescription`."""
    sigma = list(sigma)
    if not sigma:
        raise DomainError("the interior of the empty star is V; pass a presentation-level query instead")
    p = sigma[0].presentation
    Z = frozenset().union(*(s.separator for s in sigma))
    space = components_minus(p, Z)
    part = {z for z in Z if all(s.in_big_side(z) for s in sigma)}
    sel = Selection.everything(space)
    for s in sigma:
        sel = sel.intersection(pull_back(s.selection, space, s.space), space)
    return SideDescription.of(space, part, sel)


@dataclass(frozen=True)
class StarReport:
    is_star: bool
    interior: SideDescription | None
    interior_finite: bool


def is_star(sigma):
    sigma = list(dict.fromkeys(sigma))
    return all(le(r, s.inverse()) for r, s in itertools.permutations(sigma, 2))


def star_and_interior(sigma, p=None):
    """Star test plus the exact interior. For empty ``sigma`` pass ``p``; the interior is V."""
    sigma = list(dict.fromkeys(sigma))
    if not sigma:
        if p is None:
            raise DomainError("an empty star needs its presentation")
        space = components_minus(p, frozenset())
        side = SideDescription.of(space, frozenset(), Selection.everything(space))
        return StarReport(True, side, side.finite)
    side = interior(sigma)
    return StarReport(is_star(sigma), side, side.finite)


@dataclass(frozen=True)
class TangleAxiomReport:
    consistent: bool
    consistency_witness: tuple | None
    violating_star: tuple | None
    star_cap: int
    checked_stars: int
    certifies: bool = False   # a finite sample can refute tangle-hood, never certify it

    @property
    def passed(self):
        return self.consistent and self.violating_star is None

    def to_json(self):
        return {"consistent": self.consistent,
                "consistencyWitness": None if self.consistency_witness is None
                else [s.to_json() for s in self.consistency_witness],
                "violatingStar": None if self.violating_star is None
                else [s.to_json() for s in self.violating_star],
                "starCap": self.star_cap, "checkedStars": self.checked_stars,
                "certifies": False,
                "note": "refutation only: stars larger than the cap and separations outside the sample are not checked"}


def check_tangle_axioms(sample, star_cap=3):
    """Look for an inconsistency or a star of finite interior (of size <= cap) in ``sample``."""
    sample = list(dict.fromkeys(sample))
    for r, t in itertools.combinations(sample, 2):
        if r == t.inverse():
            raise DomainError(f"both orientations of {r!r} are in the sample")
    rep = consistent(sample)
    if not rep:
        return TangleAxiomReport(False, rep.witness, None, star_cap, 0)
    # stars are the cliques of the pairwise relation r <= inverse(s)
    n = len(sample)
    inv = [s.inverse() for s in sample]
    compat = [set() for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        if le(sample[i], inv[j]):
            compat[i].add(j)
            compat[j].add(i)
    checked = 0
    stack = [((i,), compat[i]) for i in range(n)]
    while stack:
        clique, cand = stack.pop()
        checked += 1
        sigma = [sample[i] for i in clique]
        if interior(sigma).finite:
            return TangleAxiomReport(True, None, tuple(sigma), star_cap, checked)
        if len(clique) < star_cap:
            for j in sorted(c for c in cand if c > clique[-1]):
                stack.append((clique + (j,), cand & compat[j]))
    return TangleAxiomReport(True, None, None, star_cap, checked)


def separations_at(p, X, atoms=None):
    """All oriented separations with separator X.

    Explicit components are chosen freely; a family contributes the index
    sets returned by ``atoms(descriptor)`` (default: none and all).
    """
    space = components_minus(p, X)
    expl = [d.key for d in space.explicit]
    fam_choices = []
    for d in space.families:
        opts = atoms(d) if atoms else [IndexSet.empty(), d.indices]
        fam_choices.append([(d.key, s) for s in opts])
    out = []
    for bits in itertools.product((False, True), repeat=len(expl)):
        chosen = [k for k, b in zip(expl, bits) if b]
        for fams in itertools.product(*fam_choices):
            out.append(OrientedSeparation(space, Selection.make(space, chosen, dict(fams))))
    return out
