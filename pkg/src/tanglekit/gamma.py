"""Pairs (X, finite partition of the components of G - X) and their finite inverse limits."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import DomainError, UnsupportedPartition
from .indexsets import IndexSet
from .inverse_system import member_end
from .presentation.components import components_minus, image
from .separations import Selection, _contained, pull_back
from .tangle_space import EndTangle, concentrate, tangles


@dataclass(frozen=True, eq=False)
class GammaElement:
    space: object
    classes: tuple                # Selections, non-empty, pairwise disjoint, covering

    @classmethod
    def make(cls, p, X, classes):
        space = components_minus(p, X)
        classes = [c if isinstance(c, Selection) else _parse_class(space, c) for c in classes]
        g = cls(space, _canonical(space, classes))
        g.validate()
        return g

    @classmethod
    def trivial(cls, p, X):
        space = components_minus(p, X)
        sel = Selection.everything(space)
        return cls(space, () if sel.is_empty() else (sel,))

    @property
    def X(self):
        return self.space.deleted

    @property
    def presentation(self):
        return self.space.presentation

    def validate(self):
        space = self.space
        total = Selection()
        for c in self.classes:
            if c.is_empty():
                raise DomainError("partition classes must be non-empty")
            if not total.intersection(c, space).is_empty():
                raise DomainError("partition classes must be disjoint")
            total = total.union(c, space)
        if total != Selection.everything(space):
            raise DomainError("partition classes must cover the component space")

    @property
    def degenerate(self):
        """True when G - X is empty (the partition is empty)."""
        return self.space.is_empty

    def class_sizes(self):
        return [c.size(self.space) for c in self.classes]

    @property
    def in_gamma_prime(self):
        return all(s is None for s in self.class_sizes())

    def _key(self):
        return (self.X, self.classes)

    def __eq__(self, other):
        return isinstance(other, GammaElement) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def to_json(self):
        normal = self.space.normal
        return {"X": sorted(self.X, key=normal.rank),
                "classes": [c.handles(self.space) for c in self.classes],
                "gammaPrime": self.in_gamma_prime, "degenerate": self.degenerate}

    def __repr__(self):
        j = self.to_json()
        return f"Gamma({j['X']}, {j['classes']})"


def _parse_class(space, handles):
    from .separations import parse_selection
    return parse_selection(space, handles)


def _class_order(space, sel):
    normal = space.normal
    ranks = [normal.rank(space[k].min_vertex) for k in sel.explicit]
    for k, s in sel.families:
        ranks.append(normal.rank(space.member_vertex(space[k].family, s.min())))
    return min(ranks)


def _canonical(space, classes):
    return tuple(sorted(classes, key=lambda c: _class_order(space, c)))


def restrict_partition(g, X2):
    """``P ↾ X'``: preimages of the classes under the bonding map, empty ones dropped."""
    X2 = frozenset(X2)
    if not g.X <= X2:
        raise DomainError("restriction needs X(gamma) ⊆ X'")
    space = components_minus(g.presentation, X2)
    pulled = [pull_back(c, space, g.space) for c in g.classes]
    return GammaElement(space, _canonical(space, [c for c in pulled if not c.is_empty()]))


def refines(fine, coarse):
    """Every class of ``fine`` lies inside a class of ``coarse`` (same X)."""
    return all(any(_contained(c, d, fine.space) for d in coarse.classes) for c in fine.classes)


def gamma_le(g1, g2):
    if not g1.X <= g2.X:
        return False
    return refines(g2, restrict_partition(g1, g2.X))


def common_upper_bound(g1, g2):
    """Coarsest common refinement of both restrictions to X(g1) ∪ X(g2)."""
    Z = g1.X | g2.X
    r1, r2 = restrict_partition(g1, Z), restrict_partition(g2, Z)
    space = r1.space
    out = []
    for a in r1.classes:
        for b in r2.classes:
            c = a.intersection(b, space)
            if not c.is_empty():
                out.append(c)
    g = GammaElement(space, _canonical(space, out))
    try:
        g.validate()
    except DomainError as exc:
        raise UnsupportedPartition(f"common refinement is not representable: {exc}") from None
    return g


def to_gamma_prime(g):
    """Absorb every class with finitely many vertices into the separator."""
    extra = set()
    for c, size in zip(g.classes, g.class_sizes()):
        if size is not None:
            side = _vertices(g.space, c)
            extra |= side
    if not extra:
        return g
    return restrict_partition(g, g.X | extra)


def _vertices(space, sel):
    out = set()
    for k in sel.explicit:
        out |= space[k].vertices
    for k, s in sel.families:
        _, gad = space.normal.family_gadget(space[k].family)
        for i in s.elements():
            out |= set(gad.member_vertices(i))
    return out


def bonding_class(g_fine, g_coarse, n):
    """``f_{gamma', gamma}``: the index of the class of g_coarse holding class n of g_fine."""
    r = restrict_partition(g_coarse, g_fine.X)
    c = g_fine.classes[n]
    hits = [m for m, d in enumerate(r.classes) if _contained(c, d, g_fine.space)]
    if len(hits) != 1:
        raise DomainError(f"class {n} of {g_fine!r} does not lie in exactly one class of {g_coarse!r}")
    # r's classes are the non-empty pull-backs, matched back to g_coarse by the bonding map
    target = r.classes[hits[0]]
    for m, d in enumerate(g_coarse.classes):
        if pull_back(d, g_fine.space, g_coarse.space) == target:
            return m
    raise DomainError("restricted class has no source class")


# ---------------------------------------------------------------------------
# tangle projections


@dataclass(frozen=True)
class Realised:
    """A tangle, or a symbolic family of tangles, that projects onto one class."""

    label: str
    tangle: object = None
    source: str = ""              # ref of the handle or family it comes from


def realise(g, space_tangles=None):
    """For each class of g, the tangles (or tangle families) whose projection is that class."""
    p = g.presentation
    T = space_tangles or tangles(p, 0, 0)
    out = [[] for _ in g.classes]
    space = g.space

    def class_of(key, member=None):
        for n, c in enumerate(g.classes):
            if c.contains(key, member):
                return n
        raise DomainError(f"{key} is in no class")

    for e in T.ends.ends:
        out[class_of(*e.location(space))].append(Realised(e.ref, EndTangle(e), e.ref))
    for f in T.ends.families:
        if f.kind == "member-family":
            key = f"F:{f.family}"
            _, gad = p.normal.family_gadget(f.family)
            if key in space:
                dom = space[key].indices
                for n, c in enumerate(g.classes):
                    s = c.family_map.get(key)
                    if s is not None:
                        out[n].append(Realised(f"{f.ref}[{s}]", None, f.ref))
                touched = [i for i in range(max(dom.flips, default=-1) + 1)
                           if i not in dom and i not in gad.excluded]
            else:
                loc = space.family_location(f.family)
                out[class_of(*loc)].append(Realised(f"{f.ref}[untouched]", None, f.ref))
                touched = [i for i in range(_touch_bound(space, f.family)) if i not in gad.excluded]
            for i in touched:
                h = member_end(f, i)
                loc = space.end_location((f.family, i))
                out[class_of(*loc)].append(Realised(h.ref, EndTangle(h), f.ref))
        else:
            roots = {f.family}
            for n, c in enumerate(g.classes):
                if any(any(e.split("/")[0] in roots for e in space[k].ends) for k in c.explicit):
                    out[n].append(Realised(f"{f.ref}@{n}", None, f.ref))
    for b in T.blocks:
        Z = components_minus(p, g.X | b.critical_set)
        im = image(Z, b.key, space)
        if im.identity:
            for n, c in enumerate(g.classes):
                s = c.family_map.get(im.key)
                if s is not None and s.is_infinite():
                    out[n].append(Realised(f"block:{b.family}[{s}]", b.restrict(s), b.ref))
        else:
            out[class_of(im.key, im.member)].append(Realised(b.ref, b, b.ref))
    return out


def _touch_bound(space, family):
    lvl = space.normal.level(space.depth)
    for _, fp in lvl.families:
        if fp.family == family:
            _, gad = space.normal.family_gadget(family)
            return max(gad.outside_indices(fp.start), default=-1) + 1
    return 0


def project(g, tau):
    """``C(tau, gamma)``: the index of the class lying in U(tau, X(gamma))."""
    return concentrate(g.presentation, tau, g.X, list(g.classes))


@dataclass(frozen=True)
class SurjectivityReport:
    surjective: bool
    per_class: tuple              # labels of realised tangles per class
    failures: tuple

    def to_json(self):
        return {"surjective": self.surjective, "perClass": [list(x) for x in self.per_class],
                "failures": list(self.failures)}


def projection_surjectivity_check(g):
    if not g.in_gamma_prime:
        raise DomainError("surjectivity is only claimed on elements of Gamma'")
    got = realise(g)
    labels = tuple(tuple(r.label for r in rs) for rs in got)
    failures = tuple(n for n, rs in enumerate(got) if not rs)
    return SurjectivityReport(not failures, labels, failures)


# ---------------------------------------------------------------------------
# finite inverse limits


@dataclass(frozen=True)
class LimitResult:
    elements: tuple
    threads: tuple                # each a tuple of class indices, one per element
    annotations: tuple            # realised tangle labels per thread
    projections: int              # distinct thread tuples hit by tangles

    def to_json(self):
        return {"elements": [g.to_json() for g in self.elements],
                "threads": [{"classes": list(t), "tangles": list(a)}
                            for t, a in zip(self.threads, self.annotations)],
                "threadCount": len(self.threads), "distinctProjections": self.projections}


def close_under_bounds(elements, prime=False):
    """Close a finite set of elements under pairwise common upper bounds.

    With ``prime`` every element and every new bound is first lifted into Gamma'.
    """
    lift = to_gamma_prime if prime else (lambda g: g)
    out = list(dict.fromkeys(lift(g) for g in elements))
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(out), 2):
            if any(gamma_le(a, c) and gamma_le(b, c) for c in out):
                continue
            out.append(lift(common_upper_bound(a, b)))
            changed = True
    return out


def finite_inverse_limit(delta):
    delta = list(dict.fromkeys(delta))
    if not delta:
        return LimitResult((), ((),), ((),), 1)
    order = {(i, j): gamma_le(a, b) for i, a in enumerate(delta) for j, b in enumerate(delta)}
    for i, j in itertools.combinations(range(len(delta)), 2):
        if not any(order[i, k] and order[j, k] for k in range(len(delta))):
            raise DomainError(f"not directed: {delta[i]!r} and {delta[j]!r} have no upper bound in the set")
    top = [k for k in range(len(delta)) if all(order[i, k] for i in range(len(delta)))][0]
    # maps f between comparable pairs
    fmap = {}
    for i, j in order:
        if i != j and order[i, j]:
            fmap[j, i] = [bonding_class(delta[j], delta[i], n) for n in range(len(delta[j].classes))]
    # backtracking over compatible class choices
    threads = []

    def extend(prefix):
        k = len(prefix)
        if k == len(delta):
            threads.append(tuple(prefix))
            return
        for n in range(len(delta[k].classes)):
            ok = True
            for i in range(k):
                if (k, i) in fmap and fmap[k, i][n] != prefix[i]:
                    ok = False
                    break
                if (i, k) in fmap and fmap[i, k][prefix[i]] != n:
                    ok = False
                    break
            if ok:
                extend(prefix + [n])

    extend([])
    # tangles, realised at the largest element and pushed down
    realised = realise(delta[top])
    pushed = {}
    for n, rs in enumerate(realised):
        if not rs:
            continue
        t = tuple(n if i == top else fmap[top, i][n] for i in range(len(delta)))
        pushed[t] = tuple(r.label for r in rs)
    annotations = tuple(pushed.get(t, ()) for t in threads)
    return LimitResult(tuple(delta), tuple(threads), annotations, len(pushed))


# ---------------------------------------------------------------------------
# sampling


def _family_pieces(indices, rng):
    """Split an index set into selector-describable pieces."""
    m = rng.choice([1, 2, 3])
    pieces = [indices & IndexSet.residue(r, m) for r in range(m)]
    if rng.random() < 0.4:
        i = indices.take(3)[-1]
        pieces = [s - IndexSet.finite([i]) for s in pieces] + [IndexSet.finite([i])]
    return [s for s in pieces if not s.is_empty()]


def random_element(p, rng, depth=5, max_classes=3):
    """A random element with X ⊆ X_depth and at most ``max_classes`` classes."""
    base = p.vertices(depth)
    X = frozenset(v for v in base if rng.random() < 0.5)
    space = components_minus(p, X)
    atoms = [("e", d.key) for d in space.explicit]
    for d in space.families:
        atoms += [("f", d.key, s) for s in _family_pieces(d.indices, rng)]
    if not atoms:
        return GammaElement(space, ())
    k = rng.randint(1, min(max_classes, len(atoms)))
    buckets = [[] for _ in range(k)]
    order = list(atoms)
    rng.shuffle(order)
    for n, a in enumerate(order):
        buckets[n if n < k else rng.randrange(k)].append(a)
    classes = []
    for b in buckets:
        expl = [a[1] for a in b if a[0] == "e"]
        fams = {}
        for a in b:
            if a[0] == "f":
                fams[a[1]] = fams.get(a[1], IndexSet.empty()) | a[2]
        classes.append(Selection.make(space, expl, fams))
    return GammaElement(space, _canonical(space, classes))


def sample_elements(p, count, seed=0, depth=5):
    rng = random.Random(seed)
    return [random_element(p, rng, depth) for _ in range(count)]
