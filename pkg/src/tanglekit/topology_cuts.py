"""Basic open sets, clopen splits of the tangle space, distinguishers and finite cuts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import DomainError
from .gamma import GammaElement, realise
from .indexsets import IndexSet
from .inverse_system import critical_sets
from .presentation.components import components_minus
from .separations import OrientedSeparation, Selection
from .tangle_space import (EndTangle, Principal, UltrafilterBlock, Undetermined, concentrate, decides,
                           induced_ultrafilter, tangles)


@dataclass(frozen=True)
class Vertex:
    id: str


@dataclass(frozen=True)
class EdgePoint:
    u: str
    v: str
    t: Fraction = Fraction(1, 2)


@dataclass(frozen=True)
class TanglePoint:
    tangle: object


def _has_edge(p, u, v):
    normal = p.normal
    return v in normal.neighbours(u).finite or u in normal.neighbours(v).finite


def in_basic_open(p, pt, X, selection):
    """Membership in the basic open set ``O(X, C)``; tangles may answer Undetermined."""
    space = components_minus(p, X)
    if not isinstance(selection, Selection):
        from .separations import parse_selection
        selection = parse_selection(space, selection)

    def inside(v):
        return v not in space.deleted and selection.contains(*space.locate(v))

    if isinstance(pt, Vertex):
        p.normal.locate_vertex(pt.id)
        return inside(pt.id)
    if isinstance(pt, EdgePoint):
        t = Fraction(pt.t)
        if not 0 < t < 1:
            raise DomainError("inner edge points need 0 < t < 1")
        if not _has_edge(p, pt.u, pt.v):
            raise DomainError(f"{pt.u!r}-{pt.v!r} is not an edge")
        a, b = inside(pt.u), inside(pt.v)
        if a and b:
            return True
        # an edge between X and an inside vertex is in E(X, ⋃C)
        return (a and pt.v in space.deleted) or (b and pt.u in space.deleted)
    if isinstance(pt, TanglePoint):
        return decides(induced_ultrafilter(p, pt.tangle, X), selection)
    raise DomainError(f"unknown point {pt!r}")


# ---------------------------------------------------------------------------
# clopen bipartitions


@dataclass(frozen=True)
class Bipartition:
    gamma: GammaElement
    sides: tuple                  # (ref, side index | "undetermined" | "split")

    def to_json(self):
        return {"gamma": self.gamma.to_json(), "assignment": [{"tangle": r, "side": s} for r, s in self.sides]}


def clopen_bipartition(g, handles=None):
    """Side of each tangle handle (default: the enumerated ones) under a two-class partition."""
    if len(g.classes) != 2:
        raise DomainError("a clopen bipartition needs exactly two classes")
    p = g.presentation
    T = tangles(p, 0, 0)
    out = []
    for h in (T.handles() if handles is None else handles):
        if isinstance(h, EndTangle) and h.end.is_family:
            hit = [n for n, rs in enumerate(realise(g, T)) if any(r.source == h.ref for r in rs)]
            out.append((h.ref, hit[0] if len(hit) == 1 else "split"))
            continue
        got = concentrate(p, h, g.X, list(g.classes))
        out.append((h.ref, "undetermined" if isinstance(got, Undetermined) else got))
    return Bipartition(g, tuple(out))


# ---------------------------------------------------------------------------
# distinguishing tangles


@dataclass(frozen=True)
class Witness:
    separation: OrientedSeparation          # tau1 lives in s, tau2 in its inverse

    @property
    def X(self):
        return self.separation.separator

    def bipartition(self):
        s = self.separation
        return GammaElement.make(s.presentation, s.separator, [s.selection, s.inverse().selection])

    def to_json(self):
        s = self.separation
        return {"X": s.to_json()["X"], "first": s.selection.handles(s.space),
                "second": s.inverse().selection.handles(s.space)}


@dataclass(frozen=True)
class DistinguishResult:
    separable: bool
    witness: Witness | None = None
    reason: str = ""

    def to_json(self):
        if self.separable:
            return {"status": "separated", **self.witness.to_json()}
        return {"status": "not-separable", "reason": self.reason}


def _split(space, u1, u2):
    """A selection in u1 and not in u2, or None."""
    if isinstance(u1, Undetermined) or isinstance(u2, Undetermined):
        return None
    if isinstance(u1, Principal):
        if isinstance(u2, Principal) and (u1.key, u1.member) == (u2.key, u2.member):
            return None
        if u1.member is None:
            return Selection.make(space, [u1.key])
        return Selection.make(space, (), {u1.key: IndexSet.finite([u1.member])})
    if isinstance(u2, Principal):
        sel = _split(space, u2, u1)
        return sel.complement(space) if sel is not None else None
    if u1.key != u2.key:
        return Selection.make(space, (), {u1.key: space[u1.key].indices})
    if (u1.indices & u2.indices).is_finite():
        return Selection.make(space, (), {u1.key: u1.indices})
    return None


def _candidates(p, t1, t2, depth):
    seen = set()
    base = p.vertices(depth)
    for n in range(len(base) + 1):
        new = base[n - 1] if n else None
        pool = base[:n]
        for k in range(n + 1):
            for combo in itertools.combinations(pool, k):
                if new is not None and new not in combo:
                    continue
                X = frozenset(combo)
                if X not in seen:
                    seen.add(X)
                    yield X
    extra = [t.critical_set for t in (t1, t2) if isinstance(t, UltrafilterBlock)]
    extra += [cs.X for cs in critical_sets(p, 0).sets]
    extra.append(frozenset(p.normal.base))
    for X in sorted(extra, key=lambda X: (len(X), sorted(p.rank(v) for v in X))):
        if X not in seen:
            seen.add(X)
            yield X


def distinguish(p, t1, t2, depth=6):
    """The first separator in canonical order with t1 and t2 on opposite sides."""
    if t1 == t2:
        raise DomainError("identical tangles")
    for t in (t1, t2):
        if isinstance(t, EndTangle) and t.end.is_family:
            raise DomainError(f"{t.ref} is a family of ends; name a single end")
    for X in _candidates(p, t1, t2, depth):
        space = components_minus(p, X)
        u1, u2 = induced_ultrafilter(p, t1, X), induced_ultrafilter(p, t2, X)
        sel = _split(space, u1, u2)
        if sel is not None:
            s = OrientedSeparation(space, sel)
            got1, got2 = decides(u1, sel), decides(u2, sel)
            if got1 is True and got2 is False:
                return DistinguishResult(True, Witness(s))
    return DistinguishResult(False, None, "not separable at selector granularity")


# ---------------------------------------------------------------------------
# finite-cut equivalence


@dataclass(frozen=True)
class Cut:
    edges: tuple                  # crossing edges
    side: OrientedSeparation      # separator = endpoints of the cut edges, big side holds u's components
    part: frozenset               # endpoints on u's side

    def contains(self, v):
        """True iff v is on u's side."""
        s = self.side
        if v in s.separator:
            return v in self.part
        return s.selection.contains(*s.space.locate(v))

    def to_json(self):
        normal = self.side.space.normal
        return {"edges": [list(e) for e in self.edges], "size": len(self.edges),
                "uSide": {"separatorPart": sorted(self.part, key=normal.rank),
                          "components": self.side.selection.handles(self.side.space)}}


@dataclass(frozen=True)
class PathSchedule:
    """Pairwise edge-disjoint u-v paths, as many as requested."""

    u: str
    v: str
    hops: tuple                   # ((a, b, kind, gadget name), ...) along a route u = a0, ..., v

    def paths(self, k, p):
        out = []
        normal = p.normal
        for n in range(k):
            walk = [self.u]
            for h, (a, b, kind, name) in enumerate(self.hops):
                slot = n * len(self.hops) + h
                walk.extend(_hop(normal, a, b, kind, name, slot)[1:])
            out.append(_shortcut(walk))
        return out

    def to_json(self):
        return {"u": self.u, "v": self.v,
                "hops": [{"from": a, "to": b, "via": f"{kind}:{name}"} for a, b, kind, name in self.hops]}


def _hop(normal, a, b, kind, name, slot):
    if kind == "family":
        _, gad = normal.family_gadget(name)
        i = sorted(IndexSet.cofinite(gad.excluded).take(slot + 1))[slot]
        la = [lab for base, lab in gad.pattern if base == a][0]
        lb = [lab for base, lab in gad.pattern if base == b][0]
        inner = _template_path(gad.labels, gad.edges, la, lb)
        return [a] + [gad.fmt.format(i=i, label=lab) for lab in inner] + [b]
    gad = [g for g in normal.gadgets if g.kind == "chain" and g.name == name][0]
    j = gad.start + slot
    la = [lab for base, lab in gad.dominators if base == a][0]
    lb = [lab for base, lab in gad.dominators if base == b][0]
    inner = _template_path(gad.labels, gad.cell_edges, la, lb)
    return [a] + [gad.fmt.format(j=j, label=lab) for lab in inner] + [b]


def _template_path(labels, edges, a, b):
    g = nx.Graph()
    g.add_nodes_from(labels)
    g.add_edges_from(edges)
    return nx.shortest_path(g, a, b)


def _shortcut(walk):
    out = []
    pos = {}
    for x in walk:
        if x in pos:
            del out[pos[x] + 1:]
            pos = {y: i for i, y in enumerate(out)}
        else:
            pos[x] = len(out)
            out.append(x)
    return out


@dataclass(frozen=True)
class CutResult:
    verdict: str                  # "equivalent", "separated" or "unknown"
    cut: Cut | None = None
    schedule: PathSchedule | None = None
    lower_bound: int | None = None
    depth: int | None = None

    def to_json(self, p=None, paths=10):
        out = {"verdict": self.verdict}
        if self.cut is not None:
            out["cut"] = self.cut.to_json()
        if self.schedule is not None:
            out["schedule"] = self.schedule.to_json()
            if p is not None:
                out["paths"] = self.schedule.paths(paths, p)
        if self.lower_bound is not None:
            out["lowerBound"] = self.lower_bound
        if self.depth is not None:
            out["depth"] = self.depth
        return out


def _virtual_edges(normal):
    """Base vertex pairs joined by infinitely many edge-disjoint paths inside one gadget."""
    out = []
    for gad in normal.gadgets:
        if gad.kind == "chain":
            doms = sorted({b for b, _ in gad.dominators}, key=normal.rank)
            out += [(a, b, "chain", gad.name) for a, b in itertools.combinations(doms, 2)]
        elif gad.kind == "family" and not gad.member_infinite:
            pat = sorted(gad.pattern_set, key=normal.rank)
            out += [(a, b, "family", gad.name) for a, b in itertools.combinations(pat, 2)]
    return out


def _equivalence_schedule(p, u, v):
    normal = p.normal
    g = nx.Graph()
    for a, b, kind, name in _virtual_edges(normal):
        if not g.has_edge(a, b):
            g.add_edge(a, b, kind=kind, name=name)
    if u not in g or v not in g or not nx.has_path(g, u, v):
        return None
    route = nx.shortest_path(g, u, v)
    hops = tuple((a, b, g[a][b]["kind"], g[a][b]["name"]) for a, b in zip(route, route[1:]))
    return PathSchedule(u, v, hops)


_INF = float("inf")


def _network(p, depth):
    """The level at ``depth`` as a flow network: pieces contracted, infinite bundles uncuttable."""
    lvl = p.normal.level(depth)
    g = nx.Graph()
    g.add_nodes_from(lvl.core)

    def add(a, b, cap, real):
        if g.has_edge(a, b):
            g[a][b]["capacity"] += cap
            g[a][b]["real"].extend(real)
        else:
            g.add_edge(a, b, capacity=cap, real=list(real))

    for a, b in lvl.edges:
        add(a, b, 1, [(a, b)])
    for n, (_, pc) in enumerate(lvl.pieces):
        node = ("piece", n)
        g.add_node(node)
        for a, b in pc.attach:
            add(a, node, 1, [(a, b)])
        for d in pc.dominators:
            add(d, node, _INF, [])
    for n, (_, fp) in enumerate(lvl.families):
        node = ("family", n)
        for b in fp.pattern:
            add(b, node, _INF, [])
    return g


def _flow_graph(g):
    d = nx.DiGraph()
    for a, b, data in g.edges(data=True):
        cap = data["capacity"]
        d.add_edge(a, b, capacity=cap)
        d.add_edge(b, a, capacity=cap)
    return d


def _cut_witness(p, u, v, F):
    ends_ = frozenset(x for e in F for x in e)
    space = components_minus(p, ends_)
    parent = {x: x for x in ends_}
    parent.update({d.key: d.key for d in space.descriptors})

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    fset = {frozenset(e) for e in F}
    for x in ends_:
        for y in p.normal.neighbours(x).finite:
            if frozenset((x, y)) in fset:
                continue
            if y in ends_:
                union(x, y)
        for d in space.descriptors:
            if x in d.neighbourhood:
                union(x, d.key)

    def node(w):
        return w if w in ends_ else space.locate(w)[0]

    root = find(node(u))
    if find(node(v)) == root:
        return None
    part = {x for x in ends_ if find(x) == root}
    keys = [d.key for d in space.descriptors if find(d.key) == root]
    sel = Selection.make(space, [k for k in keys if not space[k].is_family],
                         {k: space[k].indices for k in keys if space[k].is_family})
    crossing = sorted((tuple(sorted(e, key=p.rank)) for e in fset if len(set(e) & part) == 1),
                      key=lambda e: (p.rank(e[0]), p.rank(e[1])))
    return Cut(tuple(crossing), OrientedSeparation(space, sel), frozenset(part))


def finite_cut_equivalent(p, u, v, effort=6):
    """Equivalent (unboundedly many edge-disjoint paths), Separated (a finite cut) or Unknown."""
    normal = p.normal
    normal.locate_vertex(u)
    normal.locate_vertex(v)
    if u == v:
        raise DomainError("u and v must differ")
    sched = _equivalence_schedule(p, u, v)
    if sched is not None:
        return CutResult("equivalent", schedule=sched)
    d0 = max(normal.rank(u), normal.rank(v)) + 1
    best_lower = 0
    for depth in range(d0, d0 + effort + 1):
        g = _network(p, depth)
        try:
            value, (S, _) = nx.minimum_cut(_flow_graph(g), u, v)
        except nx.NetworkXUnbounded:
            value = _INF
        core = p.normal.level(depth).core
        sub = _flow_graph(g.subgraph(core))
        if u in sub and v in sub:
            best_lower = max(best_lower, int(nx.maximum_flow_value(sub, u, v)))
        if value == _INF:
            continue
        F = []
        for a, b, data in g.edges(data=True):
            if (a in S) != (b in S):
                F.extend(data["real"])
        cut = _cut_witness(p, u, v, F)
        if cut is not None:
            return CutResult("separated", cut=cut, depth=depth)
    return CutResult("unknown", lower_bound=best_lower)
