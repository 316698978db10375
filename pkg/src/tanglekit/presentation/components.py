"""Exact component analysis of G - X for finite X.

Components are computed on a level whose core contains X (and the whole
base). Outside pieces are connected and untouched by X, so a union-find
over core vertices, pieces and family blocks is exact. Results do not depend
on the level used: explicit components are keyed by their lowest-rank
vertex and every untouched family member is folded back into its family.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DomainError
from ..indexsets import IndexSet


@dataclass(frozen=True)
class ComponentDescriptor:
    key: str
    kind: str                       # "finite", "infinite" or "family"
    neighbourhood: frozenset        # per-member neighbourhood for families
    min_vertex: str | None = None
    vertices: frozenset | None = None
    degree_bounded: bool | None = None
    family: str | None = None
    indices: IndexSet | None = None
    member_size: int | None = None  # None when members are infinite
    ends: tuple = ()

    @property
    def is_family(self):
        return self.kind == "family"

    @property
    def infinite(self):
        return self.kind != "finite"

    @property
    def size(self):
        return len(self.vertices) if self.kind == "finite" else None

    def to_json(self):
        out = {"key": self.key, "kind": self.kind,
               "neighbourhood": sorted(self.neighbourhood)}
        if self.kind == "finite":
            out["vertices"] = sorted(self.vertices)
        if self.kind == "infinite":
            out["minVertex"] = self.min_vertex
            out["degreeBounded"] = self.degree_bounded
        if self.kind == "family":
            out["family"] = self.family
            out["indices"] = str(self.indices)
            out["memberSize"] = self.member_size if self.member_size is not None else "infinite"
        if self.ends:
            out["ends"] = list(self.ends)
        return out


@dataclass
class _Group:
    vertices: list
    pieces: list
    families: list
    member: tuple | None = None
    min_rank: int = 0


@dataclass
class _Analysis:
    groups: list
    vertex_group: dict
    separated: list                 # (gadget index, FamilyPiece) with pattern inside X
    absorbed: dict                  # family name -> set of pristine member indices
    piece_group: dict               # id(piece) -> group index
    family_group: dict              # family name -> group index (pattern not inside X)


def _analyse(normal, X, depth):
    cache = normal._cache.setdefault("analyses", {})
    ck = (X, depth)
    if ck in cache:
        return cache[ck]
    lvl = normal.level(depth)
    parent = {}

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for v in lvl.core:
        if v not in X:
            parent[("v", v)] = ("v", v)
    for n, _ in enumerate(lvl.pieces):
        parent[("p", n)] = ("p", n)
    separated = []
    for n, (g, fp) in enumerate(lvl.families):
        if fp.pattern <= X:
            separated.append((g, fp))
        else:
            parent[("f", n)] = ("f", n)
    for a, b in lvl.edges:
        if a not in X and b not in X:
            union(("v", a), ("v", b))
    for n, (_, pc) in enumerate(lvl.pieces):
        for a, _b in pc.attach:
            if a not in X:
                union(("p", n), ("v", a))
        for d in pc.dominators:
            if d not in X:
                union(("p", n), ("v", d))
    for n, (_, fp) in enumerate(lvl.families):
        if not fp.pattern <= X:
            for b in fp.pattern:
                if b not in X:
                    union(("f", n), ("v", b))
    buckets = {}
    for node in parent:
        buckets.setdefault(find(node), []).append(node)
    tag_total = {}
    for v, tag in lvl.tags.items():
        tag_total[tag] = tag_total.get(tag, 0) + 1
    for _, pc in lvl.pieces:
        if pc.member:
            tag_total[pc.member] = tag_total.get(pc.member, 0) + 1
    groups, vertex_group, piece_group, family_group = [], {}, {}, {}
    absorbed = {}
    pos = {v: normal.rank(v) for v in lvl.core}
    sep_names = {fp.family for _, fp in separated}
    for nodes in buckets.values():
        verts = sorted((n[1] for n in nodes if n[0] == "v"), key=pos.get)
        pieces = [n[1] for n in nodes if n[0] == "p"]
        fams = [n[1] for n in nodes if n[0] == "f"]
        tags = {lvl.tags.get(v) for v in verts} | {lvl.pieces[n][1].member for n in pieces}
        member = None
        if not fams and len(tags) == 1:
            (tag,) = tags
            if tag is not None and tag[0] in sep_names and tag_total[tag] == len(verts) + len(pieces):
                member = tag
        ranks = [pos[v] for v in verts]
        ranks += [normal.global_rank(lvl.pieces[n][0], lvl.pieces[n][1].min_rank) for n in pieces]
        ranks += [normal.global_rank(lvl.families[n][0], lvl.families[n][1].min_rank) for n in fams]
        grp = _Group(verts, pieces, fams, member, min(ranks))
        if member:
            absorbed.setdefault(member[0], set()).add(member[1])
        gi = len(groups)
        groups.append(grp)
        for v in verts:
            vertex_group[v] = gi
        for n in pieces:
            piece_group[n] = gi
        for n in fams:
            family_group[lvl.families[n][1].family] = gi
    groups_sorted = sorted(range(len(groups)), key=lambda i: groups[i].min_rank)
    remap = {old: new for new, old in enumerate(groups_sorted)}
    groups = [groups[i] for i in groups_sorted]
    vertex_group = {v: remap[i] for v, i in vertex_group.items()}
    piece_group = {n: remap[i] for n, i in piece_group.items()}
    family_group = {f: remap[i] for f, i in family_group.items()}
    result = _Analysis(groups, vertex_group, separated, absorbed, piece_group, family_group)
    cache[ck] = result
    return result


class ComponentSpace:
    """The components of G - X: explicit descriptors plus symbolic families."""

    def __init__(self, presentation, deleted):
        self.presentation = presentation
        normal = presentation.normal
        X = frozenset(deleted)
        for v in X:
            normal.locate_vertex(v)
        self.deleted = X
        self.depth = max([normal.rank(v) + 1 for v in X] + [len(normal.base)])
        self._build()

    @property
    def normal(self):
        return self.presentation.normal

    def _adjacency_to_X(self, lvl):
        adj = {}
        for a, b in lvl.edges:
            if b in self.deleted:
                adj.setdefault(a, set()).add(b)
            if a in self.deleted:
                adj.setdefault(b, set()).add(a)
        return adj

    def _build(self):
        normal = self.normal
        X = self.deleted
        an = _analyse(normal, X, self.depth)
        lvl = normal.level(self.depth)
        toX = self._adjacency_to_X(lvl)
        infdeg = normal.infinite_degree()
        explicit, families = [], []
        self._group_key = {}
        for gi, grp in enumerate(an.groups):
            if grp.member:
                self._group_key[gi] = (f"F:{grp.member[0]}", grp.member[1])
                continue
            nb = set()
            for v in grp.vertices:
                nb |= toX.get(v, set())
            ends = []
            infinite = False
            extra = []
            for n in grp.pieces:
                _, pc = lvl.pieces[n]
                nb |= {a for a, _ in pc.attach if a in X}
                nb |= pc.dominators & X
                if pc.infinite:
                    infinite = True
                    if pc.end:
                        ends.append(pc.end)
                else:
                    extra.extend(pc.vertices)
            for n in grp.families:
                _, fp = lvl.families[n]
                nb |= fp.pattern & X
                infinite = True
                g, gad = normal.family_gadget(fp.family)
                if gad.member_infinite:
                    ends.append(f"{fp.family}*")
            min_vertex = normal.vertex(grp.min_rank)
            key = f"C:{min_vertex}"
            self._group_key[gi] = (key, None)
            if infinite:
                explicit.append(ComponentDescriptor(
                    key, "infinite", frozenset(nb), min_vertex,
                    degree_bounded=not (set(grp.vertices) & infdeg) and not grp.families,
                    ends=tuple(sorted(set(ends)))))
            else:
                verts = frozenset(grp.vertices) | frozenset(extra)
                explicit.append(ComponentDescriptor(key, "finite", frozenset(nb), min_vertex, verts))
        for g, fp in an.separated:
            gad = normal.gadgets[g]
            outside_not = gad.outside_indices(fp.start) - an.absorbed.get(fp.family, set())
            indices = IndexSet.cofinite(outside_not)
            families.append(ComponentDescriptor(
                f"F:{fp.family}", "family", frozenset(fp.pattern),
                family=fp.family, indices=indices,
                member_size=None if gad.member_infinite else len(gad.labels),
                ends=(f"{fp.family}*",) if gad.member_infinite else ()))
        self.explicit = explicit
        self.families = families
        self._by_key = {d.key: d for d in explicit + families}
        self._analysis = an

    # queries ------------------------------------------------------------

    @property
    def descriptors(self):
        return self.explicit + self.families

    @property
    def keys(self):
        return [d.key for d in self.descriptors]

    def __getitem__(self, key):
        try:
            return self._by_key[key]
        except KeyError:
            raise DomainError(f"{key!r} is not a component of G - {sorted(self.deleted)}") from None

    def __contains__(self, key):
        return key in self._by_key

    @property
    def summary(self):
        return {"finite": sum(1 for d in self.explicit if d.kind == "finite"),
                "infinite": sum(1 for d in self.explicit if d.kind == "infinite"),
                "families": len(self.families)}

    @property
    def is_empty(self):
        return not self.explicit and not self.families

    def locate(self, v):
        """(descriptor key, member index or None) of the component holding v."""
        normal = self.normal
        if v in self.deleted:
            raise DomainError(f"{v!r} lies in the deleted set")
        depth = max(self.depth, normal.rank(v) + 1)
        # any level at or beyond self.depth gives the same answer, so reuse the deepest one seen
        deep = getattr(self, "_deep", None)
        if deep is None or deep[0] < depth:
            if deep is not None:
                depth = max(depth, 2 * deep[0])
            deep = self._deep = (depth, _analyse(normal, self.deleted, depth))
        an = deep[1]
        grp = an.groups[an.vertex_group[v]]
        if grp.member:
            return f"F:{grp.member[0]}", grp.member[1]
        return f"C:{normal.vertex(grp.min_rank)}", None

    def family_location(self, family):
        """Where all untouched members of a family live."""
        key = f"F:{family}"
        if key in self._by_key:
            return key, None
        an = self._analysis
        gi = an.family_group[family]
        return self._group_key[gi]

    def end_location(self, end):
        """Component holding the tail of a chain or grid end, or of a member end ``(family, i)``."""
        normal = self.normal
        if isinstance(end, tuple):
            fam, i = end
            g, gad = normal.family_gadget(fam)
            desc = self._by_key.get(f"F:{fam}")
            if desc is not None and i in desc.indices:
                return desc.key, i
            end_id = f"{fam}{i}"
        else:
            end_id = end
        lvl = normal.level(self.depth)
        for n, (_, pc) in enumerate(lvl.pieces):
            if pc.end == end_id:
                return self._group_key[self._analysis.piece_group[n]]
        if isinstance(end, tuple):
            g, gad = normal.family_gadget(end[0])
            if end[1] not in gad.excluded:
                return self.family_location(end[0])
        raise DomainError(f"no end {end!r} in this presentation")

    def vertices_of(self, key, limit):
        """The first ``limit`` vertices (rank order) of a descriptor; for checks."""
        d = self[key]
        if d.kind == "finite":
            return sorted(d.vertices, key=self.normal.rank)[:limit]
        out = []
        r = 0
        normal = self.normal
        while len(out) < limit:
            v = normal.vertex(r)
            r += 1
            if v in self.deleted:
                continue
            k, _ = self.locate(v)
            if k == key:
                out.append(v)
        return out

    def member_vertex(self, family, i):
        """A vertex of member i of a family (the first template vertex)."""
        _, gad = self.normal.family_gadget(family)
        if gad.member_infinite:
            return gad.member_chain(i).vertex(0)
        return gad.member_vertices(i)[0]

    def to_json(self):
        return {"deleted": sorted(self.deleted, key=self.normal.rank),
                "explicit": [d.to_json() for d in self.explicit],
                "families": [d.to_json() for d in self.families],
                "summary": self.summary}


def components_minus(p, X):
    """The component space of p - X."""
    cache = p.normal._cache.setdefault("spaces", {})
    X = frozenset(X)
    got = cache.get(X)
    if got is None:
        got = ComponentSpace(p, X)
        cache[X] = got
    return got


@dataclass(frozen=True)
class Image:
    """Where a descriptor goes under the bonding map ``c_{X', X}``.

    ``identity`` means a family mapped member by member onto the family ``key``;
    otherwise the whole descriptor lands in the single component ``(key, member)``.
    """

    key: str
    member: int | None = None
    identity: bool = False


def image(src, key, dst):
    """Image of descriptor ``key`` of ``src`` (deleted X') in ``dst`` (deleted X ⊆ X')."""
    if not dst.deleted <= src.deleted:
        raise DomainError("bonding maps need nested separators")
    d = src[key]
    if d.is_family:
        if d.key in dst:
            return Image(d.key, identity=True)
        v = src.member_vertex(d.family, d.indices.min())
        return Image(*dst.locate(v))
    return Image(*dst.locate(d.min_vertex))
