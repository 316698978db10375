"""The presentation normal form: finite base graph plus gadgets.

Canonical enumeration: base vertices in base order, then the gadgets'
internal enumerations interleaved round robin. The first ``n`` vertices of
this enumeration form the canonical separator ``X_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DomainError, PresentationError
from .gadgets import Family, FamilyChain


@dataclass(frozen=True)
class Neighbours:
    finite: tuple
    families: tuple = ()      # descriptions of infinite neighbour families

    @property
    def infinite(self):
        return bool(self.families)


@dataclass
class Level:
    depth: int
    core: list
    edges: list
    pieces: list              # (gadget index, Piece)
    families: list            # (gadget index, FamilyPiece)
    tags: dict


@dataclass(frozen=True, eq=False)
class Normal:
    base: tuple
    edges: frozenset
    gadgets: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # enumeration --------------------------------------------------------

    @property
    def is_finite(self):
        return not self.gadgets

    def size(self):
        return len(self.base) if self.is_finite else None

    def vertex(self, rank):
        B, G = len(self.base), len(self.gadgets)
        if rank < 0:
            raise DomainError("ranks are non-negative")
        if rank < B:
            return self.base[rank]
        if not G:
            raise DomainError(f"rank {rank} exceeds the {B} vertices of a finite graph")
        t, g = divmod(rank - B, G)
        return self.gadgets[g].vertex(t)

    def _base_index(self):
        got = self._cache.get("base_index")
        if got is None:
            got = {v: i for i, v in enumerate(self.base)}
            self._cache["base_index"] = got
        return got

    def locate_vertex(self, vid):
        """(gadget index or None, internal rank or base position)."""
        if not isinstance(vid, str):
            raise DomainError(f"vertex ids are strings, got {vid!r}")
        idx = self._base_index()
        if vid in idx:
            return None, idx[vid]
        memo = self._cache.setdefault("located", {})
        if vid in memo:
            return memo[vid]
        for g, gadget in enumerate(self.gadgets):
            t = gadget.internal_rank(vid)
            if t is not None:
                memo[vid] = (g, t)
                return g, t
        raise DomainError(f"unknown vertex id {vid!r}")

    def rank(self, vid):
        g, t = self.locate_vertex(vid)
        if g is None:
            return t
        return len(self.base) + t * len(self.gadgets) + g

    def global_rank(self, g, t):
        return len(self.base) + t * len(self.gadgets) + g

    def has_vertex(self, vid):
        try:
            self.locate_vertex(vid)
        except DomainError:
            return False
        return True

    # adjacency ----------------------------------------------------------

    def _base_adj(self):
        got = self._cache.get("base_adj")
        if got is None:
            got = {v: set() for v in self.base}
            for e in self.edges:
                a, b = tuple(e)
                got[a].add(b)
                got[b].add(a)
            self._cache["base_adj"] = got
        return got

    def neighbours(self, vid):
        g, _ = self.locate_vertex(vid)
        if g is not None:
            return Neighbours(tuple(sorted(set(self.gadgets[g].neighbors(vid)), key=self.rank)))
        finite = set(self._base_adj()[vid])
        fams = []
        for h, gadget in enumerate(self.gadgets):
            fin, inf = gadget.base_links(vid)
            finite.update(fin)
            if inf:
                fams.append(self._family_label(h))
        return Neighbours(tuple(sorted(finite, key=self.rank)), tuple(fams))

    def _family_label(self, h):
        gadget = self.gadgets[h]
        if gadget.kind == "chain":
            labs = sorted({lab for _, lab in gadget.dominators})
            return {"gadget": gadget.name, "kind": "every cell", "labels": labs}
        return {"gadget": gadget.name, "kind": "every member"}

    def infinite_degree(self):
        got = self._cache.get("infdeg")
        if got is None:
            got = set()
            for gadget in self.gadgets:
                got |= gadget.infinite_degree_base()
            self._cache["infdeg"] = got
        return got

    # levels -------------------------------------------------------------

    def level(self, depth):
        """Core = the first ``max(depth, |base|)`` vertices."""
        B, G = len(self.base), len(self.gadgets)
        depth = max(depth, B)
        if G == 0:
            depth = B
        cache = self._cache.setdefault("levels", {})
        if depth in cache:
            return cache[depth]
        core = list(self.base)
        edges = [tuple(sorted(e)) for e in self.edges]
        pieces, families, tags = [], [], {}
        per = []
        for g, gadget in enumerate(self.gadgets):
            k = max(0, -(-(depth - B - g) // G))
            per.append(gadget.level(k))
        for g, p in enumerate(per):
            core.extend(p.core)
            edges.extend(p.edges)
            tags.update(p.tags)
            pieces.extend((g, pc) for pc in p.pieces)
            families.extend((g, fp) for fp in p.families)
        # gadget cores are not listed in rank order (chain families go member by member)
        core.sort(key=self.rank)
        lvl = Level(depth, core, edges, pieces, families, tags)
        cache[depth] = lvl
        return lvl

    def family_gadget(self, name):
        for g, gadget in enumerate(self.gadgets):
            if gadget.kind == "family" and gadget.name == name:
                return g, gadget
        raise DomainError(f"unknown family {name!r}")

    def families(self):
        return [(g, gad) for g, gad in enumerate(self.gadgets) if gad.kind == "family"]


# ---------------------------------------------------------------------------
# combinators


def make_normal(base, edges, gadgets):
    base = tuple(base)
    if len(set(base)) != len(base):
        raise PresentationError("duplicate vertex names")
    es = set()
    bset = set(base)
    for a, b in edges:
        if a == b:
            raise PresentationError(f"loop at {a!r}: presentations must be simple graphs")
        if a not in bset or b not in bset:
            raise PresentationError(f"edge {a!r}-{b!r} uses an unknown vertex")
        es.add(frozenset((a, b)))
    gadgets = tuple(gadgets)
    for g, gadget in enumerate(gadgets):
        for v in base:
            if gadget.internal_rank(v) is not None:
                raise PresentationError(f"vertex name {v!r} collides with a generated vertex")
        for h, other in enumerate(gadgets):
            if h != g:
                for t in range(4):
                    if other.internal_rank(gadget.vertex(t)) is not None:
                        raise PresentationError(
                            f"generated vertex {gadget.vertex(t)!r} is ambiguous; use distinct prefixes")
        for b in _attachments(gadget):
            if b not in bset:
                raise PresentationError(f"gadget {gadget.name!r} attaches to unknown vertex {b!r}")
    return Normal(base, frozenset(es), gadgets)


def _attachments(gadget):
    if gadget.kind == "chain":
        return {b for b, _ in gadget.head} | {b for b, _ in gadget.dominators}
    if gadget.kind == "family":
        return set(gadget.pattern_set)
    if gadget.kind == "grid":
        return {n for _, n in gadget.alias}
    if gadget.kind == "tree":
        return set() if gadget.head is None else {gadget.head}
    return set()


def disjoint_union(parts):
    base, edges, gadgets = [], [], []
    for n, part in enumerate(parts):
        p = f"{n}:"
        base.extend(p + v for v in part.base)
        edges.extend((p + a, p + b) for a, b in (tuple(e) for e in part.edges))
        gadgets.extend(g.prefixed(p) for g in part.gadgets)
    return make_normal(base, edges, gadgets)


def peel(normal, vid):
    """Move ``vid`` (and whatever its gadget needs to move with it) into the base."""
    if vid in set(normal.base):
        return normal
    g, _ = normal.locate_vertex(vid)
    new_base, new_edges, repl = normal.gadgets[g].peel(vid)
    gadgets = list(normal.gadgets[:g]) + list(repl) + list(normal.gadgets[g + 1:])
    edges = [tuple(e) for e in normal.edges] + list(new_edges)
    return make_normal(list(normal.base) + list(new_base), edges, gadgets)


def _wildcard_family(normal, text):
    for g, gadget in normal.families():
        if gadget.fmt.replace("{i}", "*") == text or gadget.name + "*" == text:
            return g, gadget
    raise PresentationError(f"no vertex family matches {text!r}")


def identify(normal, pairs):
    """Quotient by the given vertex pairs. A pair of wildcards ``"name*"``
    identifies two single-vertex families member by member."""
    vertex_pairs, family_pairs = [], []
    for a, b in pairs:
        if a.endswith("*") or b.endswith("*"):
            family_pairs.append((a, b))
        else:
            vertex_pairs.append((a, b))
    for a, b in family_pairs:
        normal = _identify_families(normal, a, b)
    for a, b in vertex_pairs:
        for v in (a, b):
            if not normal.has_vertex(v):
                raise PresentationError(f"Identify: unknown vertex {v!r}")
            normal = peel(normal, v)
    parent = {v: v for v in normal.base}
    order = {v: i for i, v in enumerate(normal.base)}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for a, b in vertex_pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if order[rb] < order[ra]:
            ra, rb = rb, ra
        parent[rb] = ra
    mapping = {v: find(v) for v in normal.base if find(v) != v}
    if not mapping:
        return normal
    base = [v for v in normal.base if v not in mapping]
    edges = set()
    for e in normal.edges:
        a, b = (mapping.get(x, x) for x in tuple(e))
        if a == b:
            raise PresentationError(f"Identify would create a loop at {a!r}")
        edges.add(frozenset((a, b)))
    gadgets = [gadget.rename(mapping) for gadget in normal.gadgets]
    return make_normal(base, [tuple(e) for e in edges], gadgets)


def _identify_families(normal, a, b):
    ga, fa = _wildcard_family(normal, a)
    gb, fb = _wildcard_family(normal, b)
    if ga == gb:
        raise PresentationError("Identify: a family cannot be identified with itself")
    if not (isinstance(fa, Family) and isinstance(fb, Family)) or len(fa.labels) != 1 or len(fb.labels) != 1:
        raise PresentationError("Identify: member-wise identification needs two single-vertex families")
    if fa.excluded != fb.excluded:
        raise PresentationError("Identify: member-wise identification needs equal member index sets")
    (la,) = fa.labels
    pattern = set(fa.pattern) | {(base, la) for base, _ in fb.pattern}
    if len({base for base, _ in pattern}) != len(pattern):
        raise PresentationError("Identify would create parallel edges")
    merged = Family(fa.name, fa.fmt, fa.labels, fa.edges, tuple(sorted(pattern)), fa.excluded)
    gadgets = [merged if g == ga else gad for g, gad in enumerate(normal.gadgets) if g != gb]
    return make_normal(normal.base, [tuple(e) for e in normal.edges], gadgets)


def attach_leaves(normal, vid, count):
    if not normal.has_vertex(vid):
        raise PresentationError(f"AttachLeaves: unknown vertex {vid!r}")
    normal = peel(normal, vid)
    base = list(normal.base)
    edges = [tuple(e) for e in normal.edges]
    gadgets = list(normal.gadgets)
    if count == "omega":
        fmt = vid.replace("{", "{{").replace("}", "}}") + ".leaf{i}"
        gadgets.append(Family(f"{vid}.leaf", fmt, ("x",), (), ((vid, "x"),)))
    else:
        for i in range(count):
            leaf = f"{vid}.leaf{i}"
            base.append(leaf)
            edges.append((vid, leaf))
    return make_normal(base, edges, gadgets)


__all__ = ["Normal", "Level", "Neighbours", "make_normal", "disjoint_union", "peel",
           "identify", "attach_leaves", "FamilyChain"]
