"""Infinite building blocks of the presentation normal form.

A normal form is a finite *base* graph plus finitely many *gadgets*. Gadgets
are pairwise non-adjacent and meet the base only through explicitly listed
attachment edges, so deleting a finite set of base/core vertices never cuts
into the part of a gadget that lies beyond its current level.

Every gadget enumerates its own vertices (internal rank 0, 1, ...) and, for
each ``k``, describes what remains once its first ``k`` vertices are moved
into the core: finitely many :class:`Piece` objects (each connected) and at
most one :class:`FamilyPiece` (infinitely many pairwise disjoint copies of a
template, all attached to the same base vertices).
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field, replace

from ..errors import DomainError


@dataclass(frozen=True)
class Piece:
    attach: tuple                 # finite edges (inside vertex, outside vertex)
    dominators: frozenset         # base vertices with infinitely many edges into the piece
    infinite: bool
    vertices: tuple               # explicit vertex list for finite pieces
    min_rank: int                 # gadget-internal rank of the lowest vertex
    member: tuple | None = None   # (family name, index) when part of a family member
    end: str | None = None        # end id of the end living in this piece
    end_kind: str | None = None   # "chain", "grid", "member" or "tree"


@dataclass(frozen=True)
class FamilyPiece:
    family: str
    start: int                    # ordinal of the first member outside the core
    pattern: frozenset            # base vertices every member attaches to
    min_rank: int


@dataclass
class GadgetLevel:
    core: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    tags: dict = field(default_factory=dict)
    pieces: list = field(default_factory=list)
    families: list = field(default_factory=list)


def _esc(text):
    return text.replace("{", "{{").replace("}", "}}")


_FIELD = re.compile(r"\{(label|j|i|x|y|w)\}")


@functools.lru_cache(maxsize=None)
def _fmt_regex(fmt, labels=()):
    out = []
    pos = 0
    for m in _FIELD.finditer(fmt):
        out.append(re.escape(fmt[pos:m.start()].replace("{{", "{").replace("}}", "}")))
        name = m.group(1)
        if name == "label":
            alts = sorted(labels, key=len, reverse=True)
            out.append("(?P<label>" + "|".join(re.escape(a) for a in alts) + ")")
        elif name == "w":
            out.append("(?P<w>[01]*)")
        else:
            out.append(f"(?P<{name}>0|[1-9][0-9]*)")
        pos = m.end()
    out.append(re.escape(fmt[pos:].replace("{{", "{").replace("}}", "}")))
    return re.compile("^" + "".join(out) + "$")


def _components(nodes, edges):
    parent = {n: n for n in nodes}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    return list(groups.values())


def _ordinal_index(excluded, o):
    """The o-th natural number not in ``excluded``."""
    i = o
    for e in sorted(excluded):
        if e <= i:
            i += 1
        else:
            break
    return i


def _index_ordinal(excluded, i):
    return i - sum(1 for e in excluded if e < i)


def _diag(t):
    s = (math.isqrt(8 * t + 1) - 1) // 2
    a = t - s * (s + 1) // 2
    return a, s - a


def _undiag(a, b):
    s = a + b
    return s * (s + 1) // 2 + a


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """Cells ``start, start+1, ...``, each a copy of a connected template,
    consecutive cells joined by ``links``. Rays, combs and legs are chains."""

    name: str
    fmt: str
    labels: tuple
    cell_edges: tuple = ()
    links: tuple = ()
    start: int = 0
    head: tuple = ()          # (base vertex, label) edges into cell ``start``
    dominators: tuple = ()    # (base vertex, label) edges into every cell
    tag: tuple | None = None

    kind = "chain"

    @property
    def end_id(self):
        return f"{self.tag[0]}{self.tag[1]}" if self.tag else self.name

    @property
    def end_kind(self):
        return "member" if self.tag else "chain"

    def _id(self, j, label):
        return self.fmt.format(label=label, j=j)

    def vertex(self, t):
        c = len(self.labels)
        return self._id(self.start + t // c, self.labels[t % c])

    def _parse(self, vid):
        m = _fmt_regex(self.fmt, self.labels).match(vid)
        if not m:
            return None
        label = m.groupdict().get("label") or self.labels[0]
        j = int(m.group("j"))
        if j < self.start or label not in self.labels:
            return None
        return j, label

    def internal_rank(self, vid):
        got = self._parse(vid)
        if got is None:
            return None
        j, label = got
        return (j - self.start) * len(self.labels) + self.labels.index(label)

    def _cell_neighbors(self, j, label):
        out = []
        for a, b in self.cell_edges:
            if a == label:
                out.append(self._id(j, b))
            elif b == label:
                out.append(self._id(j, a))
        for a, b in self.links:
            if a == label:
                out.append(self._id(j + 1, b))
            if b == label and j > self.start:
                out.append(self._id(j - 1, a))
        if j == self.start:
            out.extend(base for base, lab in self.head if lab == label)
        out.extend(base for base, lab in self.dominators if lab == label)
        return out

    def neighbors(self, vid):
        j, label = self._parse(vid)
        return self._cell_neighbors(j, label)

    def base_links(self, b):
        finite = [self._id(self.start, lab) for base, lab in self.head if base == b]
        infinite = any(base == b for base, _ in self.dominators)
        return finite, infinite

    def infinite_degree_base(self):
        return {b for b, _ in self.dominators}

    def level(self, k):
        out = GadgetLevel()
        c = len(self.labels)
        doms = frozenset(b for b, _ in self.dominators)
        if k == 0:
            attach = tuple((b, self._id(self.start, lab)) for b, lab in self.head)
            out.pieces.append(Piece(attach, doms, True, (), 0, self.tag, self.end_id, self.end_kind))
            return out
        q, r = divmod(k, c)
        for t in range(k):
            vid = self.vertex(t)
            out.core.append(vid)
            if self.tag:
                out.tags[vid] = self.tag
        core = set(out.core)
        seen = set()
        for t in range(k):
            j, label = self.start + t // c, self.labels[t % c]
            me = self._id(j, label)
            for nb in self._cell_neighbors(j, label):
                if nb in core or self.internal_rank(nb) is None:
                    e = frozenset((me, nb))
                    if e not in seen:
                        seen.add(e)
                        out.edges.append((me, nb))
        jp = self.start + q
        if r:
            rest = self.labels[r:]
            core_labels = set(self.labels[:r])
            nodes = list(rest) + ["<tail>"]
            edges = [(a, b) for a, b in self.cell_edges if a in rest and b in rest]
            edges += [(a, "<tail>") for a, _ in self.links if a in rest]
            for group in _components(nodes, edges):
                attach = []
                dom = set()
                tail = "<tail>" in group
                verts = [lab for lab in self.labels if lab in group]
                for lab in verts:
                    vid = self._id(jp, lab)
                    for a, b in self.cell_edges:
                        if a == lab and b in core_labels:
                            attach.append((self._id(jp, b), vid))
                        elif b == lab and a in core_labels:
                            attach.append((self._id(jp, a), vid))
                    for a, b in self.links:
                        if b == lab:
                            src = self._id(jp - 1, a) if jp > self.start else None
                            if src is not None:
                                attach.append((src, vid))
                    if jp == self.start:
                        attach.extend((base, vid) for base, l2 in self.head if l2 == lab)
                    attach.extend((base, vid) for base, l2 in self.dominators if l2 == lab)
                if tail:
                    for a, b in self.links:
                        if a in core_labels:
                            attach.append((self._id(jp, a), self._id(jp + 1, b)))
                    dom = doms
                min_rank = min([q * c + self.labels.index(lab) for lab in verts]
                               + ([(q + 1) * c] if tail else []))
                out.pieces.append(Piece(
                    tuple(attach), frozenset(dom), tail,
                    () if tail else tuple(self._id(jp, lab) for lab in verts),
                    min_rank, self.tag,
                    self.end_id if tail else None, self.end_kind if tail else None))
        else:
            attach = tuple((self._id(jp - 1, a), self._id(jp, b)) for a, b in self.links)
            out.pieces.append(Piece(attach, doms, True, (), q * c, self.tag, self.end_id, self.end_kind))
        return out

    def peel(self, vid):
        j0, _ = self._parse(vid)
        base, edges = [], []
        for j in range(self.start, j0 + 1):
            for lab in self.labels:
                base.append(self._id(j, lab))
            for a, b in self.cell_edges:
                edges.append((self._id(j, a), self._id(j, b)))
            if j < j0:
                for a, b in self.links:
                    edges.append((self._id(j, a), self._id(j + 1, b)))
            for d, lab in self.dominators:
                edges.append((d, self._id(j, lab)))
        for h, lab in self.head:
            edges.append((h, self._id(self.start, lab)))
        rest = replace(self, start=j0 + 1,
                       head=tuple((self._id(j0, a), b) for a, b in self.links), tag=None,
                       name=self.end_id)
        return base, edges, [rest]

    def rename(self, mapping):
        return replace(self,
                       head=tuple((mapping.get(b, b), lab) for b, lab in self.head),
                       dominators=tuple(sorted(set((mapping.get(b, b), lab) for b, lab in self.dominators))))

    def prefixed(self, p):
        return replace(self, name=p + self.name, fmt=_esc(p) + self.fmt,
                       head=tuple((p + b, lab) for b, lab in self.head),
                       dominators=tuple((p + b, lab) for b, lab in self.dominators),
                       tag=(p + self.tag[0], self.tag[1]) if self.tag else None)


@dataclass(frozen=True)
class Family:
    """Infinitely many disjoint copies of a finite connected template,
    member ``i`` attached to the base by ``pattern``."""

    name: str
    fmt: str
    labels: tuple
    edges: tuple = ()
    pattern: tuple = ()
    excluded: frozenset = frozenset()

    kind = "family"
    member_infinite = False

    @property
    def pattern_set(self):
        return frozenset(b for b, _ in self.pattern)

    def member_vertices(self, i):
        return [self.fmt.format(i=i, label=lab) for lab in self.labels]

    def vertex(self, t):
        c = len(self.labels)
        o, r = divmod(t, c)
        return self.fmt.format(i=_ordinal_index(self.excluded, o), label=self.labels[r])

    def _parse(self, vid):
        m = _fmt_regex(self.fmt, self.labels).match(vid)
        if not m:
            return None
        i = int(m.group("i"))
        label = m.groupdict().get("label") or self.labels[0]
        if i in self.excluded or label not in self.labels:
            return None
        return i, label

    def internal_rank(self, vid):
        got = self._parse(vid)
        if got is None:
            return None
        i, label = got
        return _index_ordinal(self.excluded, i) * len(self.labels) + self.labels.index(label)

    def member_of(self, vid):
        got = self._parse(vid)
        return got[0] if got else None

    def neighbors(self, vid):
        i, label = self._parse(vid)
        out = []
        for a, b in self.edges:
            if a == label:
                out.append(self.fmt.format(i=i, label=b))
            elif b == label:
                out.append(self.fmt.format(i=i, label=a))
        out.extend(base for base, lab in self.pattern if lab == label)
        return out

    def base_links(self, b):
        return [], b in self.pattern_set

    def infinite_degree_base(self):
        return set(self.pattern_set)

    def level(self, k):
        out = GadgetLevel()
        c = len(self.labels)
        q, r = divmod(k, c)
        for t in range(k):
            vid = self.vertex(t)
            out.core.append(vid)
            out.tags[vid] = (self.name, _ordinal_index(self.excluded, t // c))
        for o in range(q + (1 if r else 0)):
            i = _ordinal_index(self.excluded, o)
            present = self.labels if o < q else self.labels[:r]
            for a, b in self.edges:
                if a in present and b in present:
                    out.edges.append((self.fmt.format(i=i, label=a), self.fmt.format(i=i, label=b)))
            for base, lab in self.pattern:
                if lab in present:
                    out.edges.append((base, self.fmt.format(i=i, label=lab)))
        if r:
            i = _ordinal_index(self.excluded, q)
            rest = self.labels[r:]
            core_labels = set(self.labels[:r])
            inner = [(a, b) for a, b in self.edges if a in rest and b in rest]
            for group in _components(list(rest), inner):
                verts = [lab for lab in self.labels if lab in group]
                attach = []
                for lab in verts:
                    vid = self.fmt.format(i=i, label=lab)
                    for a, b in self.edges:
                        if a == lab and b in core_labels:
                            attach.append((self.fmt.format(i=i, label=b), vid))
                        elif b == lab and a in core_labels:
                            attach.append((self.fmt.format(i=i, label=a), vid))
                    attach.extend((base, vid) for base, l2 in self.pattern if l2 == lab)
                out.pieces.append(Piece(
                    tuple(attach), frozenset(), False,
                    tuple(self.fmt.format(i=i, label=lab) for lab in verts),
                    q * c + self.labels.index(verts[0]), (self.name, i)))
        start = q + 1 if r else q
        out.families.append(FamilyPiece(self.name, start, self.pattern_set, start * c))
        return out

    def outside_indices(self, start):
        """Indices of members with ordinal >= start, as (excluded, finite cut-off)."""
        return self.excluded | {_ordinal_index(self.excluded, o) for o in range(start)}

    def peel(self, vid):
        i, _ = self._parse(vid)
        base = self.member_vertices(i)
        edges = [(self.fmt.format(i=i, label=a), self.fmt.format(i=i, label=b)) for a, b in self.edges]
        edges += [(b, self.fmt.format(i=i, label=lab)) for b, lab in self.pattern]
        return base, edges, [replace(self, excluded=self.excluded | {i})]

    def rename(self, mapping):
        return replace(self, pattern=tuple(sorted(set((mapping.get(b, b), lab) for b, lab in self.pattern))))

    def prefixed(self, p):
        return replace(self, name=p + self.name, fmt=_esc(p) + self.fmt,
                       pattern=tuple((p + b, lab) for b, lab in self.pattern))


@dataclass(frozen=True)
class FamilyChain:
    """Infinitely many disjoint chains (e.g. the legs of an infinite spider),
    cell 0 of member ``i`` attached to the base by ``pattern``."""

    name: str
    fmt: str                  # fields {i}, {j} and optionally {label}
    labels: tuple
    cell_edges: tuple = ()
    links: tuple = ()
    pattern: tuple = ()
    excluded: frozenset = frozenset()

    kind = "family"
    member_infinite = True

    @property
    def pattern_set(self):
        return frozenset(b for b, _ in self.pattern)

    def member_chain(self, i):
        return Chain(name=f"{self.name}{i}", fmt=self.fmt.replace("{i}", str(i)),
                     labels=self.labels, cell_edges=self.cell_edges, links=self.links,
                     start=0, head=self.pattern, tag=(self.name, i))

    def member_vertices(self, i):
        raise DomainError("members of a chain family are infinite")

    def vertex(self, t):
        o, p = _diag(t)
        return self.member_chain(_ordinal_index(self.excluded, o)).vertex(p)

    def member_of(self, vid):
        m = _fmt_regex(self.fmt, self.labels).match(vid)
        if not m:
            return None
        i = int(m.group("i"))
        return None if i in self.excluded else i

    def internal_rank(self, vid):
        i = self.member_of(vid)
        if i is None:
            return None
        p = self.member_chain(i).internal_rank(vid)
        if p is None:
            return None
        return _undiag(_index_ordinal(self.excluded, i), p)

    def neighbors(self, vid):
        return self.member_chain(self.member_of(vid)).neighbors(vid)

    def base_links(self, b):
        return [], b in self.pattern_set

    def infinite_degree_base(self):
        return set(self.pattern_set)

    def level(self, k):
        out = GadgetLevel()
        o = 0
        while _undiag(o, 0) < k:
            p = 0
            while _undiag(o, p) < k:
                p += 1
            i = _ordinal_index(self.excluded, o)
            sub = self.member_chain(i).level(p)
            out.core.extend(sub.core)
            out.edges.extend(sub.edges)
            out.tags.update(sub.tags)
            for pc in sub.pieces:
                out.pieces.append(replace(pc, min_rank=_undiag(o, pc.min_rank)))
            o += 1
        out.families.append(FamilyPiece(self.name, o, self.pattern_set, _undiag(o, 0)))
        return out

    def outside_indices(self, start):
        return self.excluded | {_ordinal_index(self.excluded, o) for o in range(start)}

    def peel(self, vid):
        i = self.member_of(vid)
        base, edges, rest = self.member_chain(i).peel(vid)
        return base, edges, [replace(self, excluded=self.excluded | {i})] + rest

    def rename(self, mapping):
        return replace(self, pattern=tuple(sorted(set((mapping.get(b, b), lab) for b, lab in self.pattern))))

    def prefixed(self, p):
        return replace(self, name=p + self.name, fmt=_esc(p) + self.fmt,
                       pattern=tuple((p + b, lab) for b, lab in self.pattern))


@dataclass(frozen=True)
class Grid:
    """The quadrant grid on N x N, enumerated diagonal by diagonal.
    The first ``start`` vertices have been moved to the base."""

    name: str = "grid"
    fmt: str = "({x},{y})"
    start: int = 0
    alias: tuple = ()         # (rank, base name) for peeled vertices

    kind = "grid"

    def _name(self, x, y):
        r = _undiag(x, y)
        if r < self.start:
            return dict(self.alias)[r]
        return self.fmt.format(x=x, y=y)

    def vertex(self, t):
        x, y = _diag(self.start + t)
        return self.fmt.format(x=x, y=y)

    def _parse(self, vid):
        m = _fmt_regex(self.fmt).match(vid)
        if not m:
            return None
        x, y = int(m.group("x")), int(m.group("y"))
        if _undiag(x, y) < self.start:
            return None
        return x, y

    def internal_rank(self, vid):
        got = self._parse(vid)
        return None if got is None else _undiag(*got) - self.start

    @staticmethod
    def _around(x, y):
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if x + dx >= 0 and y + dy >= 0:
                yield x + dx, y + dy

    def neighbors(self, vid):
        x, y = self._parse(vid)
        return [self._name(a, b) for a, b in self._around(x, y)]

    def base_links(self, b):
        rev = {name: r for r, name in self.alias}
        if b not in rev:
            return [], False
        x, y = _diag(rev[b])
        return [self.fmt.format(x=a, y=c) for a, c in self._around(x, y)
                if _undiag(a, c) >= self.start], False

    def infinite_degree_base(self):
        return set()

    def level(self, k):
        out = GadgetLevel()
        bound = self.start + k
        seen = set()
        attach = []
        for r in range(bound):
            x, y = _diag(r)
            me = self._name(x, y)
            if r >= self.start:
                out.core.append(me)
            for a, b in self._around(x, y):
                rn = _undiag(a, b)
                if rn >= bound:
                    attach.append((me, self.fmt.format(x=a, y=b)))
                elif r >= self.start or rn >= self.start:
                    e = frozenset((me, self._name(a, b)))
                    if e not in seen:
                        seen.add(e)
                        out.edges.append((me, self._name(a, b)))
        out.pieces.append(Piece(tuple(attach), frozenset(), True, (), k, None, self.name, "grid"))
        return out

    def peel(self, vid):
        x, y = self._parse(vid)
        r0 = _undiag(x, y)
        base, edges = [], []
        for r in range(self.start, r0 + 1):
            a, b = _diag(r)
            base.append(self.fmt.format(x=a, y=b))
            for c, d in self._around(a, b):
                rn = _undiag(c, d)
                if rn < r:
                    edges.append((self._name(c, d), self.fmt.format(x=a, y=b)))
        alias = tuple(self.alias) + tuple((r, self.fmt.format(x=_diag(r)[0], y=_diag(r)[1]))
                                           for r in range(self.start, r0 + 1))
        return base, edges, [replace(self, start=r0 + 1, alias=alias)]

    def rename(self, mapping):
        return replace(self, alias=tuple((r, mapping.get(n, n)) for r, n in self.alias))

    def prefixed(self, p):
        return replace(self, name=p + self.name, fmt=_esc(p) + self.fmt,
                       alias=tuple((r, p + n) for r, n in self.alias))


def _tree_rank(u):
    return (1 << len(u)) - 1 + (int(u, 2) if u else 0)


def _tree_label(t):
    depth = (t + 1).bit_length() - 1
    idx = t + 1 - (1 << depth)
    return format(idx, "b").zfill(depth) if depth else ""


@dataclass(frozen=True)
class Tree:
    """The full binary tree below ``root`` (a 0/1 word), breadth first."""

    name: str = "tree"
    fmt: str = "r{w}"
    root: str = ""
    head: str | None = None

    kind = "tree"

    def vertex(self, t):
        return self.fmt.format(w=self.root + _tree_label(t))

    def _parse(self, vid):
        m = _fmt_regex(self.fmt).match(vid)
        if not m or not m.group("w").startswith(self.root):
            return None
        return m.group("w")[len(self.root):]

    def internal_rank(self, vid):
        u = self._parse(vid)
        return None if u is None else _tree_rank(u)

    def neighbors(self, vid):
        u = self._parse(vid)
        w = self.root + u
        out = [self.fmt.format(w=w + "0"), self.fmt.format(w=w + "1")]
        if u:
            out.append(self.fmt.format(w=w[:-1]))
        elif self.head is not None:
            out.append(self.head)
        return out

    def base_links(self, b):
        return ([self.fmt.format(w=self.root)] if b == self.head else []), False

    def infinite_degree_base(self):
        return set()

    def level(self, k):
        out = GadgetLevel()
        if k == 0:
            attach = ((self.head, self.vertex(0)),) if self.head is not None else ()
            out.pieces.append(Piece(attach, frozenset(), True, (), 0, None, self.name, "tree"))
            return out
        for t in range(k):
            out.core.append(self.vertex(t))
            if t:
                out.edges.append((self.vertex((t - 1) // 2), self.vertex(t)))
        if self.head is not None:
            out.edges.append((self.head, self.vertex(0)))
        for t in range(k, 2 * k + 1):
            out.pieces.append(Piece(((self.vertex((t - 1) // 2), self.vertex(t)),), frozenset(),
                                    True, (), t, None, self.name, "tree"))
        return out

    def peel(self, vid):
        t0 = self.internal_rank(vid)
        k = t0 + 1
        base = [self.vertex(t) for t in range(k)]
        edges = [(self.vertex((t - 1) // 2), self.vertex(t)) for t in range(1, k)]
        if self.head is not None:
            edges.append((self.head, self.vertex(0)))
        rest = [replace(self, root=self.root + _tree_label(t), head=self.vertex((t - 1) // 2),
                        name=f"{self.name}/{_tree_label(t)}")
                for t in range(k, 2 * k + 1)]
        return base, edges, rest

    def rename(self, mapping):
        return replace(self, head=mapping.get(self.head, self.head))

    def prefixed(self, p):
        return replace(self, name=p + self.name, fmt=_esc(p) + self.fmt,
                       head=None if self.head is None else p + self.head)
