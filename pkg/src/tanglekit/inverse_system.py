"""The inverse system of component spaces: bonding maps, ends, critical sets, domination."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import DomainError
from .presentation.components import components_minus, image


@dataclass(frozen=True)
class BondingMap:
    """``c_{X', X}`` as a table from descriptor keys of G - X' to :class:`Image` values."""

    source: frozenset
    target: frozenset
    table: tuple                  # ((source key, Image), ...)

    def __call__(self, key, member=None):
        im = dict(self.table)[key]
        if im.identity and member is not None:
            return im.key, member
        return im.key, im.member

    def to_json(self):
        out = {}
        for k, im in self.table:
            if im.identity:
                out[k] = {"to": im.key, "memberwise": True}
            else:
                out[k] = {"to": im.key, "member": im.member}
        return {"source": sorted(self.source), "target": sorted(self.target), "map": out}


def bonding(p, X, X2):
    """The bonding map from the components of G - X2 to those of G - X (X ⊆ X2)."""
    X, X2 = frozenset(X), frozenset(X2)
    if not X <= X2:
        raise DomainError("bonding needs X ⊆ X'")
    src, dst = components_minus(p, X2), components_minus(p, X)
    return BondingMap(X2, X, tuple((d.key, image(src, d.key, dst)) for d in src.descriptors))


# ---------------------------------------------------------------------------
# ends


_TAIL_RULES = {
    "chain": "one connected tail piece beyond every level; its component is C(X, end) for all deeper X",
    "member": "leg of a chain family; untouched legs stay members of the family, touched legs keep one tail piece",
    "grid": "the quadrant minus any finite set has exactly one infinite component",
    "tree": "binary subtrees; each level splits every infinite component into two, giving continuum many ends",
    "member-family": "countably many ends, one per member of a chain family",
}


@dataclass(frozen=True)
class EndHandle:
    """An end (or a symbolic family of ends) described by its tail rule.

    ``ref`` is the stable reference string. For a single end, ``end`` is the
    argument :meth:`ComponentSpace.end_location` understands.
    """

    ref: str
    kind: str                     # "chain", "member", "grid", "tree" or "member-family"
    end: object = None
    family: str | None = None
    index: int | None = None
    gadgets: tuple = ()

    @property
    def is_family(self):
        return self.kind in ("tree", "member-family")

    @property
    def tail_rule(self):
        return _TAIL_RULES[self.kind]

    def location(self, space):
        """``(key, member)`` of C(X, end) in the given component space."""
        if self.is_family:
            raise DomainError(f"{self.ref} is a family of ends; pick a member")
        return space.end_location(self.end)

    def thread(self, p, depth):
        """The chosen component at each X_0, ..., X_depth."""
        return [self.location(components_minus(p, p.canonical(n))) for n in range(depth + 1)]

    def to_json(self):
        out = {"ref": self.ref, "kind": self.kind, "tailRule": self.tail_rule}
        if self.family is not None:
            out["family"] = self.family
        if self.index is not None:
            out["index"] = self.index
        return out


def member_end(fam_handle, i):
    """The end of member i of a chain family."""
    return EndHandle(f"end:{fam_handle.family}{i}", "member", (fam_handle.family, i), fam_handle.family, i)


def end_handles(p):
    """Single ends first (gadget order), then symbolic families."""
    singles, fams = [], []
    trees = {}
    for g, gad in enumerate(p.normal.gadgets):
        if gad.kind == "chain":
            k = "member" if gad.tag else "chain"
            singles.append(EndHandle(f"end:{gad.end_id}", k, gad.end_id,
                                     gad.tag[0] if gad.tag else None,
                                     gad.tag[1] if gad.tag else None, (g,)))
        elif gad.kind == "grid":
            singles.append(EndHandle(f"end:{gad.name}", "grid", gad.name, gadgets=(g,)))
        elif gad.kind == "family" and gad.member_infinite:
            fams.append(EndHandle(f"end:{gad.name}*", "member-family", family=gad.name, gadgets=(g,)))
        elif gad.kind == "tree":
            root = gad.name.split("/")[0]
            trees.setdefault(root, []).append(g)
    for root, gs in trees.items():
        fams.append(EndHandle(f"end:{root}*", "tree", family=root, gadgets=tuple(gs)))
    return singles, fams


@dataclass(frozen=True)
class EndsResult:
    ends: tuple
    families: tuple
    depth: int
    level_threads: tuple          # number of infinite explicit components at X_0..X_depth
    thread_families: tuple        # number of symbolic end families present at X_0..X_depth

    @property
    def count(self):
        """Number of ends, or "omega"/"continuum" when a family is present."""
        if any(f.kind == "tree" for f in self.families):
            return "continuum"
        if self.families:
            return "omega"
        return len(self.ends)

    def summary(self):
        return {"single": len(self.ends), "families": len(self.families), "cardinality": self.count}

    def to_json(self):
        return {"ends": [e.to_json() for e in self.ends],
                "families": [f.to_json() for f in self.families],
                "summary": self.summary(), "depth": self.depth,
                "threadPrefixes": list(self.level_threads),
                "threadFamilies": list(self.thread_families)}


def thread_prefixes(p, depth):
    """Compatible threads of infinite explicit components through X_0 ⊆ ... ⊆ X_depth.

    Each infinite explicit component at X_depth determines its thread; the
    count is checked against a direct search over the bonding maps.
    """
    levels = [components_minus(p, p.canonical(n)) for n in range(depth + 1)]
    counts = []
    for n, space in enumerate(levels):
        nodes = [d.key for d in space.explicit if d.infinite]
        if n == 0:
            threads = [(k,) for k in nodes]
        else:
            prev = levels[n - 1]
            threads = [t + (k,) for t in threads for k in nodes if image(space, k, prev).key == t[-1]]
        counts.append(len(threads))
    return counts


def ends(p, depth=6):
    singles, fams = end_handles(p)
    counts = thread_prefixes(p, depth)
    famcounts = []
    for n in range(depth + 1):
        space = components_minus(p, p.canonical(n))
        famcounts.append(sum(1 for d in space.families if d.member_size is None))
    return EndsResult(tuple(singles), tuple(fams), depth, tuple(counts), tuple(famcounts))


_MEMBER_REF = re.compile(r"^end:(.+?)(0|[1-9][0-9]*)$")


def resolve_end(p, ref):
    """Turn ``end:<id>``, ``end:<index>`` or ``end:<family><i>`` into an :class:`EndHandle`."""
    singles, fams = end_handles(p)
    if not ref.startswith("end:"):
        ref = "end:" + ref
    for h in singles + fams:
        if h.ref == ref:
            return h
    body = ref[4:]
    if body.isdigit() and int(body) < len(singles):
        return singles[int(body)]
    m = _MEMBER_REF.match(ref)
    if m:
        for f in fams:
            if f.kind == "member-family" and f.family == m.group(1):
                _, gad = p.normal.family_gadget(f.family)
                i = int(m.group(2))
                if i not in gad.excluded:
                    return member_end(f, i)
    raise DomainError(f"unknown end reference {ref!r}")


# ---------------------------------------------------------------------------
# critical vertex sets


@dataclass(frozen=True)
class CriticalSet:
    X: frozenset
    families: tuple               # family descriptors with neighbourhood exactly X

    def to_json(self, p):
        return {"X": sorted(self.X, key=p.rank), "families": [d.key for d in self.families]}


@dataclass(frozen=True)
class CriticalSetsResult:
    sets: tuple
    search_bound: int
    searched: int
    candidates: tuple
    complete: bool
    complete_reason: str

    def to_json(self, p):
        return {"criticalSets": [c.to_json(p) for c in self.sets], "searchBound": self.search_bound,
                "searched": self.searched, "complete": self.complete, "completeReason": self.complete_reason}


def _critical_at(p, X):
    space = components_minus(p, X)
    fams = tuple(d for d in space.families if d.neighbourhood == X)
    return CriticalSet(X, fams) if fams else None


def critical_sets(p, bound=4):
    """Critical sets among all subsets of X_bound plus the declared candidates.

    Every infinite collection of components of G - X lies in a symbolic
    family, and a family's per-member neighbourhood is its attachment
    pattern, so the patterns are the only possible critical sets; the flag
    ``complete`` records this.
    """
    found = {}
    base = p.vertices(bound)
    searched = 0
    for k in range(len(base) + 1):
        for combo in itertools.combinations(base, k):
            searched += 1
            X = frozenset(combo)
            got = _critical_at(p, X)
            if got:
                found[X] = got
    candidates = []
    for _, gad in p.normal.families():
        X = gad.pattern_set
        candidates.append(X)
        if X not in found:
            got = _critical_at(p, X)
            if got:
                found[X] = got
    order = sorted(found, key=lambda X: (len(X), sorted(p.rank(v) for v in X)))
    return CriticalSetsResult(tuple(found[X] for X in order), bound, searched, tuple(candidates), True,
                              "declared candidates (family attachment patterns) are the only critical sets")


# ---------------------------------------------------------------------------
# domination


@dataclass(frozen=True)
class Domination:
    dominates: bool
    witness: frozenset | None = None      # finite X avoiding v with no edge from v to C(X, end)
    levels_checked: int = 0

    def __bool__(self):
        return self.dominates


def _adjacent_to(p, v, space, loc):
    for u in p.normal.neighbours(v).finite:
        if u not in space.deleted and space.locate(u) == loc:
            return True
    # infinite neighbour families: v attaches to every member/cell of some gadget
    lvl = p.normal.level(space.depth)
    for _, pc in lvl.pieces:
        if v in pc.dominators and pc.end is not None:
            if space.end_location(pc.end) == loc:
                return True
    for g, fp in lvl.families:
        if v in fp.pattern:
            if loc == space.family_location(fp.family) or (loc[0] == f"F:{fp.family}"):
                return True
    return False


def dominates(p, v, end, depth=8):
    """Whether v dominates the end: v has a neighbour in C(X, end) for every finite X ∌ v."""
    normal = p.normal
    normal.locate_vertex(v)
    if end.is_family:
        # chains of a family hang off their pattern by single edges; trees are locally finite
        return Domination(False, None, 0)
    g = end.gadgets[0] if end.gadgets else None
    gad = normal.gadgets[g] if g is not None else None
    rule = gad is not None and gad.kind == "chain" and any(d == v for d, _ in gad.dominators)
    checked = 0
    for n in range(depth + 1):
        X = p.canonical(n)
        if v in X:
            continue
        space = components_minus(p, X)
        checked += 1
        if not _adjacent_to(p, v, space, end.location(space)):
            return Domination(False, X, checked)
    if rule:
        return Domination(True, None, checked)
    # outside the dominator list: exhibit a separating X explicitly
    nb = normal.neighbours(v)
    if not nb.infinite:
        X = frozenset(nb.finite)
        space = components_minus(p, X)
        if not _adjacent_to(p, v, space, end.location(space)):
            return Domination(False, X, checked + 1)
    lvl = normal.level(max(depth, normal.rank(v) + 1) + 2 * len(normal.gadgets))
    X = frozenset(lvl.core) - {v}
    space = components_minus(p, X)
    if not _adjacent_to(p, v, space, end.location(space)):
        return Domination(False, X, checked + 1)
    raise DomainError(f"could not decide whether {v!r} dominates {end.ref}")
