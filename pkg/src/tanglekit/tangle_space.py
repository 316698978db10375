"""The tangle space: end tangles plus symbolic blocks of ultrafilter tangles.

A free ultrafilter on a family's index set is never constructed. A block
stands for all tangles with a given critical set and family; an optional
selector (an infinite :class:`IndexSet`) narrows it to the ultrafilters
containing that set. Questions the selector does not settle come back as
:class:`Undetermined`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import DomainError
from .indexsets import IndexSet, parse_index_set
from .inverse_system import EndHandle, critical_sets, ends, resolve_end
from .presentation.components import components_minus, image
from .separations import check_tangle_axioms


@dataclass(frozen=True)
class Undetermined:
    reason: str

    def to_json(self):
        return {"kind": "undetermined", "reason": self.reason}


@dataclass(frozen=True)
class Principal:
    key: str
    member: int | None = None

    def to_json(self):
        out = {"kind": "principal", "component": self.key}
        if self.member is not None:
            out["member"] = self.member
        return out


@dataclass(frozen=True)
class FreeOnFamily:
    key: str
    indices: IndexSet             # the selector trace; every set in the ultrafilter meets it cofinitely

    def to_json(self):
        return {"kind": "free", "family": self.key, "selector": str(self.indices)}


def decides(u, selection):
    """Whether a selection of components belongs to the ultrafilter ``u``."""
    if isinstance(u, Undetermined):
        return u
    if isinstance(u, Principal):
        return selection.contains(u.key, u.member)
    T = selection.family_map.get(u.key, IndexSet.empty())
    if u.indices.almost_subset(T):
        return True
    if (u.indices & T).is_finite():
        return False
    return Undetermined(f"the selector {u.indices} does not decide {T} on {u.key}")


# ---------------------------------------------------------------------------
# handles


@dataclass(frozen=True)
class EndTangle:
    end: EndHandle

    kind = "end"

    @property
    def ref(self):
        return self.end.ref

    def to_json(self):
        return {"kind": "end", **self.end.to_json()}


@dataclass(frozen=True)
class UltrafilterBlock:
    critical_set: frozenset
    family: str                   # family name (descriptor key is "F:" + family)
    selector: IndexSet | None = None

    kind = "block"

    @property
    def key(self):
        return f"F:{self.family}"

    @property
    def trace(self):
        return self.selector if self.selector is not None else IndexSet.all()

    @property
    def ref(self):
        return f"block:{self.family}" + ("" if self.selector is None else f"[{self.selector}]")

    def restrict(self, selector):
        s = selector if self.selector is None else self.selector & selector
        return UltrafilterBlock(self.critical_set, self.family, s)

    def to_json(self, p=None):
        X = sorted(self.critical_set, key=p.rank) if p is not None else sorted(self.critical_set)
        return {"kind": "block", "ref": self.ref, "criticalSet": X, "family": self.key,
                "selector": None if self.selector is None else str(self.selector)}


def make_block(p, critical_set, family, selector=None):
    space = components_minus(p, critical_set)
    key = f"F:{family}"
    if key not in space or space[key].neighbourhood != frozenset(critical_set):
        raise DomainError(f"{family!r} is not a family with neighbourhood exactly {sorted(critical_set)}")
    if selector is not None:
        if isinstance(selector, str):
            selector = parse_index_set(selector)
        if not (selector & space[key].indices).is_infinite():
            raise DomainError(f"selector {selector} describes a finite set; it extends to no free ultrafilter")
    return UltrafilterBlock(frozenset(critical_set), family, selector)


def induced_ultrafilter(p, tau, X):
    """``U(tau, X)`` as Principal, FreeOnFamily or Undetermined."""
    X = frozenset(X)
    space = components_minus(p, X)
    if isinstance(tau, EndTangle):
        if tau.end.is_family:
            return Undetermined(f"{tau.ref} is a family of ends; each member answers differently")
        return Principal(*tau.end.location(space))
    Z = components_minus(p, X | tau.critical_set)
    im = image(Z, tau.key, space)
    if im.identity:
        return FreeOnFamily(im.key, tau.trace & space[im.key].indices)
    # every member lands in one component, so the pushforward is principal
    return Principal(im.key, im.member)


def orient(p, tau, s):
    """The orientation of the separation underlying ``s`` that lies in tau."""
    u = induced_ultrafilter(p, tau, s.separator)
    got = decides(u, s.selection)
    if isinstance(got, Undetermined):
        return got
    return s if got else s.inverse()


def concentrate(p, tau, X, classes):
    """Index of the class (a list of Selections partitioning C_X) that lies in U(tau, X)."""
    u = induced_ultrafilter(p, tau, X)
    reasons = []
    for n, cls in enumerate(classes):
        got = decides(u, cls)
        if got is True:
            return n
        if isinstance(got, Undetermined):
            reasons.append(got.reason)
    if reasons:
        return Undetermined("; ".join(reasons))
    raise DomainError("the classes do not cover the component space")


# ---------------------------------------------------------------------------
# the space


@dataclass(frozen=True)
class TangleSpace:
    ends: object
    critical: object
    blocks: tuple

    @property
    def end_tangles(self):
        return tuple(EndTangle(e) for e in self.ends.ends + self.ends.families)

    def summary(self):
        return {"endTangles": self.ends.count, "ultrafilterBlocks": len(self.blocks),
                "complete": self.critical.complete}

    def handles(self):
        return list(self.end_tangles) + list(self.blocks)

    def to_json(self, p):
        return {"ends": [e.to_json() for e in self.ends.ends + self.ends.families],
                "ultrafilterBlocks": [b.to_json(p) for b in self.blocks],
                "complete": self.critical.complete,
                "summary": self.summary()}


def tangles(p, depth=6, critical_bound=4):
    e = ends(p, depth)
    c = critical_sets(p, critical_bound)
    blocks = []
    for cs in c.sets:
        for d in cs.families:
            blocks.append(UltrafilterBlock(cs.X, d.family))
    return TangleSpace(e, c, tuple(blocks))


_BLOCK = re.compile(r"^block(?::(.*))?$")


def resolve(p, ref):
    """A tangle handle from a reference string (``end:...`` or ``block:...``)."""
    if ref.startswith("end:"):
        return EndTangle(resolve_end(p, ref))
    m = _BLOCK.match(ref)
    if not m:
        raise DomainError(f"unknown tangle reference {ref!r}")
    blocks = [b for cs in critical_sets(p, 0).sets for b in (UltrafilterBlock(cs.X, d.family) for d in cs.families)]
    body = m.group(1)
    if not blocks:
        raise DomainError("this presentation has no ultrafilter tangles")
    by_family = {b.family: b for b in blocks}
    if body is None or body == "":
        if len(blocks) > 1:
            raise DomainError("several blocks exist; name the family as block:<family>[<selector>]")
        return blocks[0]
    fm = re.match(r"^(.*?)\[(.*)\]$", body)
    if fm and fm.group(1) in by_family:
        b = by_family[fm.group(1)]
        return make_block(p, b.critical_set, b.family, fm.group(2))
    if body in by_family:
        return by_family[body]
    if len(blocks) == 1:
        b = blocks[0]
        return make_block(p, b.critical_set, b.family, body)
    raise DomainError(f"unknown tangle reference {ref!r}")


# ---------------------------------------------------------------------------
# audit


def _atoms(tau):
    def atoms(d):
        out = [IndexSet.empty(), d.indices]
        first = IndexSet.finite([d.indices.min()])
        out += [first, d.indices - first]
        if isinstance(tau, UltrafilterBlock) and tau.selector is not None:
            out += [d.indices & tau.selector, d.indices - tau.selector]
        if isinstance(tau, UltrafilterBlock) and tau.selector is None:
            out += [d.indices & IndexSet.residue(0, 2), d.indices & IndexSet.residue(1, 2)]
        return list(dict.fromkeys(out))
    return atoms


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    separations: int
    undetermined: int
    axioms: object

    def to_json(self):
        return {"passed": self.passed, "separations": self.separations,
                "undetermined": self.undetermined, "axioms": self.axioms.to_json()}


def orientation_sample(p, tau, depth):
    """tau's orientations of all representable separations with separator inside X_depth."""
    from .separations import separations_at
    base = p.vertices(depth)
    sample, undetermined = [], 0
    seen = set()
    for k in range(len(base) + 1):
        for combo in itertools.combinations(base, k):
            for s in separations_at(p, frozenset(combo), _atoms(tau)):
                if s in seen:
                    continue
                seen.add(s)
                seen.add(s.inverse())
                got = orient(p, tau, s)
                if isinstance(got, Undetermined):
                    undetermined += 1
                else:
                    sample.append(got)
    return sample, undetermined


def consistency_audit(p, tau, depth=3, star_cap=3, sample=None):
    """Run the tangle axiom refuter on tau's orientation sample."""
    undetermined = 0
    if sample is None:
        sample, undetermined = orientation_sample(p, tau, depth)
    rep = check_tangle_axioms(sample, star_cap)
    return AuditReport(rep.passed, len(sample), undetermined, rep)
