"""Constructors, combinators and the JSON presentation format."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..errors import PresentationError
from . import normal as nf
from .gadgets import Chain, Family, FamilyChain, Grid, Tree

OMEGA = "omega"


def _count(value, path, what):
    if value == OMEGA:
        return OMEGA
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise PresentationError(f"{what} must be a non-negative integer or \"omega\"", path=path)
    return value


def ray():
    return nf.make_normal((), (), [Chain("ray", "v{j}", ("v",), links=(("v", "v"),))])


def double_ray():
    pos = Chain("ray+", "v{j}", ("v",), links=(("v", "v"),), start=1, head=(("v0", "v"),))
    neg = Chain("ray-", "v-{j}", ("v",), links=(("v", "v"),), start=1, head=(("v0", "v"),))
    return nf.make_normal(("v0",), (), [pos, neg])


def star(size):
    if size == OMEGA:
        return nf.make_normal(("center",), (), [Family("leaf", "leaf{i}", ("x",), (), (("center", "x"),))])
    leaves = [f"leaf{i}" for i in range(size)]
    return nf.make_normal(("center", *leaves), [("center", v) for v in leaves], [])


def spider(legs):
    if legs == OMEGA:
        fam = FamilyChain("leg", "leg{i}.{j}", ("x",), links=(("x", "x"),), pattern=(("body", "x"),))
        return nf.make_normal(("body",), (), [fam])
    chains = [Chain(f"leg{i}", f"leg{i}.{{j}}", ("x",), links=(("x", "x"),), head=(("body", "x"),))
              for i in range(legs)]
    return nf.make_normal(("body",), (), chains)


def dominated_ray():
    return nf.make_normal(("c",), (), [Chain("ray", "v{j}", ("v",), links=(("v", "v"),),
                                             dominators=(("c", "v"),))])


def comb():
    return nf.make_normal((), (), [Chain("spine", "{label}{j}", ("s", "t"), cell_edges=(("s", "t"),),
                                         links=(("s", "s"),))])


def grid():
    return nf.make_normal((), (), [Grid()])


def binary_tree():
    return nf.make_normal((), (), [Tree()])


def finite(vertices, edges):
    names = list(vertices)
    for a, b in edges:
        for v in (a, b):
            if v not in names:
                names.append(v)
    return nf.make_normal(names, edges, [])


def _build(doc, path):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise PresentationError("expected an object with a \"kind\" field", path=path)
    kind = doc["kind"]
    try:
        if kind == "Ray":
            return ray()
        if kind == "DoubleRay":
            return double_ray()
        if kind == "Star":
            return star(_count(doc.get("size"), path + ".size", "Star size"))
        if kind == "Spider":
            return spider(_count(doc.get("legs"), path + ".legs", "Spider legs"))
        if kind == "DominatedRay":
            return dominated_ray()
        if kind == "Comb":
            return comb()
        if kind == "Grid":
            return grid()
        if kind == "BinaryTree":
            return binary_tree()
        if kind == "Finite":
            edges = doc.get("edges", [])
            verts = doc.get("vertices", [])
            if not all(isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges):
                raise PresentationError("Finite edges must be pairs of vertex names", path=path + ".edges")
            if not all(isinstance(v, str) for v in verts):
                raise PresentationError("Finite vertices must be strings", path=path + ".vertices")
            return finite(verts, [tuple(e) for e in edges])
        if kind == "DisjointUnion":
            parts = doc.get("parts")
            if not isinstance(parts, list) or not parts:
                raise PresentationError("DisjointUnion needs a non-empty \"parts\" list", path=path)
            return nf.disjoint_union([_build(p, f"{path}.parts[{n}]") for n, p in enumerate(parts)])
        if kind == "Identify":
            inner = _build(doc.get("of"), path + ".of")
            pairs = doc.get("pairs", [])
            if not all(isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in pairs):
                raise PresentationError("Identify pairs must be pairs of vertex ids", path=path + ".pairs")
            return nf.identify(inner, [tuple(p) for p in pairs])
        if kind == "AttachLeaves":
            inner = _build(doc.get("of"), path + ".of")
            v = doc.get("vertex")
            if not isinstance(v, str):
                raise PresentationError("AttachLeaves needs a \"vertex\" id", path=path + ".vertex")
            return nf.attach_leaves(inner, v, _count(doc.get("count"), path + ".count", "AttachLeaves count"))
    except PresentationError as exc:
        if exc.path is None:
            raise PresentationError(str(exc), path=path) from None
        raise
    raise PresentationError(f"unknown constructor {kind!r}", path=path + ".kind")


@dataclass(frozen=True, eq=False)
class Presentation:
    """A parsed presentation: the source term plus its normal form."""

    term: dict
    normal: nf.Normal = field(repr=False)

    @classmethod
    def from_term(cls, term):
        return cls(term, _build(term, "$"))

    @classmethod
    def from_json(cls, text):
        try:
            term = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PresentationError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
        return cls.from_term(term)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    @property
    def digest(self):
        canon = json.dumps(self.term, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    @property
    def kind(self):
        return self.term.get("kind")

    # convenience passthroughs
    def rank(self, v):
        return self.normal.rank(v)

    def vertex(self, r):
        return self.normal.vertex(r)

    def canonical(self, n):
        """The canonical separator X_n as a frozenset."""
        return frozenset(self.vertices(n))

    def vertices(self, n):
        if self.normal.is_finite:
            n = min(n, len(self.normal.base))
        return [self.normal.vertex(r) for r in range(n)]

    @property
    def is_finite(self):
        return self.normal.is_finite

    def __repr__(self):
        return f"Presentation({json.dumps(self.term, sort_keys=True)})"


def from_kind(kind, **fields):
    return Presentation.from_term({"kind": kind, **fields})
