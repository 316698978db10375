"""Eventually periodic subsets of the natural numbers.

An :class:`IndexSet` is a finite Boolean combination of residue classes and
finite sets. Every such set has a normal form ``(modulus, residues, flips)``:
``i`` is a member iff ``(i % modulus in residues) != (i in flips)``. The
normal form makes equality, emptiness and finiteness decidable, which is all
the selector and partition machinery needs.

The text syntax accepted by :func:`parse_index_set`::

    all | none | evens | odds | mod<m>=<r> | {1,2,5} | ~A | A & B | A | B | A - B | (A)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce

from .errors import DomainError


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class IndexSet:
    modulus: int
    residues: frozenset
    flips: frozenset

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError("modulus must be positive")
        if any(not 0 <= r < self.modulus for r in self.residues):
            raise DomainError("residue out of range")
        if any(i < 0 for i in self.flips):
            raise DomainError("indices are natural numbers")

    # construction -------------------------------------------------------

    @classmethod
    def _make(cls, modulus, residues, flips):
        residues = frozenset(residues)
        # smallest modulus describing the same periodic part
        for d in _divisors(modulus):
            if all(((r % d) in {s % d for s in residues}) == (r in residues)
                   for r in range(modulus)):
                residues = frozenset(r % d for r in residues)
                modulus = d
                break
        flips = frozenset(flips)
        return cls(modulus, residues, flips)

    @classmethod
    def all(cls):
        return cls(1, frozenset({0}), frozenset())

    @classmethod
    def empty(cls):
        return cls(1, frozenset(), frozenset())

    @classmethod
    def finite(cls, items):
        return cls._make(1, (), items)

    @classmethod
    def cofinite(cls, excluded=()):
        return cls._make(1, {0}, excluded)

    @classmethod
    def residue(cls, r, m):
        if m < 1:
            raise DomainError("modulus must be positive")
        return cls._make(m, {r % m}, ())

    # queries ------------------------------------------------------------

    def __contains__(self, i):
        return i >= 0 and ((i % self.modulus in self.residues) != (i in self.flips))

    def is_empty(self):
        return not self.residues and not self.flips

    def is_finite(self):
        return not self.residues

    def is_infinite(self):
        return bool(self.residues)

    def elements(self):
        """Sorted members; only for finite sets."""
        if self.is_infinite():
            raise DomainError("infinite index set has no finite element list")
        return sorted(self.flips)

    def take(self, n):
        """The n smallest members."""
        out = []
        i = 0
        bound = (max(self.flips) + 1) if self.flips else 0
        while len(out) < n:
            if i in self:
                out.append(i)
            i += 1
            if i > bound and self.is_finite():
                break
        return out

    def min(self):
        got = self.take(1)
        if not got:
            raise DomainError("empty index set has no minimum")
        return got[0]

    # Boolean algebra ----------------------------------------------------

    def _combine(self, other, op):
        m = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        residues = {r for r in range(m)
                    if op(r % self.modulus in self.residues, r % other.modulus in other.residues)}
        flips = {i for i in self.flips | other.flips
                 if op(i in self, i in other) != (i % m in residues)}
        return IndexSet._make(m, residues, flips)

    def __and__(self, other):
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other):
        return self._combine(other, lambda a, b: a or b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a and not b)

    def __xor__(self, other):
        return self._combine(other, lambda a, b: a != b)

    def __invert__(self):
        return IndexSet._make(self.modulus,
                              set(range(self.modulus)) - self.residues, self.flips)

    def issubset(self, other):
        return (self - other).is_empty()

    def almost_subset(self, other):
        """True iff self minus other is finite."""
        return (self - other).is_finite()

    def isdisjoint(self, other):
        return (self & other).is_empty()

    # text ---------------------------------------------------------------

    def __str__(self):
        if self.is_empty():
            return "none"
        if self.modulus == 1 and self.residues:
            return "all" if not self.flips else "~{" + ",".join(map(str, sorted(self.flips))) + "}"
        if not self.residues:
            return "{" + ",".join(map(str, sorted(self.flips))) + "}"
        names = {(2, 0): "evens", (2, 1): "odds"}
        parts = [names.get((self.modulus, r), f"mod{self.modulus}={r}") for r in sorted(self.residues)]
        text = parts[0] if len(parts) == 1 else "(" + "|".join(parts) + ")"
        periodic = reduce(lambda a, b: a | b,
                          (IndexSet.residue(r, self.modulus) for r in self.residues))
        added = sorted(i for i in self.flips if i not in periodic)
        removed = sorted(i for i in self.flips if i in periodic)
        if added:
            text += "|{" + ",".join(map(str, added)) + "}"
        if removed:
            text += "-{" + ",".join(map(str, removed)) + "}"
        return text

    def to_json(self):
        return {"modulus": self.modulus, "residues": sorted(self.residues),
                "flips": sorted(self.flips), "text": str(self)}


_TOKEN = re.compile(r"\s*(?:(all|none|evens|odds|cofinite)|mod(\d+)=(\d+)|(\{[\d,\s]*\})|([~&|\-()]))")


def parse_index_set(text):
    """Parse the selector syntax described in the module docstring."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse index set {text!r} at position {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("atom", {
                "all": IndexSet.all(), "cofinite": IndexSet.all(), "none": IndexSet.empty(),
                "evens": IndexSet.residue(0, 2), "odds": IndexSet.residue(1, 2),
            }[m.group(1)]))
        elif m.group(2):
            tokens.append(("atom", IndexSet.residue(int(m.group(3)), int(m.group(2)))))
        elif m.group(4):
            body = m.group(4)[1:-1]
            items = [int(x) for x in body.replace(" ", "").split(",") if x]
            tokens.append(("atom", IndexSet.finite(items)))
        else:
            tokens.append(("op", m.group(5)))

    def parse_expr(i):
        left, i = parse_unary(i)
        while i < len(tokens) and tokens[i] in (("op", "&"), ("op", "|"), ("op", "-")):
            op = tokens[i][1]
            right, i = parse_unary(i + 1)
            left = left & right if op == "&" else left | right if op == "|" else left - right
        return left, i

    def parse_unary(i):
        if i >= len(tokens):
            raise DomainError(f"unexpected end of index set {text!r}")
        kind, val = tokens[i]
        if (kind, val) == ("op", "~"):
            inner, i = parse_unary(i + 1)
            return ~inner, i
        if (kind, val) == ("op", "("):
            inner, i = parse_expr(i + 1)
            if i >= len(tokens) or tokens[i] != ("op", ")"):
                raise DomainError(f"unbalanced parenthesis in {text!r}")
            return inner, i + 1
        if kind == "atom":
            return val, i + 1
        raise DomainError(f"unexpected {val!r} in index set {text!r}")

    result, i = parse_expr(0)
    if i != len(tokens):
        raise DomainError(f"trailing input in index set {text!r}")
    return result
