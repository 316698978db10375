"""Adjacency and exhaustion queries."""

from __future__ import annotations

from dataclasses import dataclass


def adjacency(p, v):
    """Neighbours of ``v``: a finite tuple plus descriptions of infinite neighbour families."""
    return p.normal.neighbours(v)


@dataclass(frozen=True)
class Exhaustion:
    vertices: tuple
    edges: tuple

    @property
    def separator(self):
        return frozenset(self.vertices)


def exhaustion(p, n):
    """Induced subgraph on the first ``n`` vertices in rank order."""
    verts = tuple(p.vertices(n))
    inside = set(verts)
    normal = p.normal
    rank = {v: r for r, v in enumerate(verts)}
    edges = set()
    for v in verts:
        for u in normal.neighbours(v).finite:
            if u in inside and rank[u] > rank[v]:
                edges.add((v, u))
        # infinite-degree vertices: their family neighbours with small rank
        if normal.neighbours(v).infinite:
            for u in verts:
                if rank[u] > rank[v] and v in normal.neighbours(u).finite:
                    edges.add((v, u))
    return Exhaustion(verts, tuple(sorted(edges, key=lambda e: (rank[e[0]], rank[e[1]]))))
