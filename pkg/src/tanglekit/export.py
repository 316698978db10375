"""DOT and JSON renderings of the inverse system, Gamma limits and cuts."""

from __future__ import annotations

from .gamma import GammaElement, finite_inverse_limit
from .inverse_system import bonding
from .presentation.components import components_minus
from .presentation.ops import exhaustion


def _q(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def inverse_system_data(p, depth):
    """Layers X_1 ... X_depth with their descriptors and the bonding maps between them."""
    layers, maps = [], []
    for n in range(1, depth + 1):
        X = p.canonical(n)
        space = components_minus(p, X)
        layers.append({"n": n, "X": sorted(X, key=p.rank),
                       "descriptors": [d.to_json() for d in space.descriptors]})
        if n > 1:
            maps.append({"from": n, "to": n - 1, **bonding(p, p.canonical(n - 1), X).to_json()})
    return {"layers": layers, "bonding": maps}


def inverse_system_dot(p, depth):
    data = inverse_system_data(p, depth)
    lines = ["digraph inverse_system {", "  rankdir=BT;", "  node [shape=box];"]
    for layer in data["layers"]:
        n = layer["n"]
        lines.append(f"  subgraph cluster_{n} {{")
        lines.append(f"    label={_q('X_' + str(n) + ' = {' + ', '.join(layer['X']) + '}')};")
        for d in layer["descriptors"]:
            label = d["key"] + (f"\\n[{d['indices']}]" if d["kind"] == "family" else "")
            shape = ", shape=box3d" if d["kind"] == "family" else ""
            lines.append(f"    {_q(f'{n}/' + d['key'])} [label={_q(label)}{shape}];")
        lines.append("  }")
    for m in data["bonding"]:
        for src, tgt in m["map"].items():
            attrs = " [style=dashed, label=\"memberwise\"]" if tgt.get("memberwise") else ""
            if tgt.get("member") is not None:
                attrs = f" [label={_q('member ' + str(tgt['member']))}]"
            lines.append(f"  {_q(str(m['from']) + '/' + src)} -> {_q(str(m['to']) + '/' + tgt['to'])}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def trivial_delta(p, depth):
    return [GammaElement.trivial(p, p.canonical(n)) for n in range(1, depth + 1)]


def gamma_limit_data(p, depth, delta=None):
    delta = delta if delta is not None else trivial_delta(p, depth)
    return finite_inverse_limit(delta).to_json()


def gamma_limit_dot(p, depth, delta=None):
    delta = delta if delta is not None else trivial_delta(p, depth)
    lim = finite_inverse_limit(delta)
    lines = ["digraph gamma_limit {", "  rankdir=BT;", "  node [shape=ellipse];"]
    for i, g in enumerate(lim.elements):
        j = g.to_json()
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_q('gamma_' + str(i) + ' at {' + ', '.join(j['X']) + '}')};")
        for n, cls in enumerate(j["classes"]):
            lines.append(f"    {_q(f'{i}/{n}')} [label={_q(' | '.join(cls))}];")
        lines.append("  }")
    for t, (thread, labels) in enumerate(zip(lim.threads, lim.annotations)):
        pairs = list(enumerate(thread))
        for (i, a), (k, b) in zip(pairs[1:], pairs):
            lines.append(f"  {_q(f'{i}/{a}')} -> {_q(f'{k}/{b}')} [label={_q('thread ' + str(t))}];")
        if labels:
            lines.append(f"  {_q('thread ' + str(t))} [shape=note, label={_q(', '.join(labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cut_dot(p, result):
    """The truncation around a cut with the two sides coloured and cut edges dashed."""
    cut = result.cut
    depth = result.depth or 0
    ex = exhaustion(p, max(depth, max(p.rank(x) for e in cut.edges for x in e) + 1))
    cut_edges = {frozenset(e) for e in cut.edges}
    lines = ["graph cut {", "  node [style=filled];"]
    for v in ex.vertices:
        colour = "lightblue" if cut.contains(v) else "salmon"
        lines.append(f"  {_q(v)} [fillcolor={colour}];")
    for a, b in ex.edges:
        style = " [style=dashed, color=red]" if frozenset((a, b)) in cut_edges else ""
        lines.append(f"  {_q(a)} -- {_q(b)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
