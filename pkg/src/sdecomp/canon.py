"""Canonical forms of colored weighted oriented graphs.

Small graphs get an exact form by individualization/refinement search; past
``certified_bound`` nodes only the refined color classes are hashed, which is
isomorphism-invariant but may identify non-isomorphic graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Color, Diagram

DEFAULT_CERTIFIED_BOUND = 12

_COLOR_CODE = {Color.UNCOLORED: 0, Color.WHITE: 1, Color.BLACK: 2}


@dataclass(frozen=True)
class CanonicalForm:
    certificate: tuple
    certified: bool
    # node id -> canonical position; a witness, not part of the identity
    permutation: tuple[tuple[int, int], ...] = field(compare=False, default=())

    def relabeling(self) -> dict[int, int]:
        return dict(self.permutation)


def _refine(nodes, adj, colors):
    """Equitable refinement; ``colors`` maps node -> int, returns a new map."""
    ncells = len(set(colors.values()))
    while True:
        sig = {
            v: (colors[v], tuple(sorted((colors[u], w) for u, w in adj[v].items())))
            for v in nodes
        }
        order = sorted(set(sig.values()))
        index = {s: i for i, s in enumerate(order)}
        new = {v: index[sig[v]] for v in nodes}
        if len(order) == ncells:
            return new
        colors, ncells = new, len(order)


def _initial(g: Diagram):
    nodes = g.nodes
    adj = g.adjacency()
    keys = {v: _COLOR_CODE[g.color(v)] for v in nodes}
    order = sorted(set(keys.values()))
    index = {k: i for i, k in enumerate(order)}
    return nodes, adj, {v: index[keys[v]] for v in nodes}


def _twin_classes(cell, adj):
    """One representative per class of interchangeable cell members."""
    reps = []
    for v in cell:
        for r in reps:
            # the transposition (v r) is an automorphism
            if r not in adj[v] and adj[v] == adj[r]:
                break
        else:
            reps.append(v)
    return reps


def _certificate(g: Diagram, pos: dict[int, int]):
    n = len(g)
    edges = tuple(sorted((pos[t], pos[h], w) for (t, h), w in g.edges.items()))
    cols = [0] * n
    for v in g.nodes:
        cols[pos[v]] = _COLOR_CODE[g.color(v)]
    return (n, tuple(cols), edges)


def canonical_form(g: Diagram, certified_bound: int = DEFAULT_CERTIFIED_BOUND) -> CanonicalForm:
    nodes, adj, colors = _initial(g)
    colors = _refine(nodes, adj, colors)
    n = len(nodes)
    if n > certified_bound:
        classes = {}
        for v in nodes:
            classes.setdefault(colors[v], []).append(v)
        edges = tuple(sorted((colors[t], colors[h], w) for (t, h), w in g.edges.items()))
        sizes = tuple(sorted((c, len(vs), _COLOR_CODE[g.color(vs[0])]) for c, vs in classes.items()))
        return CanonicalForm(("refined", n, sizes, edges), False, tuple(sorted(colors.items())))

    best = None
    best_pos = None
    stack = [colors]
    while stack:
        col = stack.pop()
        if len(set(col.values())) == n:
            cert = _certificate(g, col)
            if best is None or cert < best:
                best, best_pos = cert, col
            continue
        cells: dict[int, list[int]] = {}
        for v in nodes:
            cells.setdefault(col[v], []).append(v)
        target = min((c for c, vs in cells.items() if len(vs) > 1))
        for v in _twin_classes(cells[target], adj):
            keyed = {u: (col[u], 0 if u == v or col[u] != target else 1) for u in nodes}
            order = sorted(set(keyed.values()))
            index = {k: i for i, k in enumerate(order)}
            stack.append(_refine(nodes, adj, {u: index[keyed[u]] for u in nodes}))
    assert best_pos is not None or n == 0
    if n == 0:
        return CanonicalForm((0, (), ()), True, ())
    return CanonicalForm(best, True, tuple(sorted(best_pos.items())))


def isomorphic(a: Diagram, b: Diagram) -> bool:
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return False
    return canonical_form(a) == canonical_form(b)
