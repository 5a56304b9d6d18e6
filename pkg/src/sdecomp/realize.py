"""Lift a weighted diagram to some exchange matrix that realizes it."""

from __future__ import annotations

from fractions import Fraction

from .model import Diagram, ExchangeMatrix


def _factorizations(w: int) -> list[tuple[int, int]]:
    """Pairs ``(p, q)`` with ``p * q == w``, balanced ones first."""
    pairs = [(p, w // p) for p in range(1, w + 1) if w % p == 0]
    return sorted(pairs, key=lambda pq: (abs(pq[0] - pq[1]), pq))


def realize_diagram(G: Diagram, ratios: dict[int, int] | None = None) -> ExchangeMatrix:
    """Return a matrix whose diagram is ``G``, indexed by ``G.nodes`` in order.

    ``ratios`` optionally fixes the skew-symmetrizer (node -> d).  Otherwise a
    depth-first search picks, edge by edge, how each weight ``w = p * q`` is
    split into ``b_xy = p`` and ``b_yx = -q``, preferring balanced splits.
    """
    from .mutation import NonRealizable

    nodes = G.nodes
    index = {v: i for i, v in enumerate(nodes)}
    adj = G.adjacency()
    d: dict[int, Fraction] = {}
    if ratios is not None:
        d = {v: Fraction(ratios[v]) for v in nodes}
    else:
        for comp in G.components():
            order = []
            seen = {comp[0]}
            stack = [comp[0]]
            parent_edge = {}
            while stack:
                x = stack.pop()
                order.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        parent_edge[y] = x
                        stack.append(y)
            if not _assign(G, order, parent_edge, d):
                raise NonRealizable("no skew-symmetrizer is compatible with the edge weights")
    n = len(nodes)
    rows = [[0] * n for _ in range(n)]
    for (t, h), w in G.edges.items():
        # b_th * d_h = -b_ht * d_t and b_th * (-b_ht) = w
        r = d[h] / d[t]
        p2 = Fraction(w) / r
        p = _exact_sqrt(p2)
        if p is None or w % p:
            raise NonRealizable(f"edge ({t},{h}) of weight {w} is incompatible with d ratio {r}")
        rows[index[t]][index[h]] = p
        rows[index[h]][index[t]] = -(w // p)
    return ExchangeMatrix.from_rows(rows)


def _exact_sqrt(x: Fraction) -> int | None:
    if x.denominator != 1:
        return None
    from math import isqrt

    r = isqrt(x.numerator)
    return r if r * r == x.numerator else None


def _assign(G, order, parent_edge, d) -> bool:
    root = order[0]
    d[root] = Fraction(1)
    rest = order[1:]

    def consistent(v) -> bool:
        for u, s in G.adjacency()[v].items():
            if u in d and u != parent_edge.get(v):
                w = abs(s)
                t, h = (v, u) if s > 0 else (u, v)
                p = _exact_sqrt(Fraction(w) / (d[h] / d[t]))
                if p is None or w % p:
                    return False
        return True

    def go(i: int) -> bool:
        if i == len(rest):
            return True
        v = rest[i]
        u = parent_edge[v]
        s = G.signed(u, v)
        for p, q in _factorizations(abs(s)):
            # tail gets p, head gets -q; d_head / d_tail = q / p
            d[v] = d[u] * Fraction(q, p) if s > 0 else d[u] * Fraction(p, q)
            if consistent(v) and go(i + 1):
                return True
            del d[v]
        return False

    return go(0)
