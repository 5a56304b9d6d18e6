"""Exchange matrices, weighted diagrams and the conversions between them."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from math import gcd

INT64_MAX = 2**63 - 1


class MalformedInput(ValueError):
    """Input does not have the shape an operation requires."""


class NotSkewSymmetrizable(ValueError):
    """A square matrix admits no positive diagonal skew-symmetrizer."""

    def __init__(self, reason: str, pair: tuple[int, int] | None = None):
        super().__init__(reason)
        self.reason = reason
        self.pair = pair


class ArithmeticOverflow(OverflowError):
    """An entry left the signed 64-bit range."""


def checked(value: int) -> int:
    if not -INT64_MAX - 1 <= value <= INT64_MAX:
        raise ArithmeticOverflow(f"entry {value} exceeds 64-bit range")
    return value


class Color(str, enum.Enum):
    WHITE = "white"
    BLACK = "black"
    UNCOLORED = "uncolored"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def _as_rows(entries: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in entries)
    n = len(rows)
    if n == 0:
        raise MalformedInput("matrix must have at least one row")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MalformedInput(f"row {i + 1} has {len(row)} entries, expected {n}")
    return rows


@dataclass(frozen=True)
class Skewsymmetrizer:
    """Positive diagonal ``d`` with ``b[i][j] * d[j] == -b[j][i] * d[i]``."""

    d: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.d)


def is_skew_symmetrizable(entries: Sequence[Sequence[int]]) -> Skewsymmetrizer:
    """Find the reduced skew-symmetrizer of a square integer matrix.

    Ratios ``d[j] / d[i] = -b[j][i] / b[i][j]`` are propagated over each
    connected component of the nonzero pattern; every non-tree edge is then
    checked against the propagated values.  Each component is scaled to the
    smallest positive integers.

    Raises
    ------
    MalformedInput
        Non-square matrix or nonzero diagonal.
    NotSkewSymmetrizable
        A sign pair is violated or a cycle has inconsistent ratio.
    """
    rows = _as_rows(entries)
    n = len(rows)
    for i in range(n):
        if rows[i][i] != 0:
            raise MalformedInput(f"diagonal entry ({i + 1},{i + 1}) is nonzero")
    for i in range(n):
        for j in range(i + 1, n):
            a, b = rows[i][j], rows[j][i]
            if (a == 0) != (b == 0) or (a != 0 and (a > 0) == (b > 0)):
                raise NotSkewSymmetrizable(
                    f"sign pair ({i + 1},{j + 1}) violated: b={a}, b'={b}", (i, j)
                )

    # d as exact fractions num/den, propagated by BFS
    num = [0] * n
    den = [0] * n
    d = [0] * n
    for root in range(n):
        if den[root]:
            continue
        num[root], den[root] = 1, 1
        component = [root]
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if rows[i][j] == 0:
                    continue
                # d_j = -b_ji * d_i / b_ij
                nn, dd = -rows[j][i] * num[i], rows[i][j] * den[i]
                if dd < 0:
                    nn, dd = -nn, -dd
                if den[j] == 0:
                    g = gcd(nn, dd)
                    num[j], den[j] = nn // g, dd // g
                    component.append(j)
                    stack.append(j)
                elif num[j] * dd != nn * den[j]:
                    raise NotSkewSymmetrizable(
                        f"inconsistent cycle ratio through ({i + 1},{j + 1})", (i, j)
                    )
        lcm = 1
        for i in component:
            lcm = lcm * den[i] // gcd(lcm, den[i])
        vals = [num[i] * (lcm // den[i]) for i in component]
        g = 0
        for v in vals:
            g = gcd(g, v)
        for i, v in zip(component, vals):
            d[i] = v // g
    return Skewsymmetrizer(tuple(d))


@dataclass(frozen=True)
class ExchangeMatrix:
    """A skew-symmetrizable integer matrix together with its reduced witness."""

    rows: tuple[tuple[int, ...], ...]
    d: Skewsymmetrizer

    @classmethod
    def from_rows(cls, entries: Iterable[Iterable[int]]) -> ExchangeMatrix:
        rows = _as_rows(entries)
        for row in rows:
            for x in row:
                checked(x)
        return cls(rows, is_skew_symmetrizable(rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def is_skew_symmetric(self) -> bool:
        return all(self.rows[i][j] == -self.rows[j][i] for i in range(self.n) for j in range(self.n))

    def max_abs(self) -> int:
        return max((abs(x) for r in self.rows for x in r), default=0)


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------


class Diagram:
    """Oriented graph with positive integer edge weights and node colors.

    Nodes are integers. ``edges`` maps ``(tail, head)`` to a weight; at most
    one orientation is stored for any unordered pair.
    """

    __slots__ = ("_nodes", "_colors", "_edges", "_adj")

    def __init__(
        self,
        nodes: Iterable[int],
        edges: Mapping[tuple[int, int], int] | Iterable[tuple[int, int, int]] = (),
        colors: Mapping[int, Color | str] | None = None,
    ):
        node_list = sorted(set(int(v) for v in nodes))
        self._nodes = tuple(node_list)
        node_set = set(node_list)
        items = edges.items() if isinstance(edges, Mapping) else (((t, h), w) for t, h, w in edges)
        edge_map: dict[tuple[int, int], int] = {}
        for (t, h), w in items:
            t, h, w = int(t), int(h), int(w)
            if t == h:
                raise MalformedInput(f"loop at node {t}")
            if t not in node_set or h not in node_set:
                raise MalformedInput(f"edge ({t},{h}) references an unknown node")
            if w < 1:
                raise MalformedInput(f"edge ({t},{h}) has weight {w} < 1")
            if (t, h) in edge_map or (h, t) in edge_map:
                raise MalformedInput(f"more than one edge between {t} and {h}")
            edge_map[(t, h)] = w
        self._edges = edge_map
        cmap: dict[int, Color] = {}
        if colors:
            for v, c in colors.items():
                c = Color(c)
                if int(v) not in node_set:
                    raise MalformedInput(f"color given for unknown node {v}")
                if c is not Color.UNCOLORED:
                    cmap[int(v)] = c
        self._colors = cmap
        self._adj: dict[int, dict[int, int]] | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def edges(self) -> Mapping[tuple[int, int], int]:
        return self._edges

    def color(self, v: int) -> Color:
        return self._colors.get(v, Color.UNCOLORED)

    @property
    def colors(self) -> Mapping[int, Color]:
        return self._colors

    def __len__(self) -> int:
        return len(self._nodes)

    def adjacency(self) -> dict[int, dict[int, int]]:
        """``adj[u][v]`` is the signed weight: positive for u->v, negative for v->u."""
        if self._adj is None:
            adj: dict[int, dict[int, int]] = {v: {} for v in self._nodes}
            for (t, h), w in self._edges.items():
                adj[t][h] = w
                adj[h][t] = -w
            self._adj = adj
        return self._adj

    def signed(self, u: int, v: int) -> int:
        w = self._edges.get((u, v))
        if w is not None:
            return w
        w = self._edges.get((v, u))
        return -w if w is not None else 0

    def weight(self, u: int, v: int) -> int:
        return abs(self.signed(u, v))

    def neighbors(self, v: int) -> dict[int, int]:
        return self.adjacency()[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency()[v])

    def components(self) -> list[tuple[int, ...]]:
        adj = self.adjacency()
        seen: set[int] = set()
        out = []
        for root in self._nodes:
            if root in seen:
                continue
            seen.add(root)
            comp = [root]
            stack = [root]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subdiagram(self, nodes: Iterable[int]) -> Diagram:
        keep = set(nodes)
        return Diagram(
            keep,
            {e: w for e, w in self._edges.items() if e[0] in keep and e[1] in keep},
            {v: c for v, c in self._colors.items() if v in keep},
        )

    def relabel(self, mapping: Mapping[int, int]) -> Diagram:
        return Diagram(
            (mapping[v] for v in self._nodes),
            {(mapping[t], mapping[h]): w for (t, h), w in self._edges.items()},
            {mapping[v]: c for v, c in self._colors.items()},
        )

    def uncolored(self) -> Diagram:
        return Diagram(self._nodes, self._edges)

    def with_colors(self, colors: Mapping[int, Color | str]) -> Diagram:
        return Diagram(self._nodes, self._edges, colors)

    def edge_list(self) -> list[tuple[int, int, int]]:
        return sorted((t, h, w) for (t, h), w in self._edges.items())

    # -- value semantics ---------------------------------------------------

    def _key(self):
        return (self._nodes, frozenset(self._edges.items()), frozenset(self._colors.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"Diagram(nodes={list(self._nodes)}, edges={self.edge_list()})"


def matrix_to_diagram(B: ExchangeMatrix) -> Diagram:
    """One node per index; ``i -> j`` with weight ``-b_ij * b_ji`` whenever ``b_ij > 0``."""
    n = B.n
    edges = {}
    for i in range(n):
        row = B.rows[i]
        for j in range(n):
            if row[j] > 0:
                edges[(i, j)] = checked(-row[j] * B.rows[j][i])
    return Diagram(range(n), edges)


def quiver_adjacency_matrix(n: int, arrows: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Signed arrow counts of a quiver given as a list of arrows ``(i, j)`` on ``range(n)``."""
    b = [[0] * n for _ in range(n)]
    for i, j in arrows:
        if not (0 <= i < n and 0 <= j < n):
            raise MalformedInput(f"arrow ({i},{j}) out of range")
        if i == j:
            raise MalformedInput(f"loop at {i}")
        b[i][j] += 1
        b[j][i] -= 1
    seen = {}
    for i, j in arrows:
        key = (min(i, j), max(i, j))
        direction = i < j
        if seen.setdefault(key, direction) != direction:
            raise MalformedInput(f"2-cycle between {i} and {j}")
    return b


def quiver_arrows(rows: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Expand a skew-symmetric matrix into its multiset of arrows."""
    out = []
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if x > 0:
                out.extend([(i, j)] * x)
    return out
