"""Skew-symmetric unfoldings of s-decomposable diagrams."""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

from .blocks import Decomposition, unfold_block, validate_decomposition
from .model import Diagram, ExchangeMatrix
from .mutation import mutate_matrix, mutate_rows
from .realize import realize_diagram


class UnfoldingError(RuntimeError):
    """An assembled unfolding broke one of the two unfolding conditions."""


@dataclass(frozen=True)
class Unfolding:
    """``Bhat`` on the disjoint union of the index sets ``E[v]``.

    ``order`` lists the original nodes in matrix order, ``names`` the
    unfolded vertices (``"v#1"``, ``"v#2"``), ``folding`` maps each of them
    back to its node.
    """

    order: tuple[int, ...]
    E: dict[int, tuple[int, ...]]
    names: tuple[str, ...]
    Bhat: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def folding(self) -> dict[str, int]:
        return {self.names[a]: v for v, idx in self.E.items() for a in idx}

    def d(self) -> tuple[int, ...]:
        return tuple(len(self.E[v]) for v in self.order)

    def fold(self, Bhat: Sequence[Sequence[int]] | None = None) -> tuple[tuple[int, ...], ...]:
        """Column-block sums taken at the first column of each block."""
        M = self.Bhat if Bhat is None else Bhat
        return tuple(
            tuple(sum(M[a][self.E[y][0]] for a in self.E[x]) for y in self.order) for x in self.order
        )

    def to_json(self) -> dict:
        return {
            "nodes": list(self.order),
            "index_sets": {str(v): [self.names[a] for a in idx] for v, idx in self.E.items()},
            "Bhat": [list(r) for r in self.Bhat],
        }


def index_sets(D: Decomposition, nodes: Sequence[int]) -> dict[int, int]:
    """Copies per node: two for the doubled sealed node of an unfolding block, else one."""
    size = dict.fromkeys(nodes, 1)
    for pb in D.blocks:
        tpl = pb.template
        for name in tpl.doubled:
            size[pb.image(name)] = 2
    return size


def realize_decomposition(G: Diagram, D: Decomposition) -> ExchangeMatrix:
    """The realization of ``G`` whose skew-symmetrizer is the index-set size vector."""
    return realize_diagram(G, index_sets(D, G.nodes))


def violations(U: Unfolding, B: ExchangeMatrix) -> list[str]:
    """Failures of the two unfolding conditions of ``U.Bhat`` against ``B``."""
    out = []
    pos = {v: i for i, v in enumerate(U.order)}
    M = U.Bhat
    for x in U.order:
        for y in U.order:
            b = B[pos[x], pos[y]]
            for c in U.E[y]:
                s = sum(M[a][c] for a in U.E[x])
                if s != b:
                    out.append(f"column {U.names[c]} of block ({x},{y}) sums to {s}, expected {b}")
            if b >= 0:
                for a in U.E[x]:
                    for c in U.E[y]:
                        if M[a][c] < 0:
                            out.append(f"entry ({U.names[a]},{U.names[c]}) = {M[a][c]} < 0 while b({x},{y}) = {b}")
    return out


def build_unfolding(G: Diagram, D: Decomposition, B: ExchangeMatrix | None = None) -> Unfolding:
    """Glue the block unfoldings of ``D`` into one skew-symmetric matrix.

    ``B`` defaults to ``realize_decomposition(G, D)``; a supplied ``B`` must
    have the same skew-symmetrizer, since the index set sizes are fixed by
    the decomposition.  Raises ``ValueError`` on bad input and
    ``UnfoldingError`` if the result breaks an unfolding condition.
    """
    ok, diff = validate_decomposition(D, G)
    if not ok:
        raise ValueError("decomposition does not assemble to the diagram: " + "; ".join(diff[:3]))
    sizes = index_sets(D, G.nodes)
    if B is None:
        B = realize_decomposition(G, D)
    if B.n != len(G):
        raise ValueError(f"matrix has rank {B.n}, diagram has {len(G)} nodes")
    want = _reduced(G, sizes)
    if tuple(B.d.d) != want:
        raise ValueError(f"matrix skew-symmetrizer {B.d.d} differs from the index set sizes {want}")
    order = tuple(G.nodes)
    names: list[str] = []
    E: dict[int, tuple[int, ...]] = {}
    for v in order:
        E[v] = tuple(range(len(names), len(names) + sizes[v]))
        names.extend(f"{v}#{c + 1}" for c in range(sizes[v]))
    m = len(names)
    M = [[0] * m for _ in range(m)]
    for pb in D.blocks:
        bu = unfold_block(pb.kind)
        where = {}
        for name, verts in bu.index_sets.items():
            targets = E[pb.image(name)]
            for c, u in enumerate(verts):
                where[u] = targets[c]
        loc = [where[u] for u in bu.vertices]
        for i, a in enumerate(loc):
            for j, c in enumerate(loc):
                if bu.matrix[i][j]:
                    M[a][c] += bu.matrix[i][j]
    U = Unfolding(order, E, tuple(names), tuple(map(tuple, M)))
    bad = violations(U, B)
    if bad:
        raise UnfoldingError("; ".join(bad[:5]))
    return U


def _reduced(G: Diagram, sizes: dict[int, int]) -> tuple[int, ...]:
    """Index set sizes scaled down per component, as stored on a matrix."""
    out = dict(sizes)
    for comp in G.components():
        g = 0
        for v in comp:
            g = math.gcd(g, sizes[v])
        for v in comp:
            out[v] = sizes[v] // g
    return tuple(out[v] for v in G.nodes)


@dataclass(frozen=True)
class CommutationResult:
    ok: bool
    failing_prefix: tuple[int, ...] | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_commutation(B: ExchangeMatrix, U: Unfolding, seq: Sequence[int]) -> CommutationResult:
    """Track ``U`` along ``seq`` by composite mutations, re-checking both conditions each step.

    ``seq`` holds 0-based positions into ``U.order``.  A failure reports the
    shortest prefix after which the conditions no longer hold.
    """
    current = U
    bad = violations(current, B)
    if bad:
        return CommutationResult(False, (), bad[0])
    for step, k in enumerate(seq):
        B = mutate_matrix(B, k)
        rows = current.Bhat
        for j in current.E[current.order[k]]:
            rows = mutate_rows(rows, j)
        current = Unfolding(current.order, current.E, current.names, rows)
        bad = violations(current, B)
        if bad:
            return CommutationResult(False, tuple(seq[: step + 1]), bad[0])
    return CommutationResult(True)


def composite_flip_commutes(U: Unfolding, node: int) -> bool:
    """Whether every ordering of the mutations at ``E[node]`` gives the same matrix."""
    idx = U.E[node]
    results = set()
    for order in itertools.permutations(idx):
        rows = U.Bhat
        for j in order:
            rows = mutate_rows(rows, j)
        results.add(rows)
    return len(results) == 1


__all__ = [
    "CommutationResult",
    "Unfolding",
    "UnfoldingError",
    "build_unfolding",
    "check_commutation",
    "composite_flip_commutes",
    "index_sets",
    "realize_decomposition",
    "violations",
]
