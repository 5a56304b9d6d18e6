"""Matrix and diagram mutation, composite mutation, mutation-class scans."""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from math import isqrt

from .canon import CanonicalForm, canonical_form
from .model import Diagram, ExchangeMatrix, MalformedInput, checked, matrix_to_diagram


class NonRealizable(ValueError):
    """The diagram mutation rule has no integral solution: no matrix realizes the diagram."""


class UnfoldingViolation(ValueError):
    """A composite mutation depends on the order of its factors."""


def mutate_rows(rows: Sequence[Sequence[int]], k: int) -> tuple[tuple[int, ...], ...]:
    n = len(rows)
    if not 0 <= k < n:
        raise IndexError(f"mutation index {k} out of range for order {n}")
    rk = rows[k]
    out = []
    for i in range(n):
        row = rows[i]
        bik = row[k]
        if i == k:
            out.append(tuple(-x for x in row))
            continue
        new = list(row)
        new[k] = -bik
        if bik:
            for j in range(n):
                if j == k:
                    continue
                bkj = rk[j]
                # (|b_ik| b_kj + b_ik |b_kj|) / 2 is nonzero only when signs agree
                if bik > 0 and bkj > 0:
                    new[j] = checked(row[j] + bik * bkj)
                elif bik < 0 and bkj < 0:
                    new[j] = checked(row[j] - bik * bkj)
        out.append(tuple(new))
    return tuple(out)


def mutate_matrix(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Mutation in direction ``k``; the skew-symmetrizer is carried over unchanged."""
    return ExchangeMatrix(mutate_rows(B.rows, k), B.d)


def mutate_sequence(B: ExchangeMatrix, seq: Iterable[int]) -> ExchangeMatrix:
    for k in seq:
        B = mutate_matrix(B, k)
    return B


def mutate_diagram(S: Diagram, k: int, realization: ExchangeMatrix | None = None) -> Diagram:
    """Mutate a diagram at node ``k``.

    With a realizing matrix the mutation is lifted to the matrix.  Otherwise
    the square-root rule is applied to every two-path ``y -> k -> x``: the new
    weight is ``d = ab + c - 2 s sqrt(abc)`` with ``s = +1`` when the old
    triangle is oriented, which requires ``abc`` to be a perfect square.
    """
    if k not in S.nodes:
        raise MalformedInput(f"node {k} is not in the diagram")
    if realization is not None:
        index = {v: i for i, v in enumerate(S.nodes)}
        out = matrix_to_diagram(mutate_matrix(realization, index[k]))
        return Diagram(S.nodes, {(S.nodes[t], S.nodes[h]): w for (t, h), w in out.edges.items()}, S.colors)

    adj = S.adjacency()
    edges = {}
    for (t, h), w in S.edges.items():
        if t == k or h == k:
            edges[(h, t)] = w
        else:
            edges[(t, h)] = w
    ins = [y for y, s in adj[k].items() if s < 0]  # y -> k
    outs = [x for x, s in adj[k].items() if s > 0]  # k -> x
    for y in ins:
        b = S.weight(y, k)
        for x in outs:
            a = S.weight(k, x)
            signed_c = S.signed(x, y)  # > 0: x -> y closes an oriented triangle
            c = abs(signed_c)
            r2 = a * b * c
            r = isqrt(r2)
            if r * r != r2:
                raise NonRealizable(f"a*b*c = {r2} is not a perfect square at ({y},{k},{x})")
            sc = 1 if signed_c > 0 else -1
            d = checked(a * b + c - 2 * sc * r)
            edges.pop((x, y), None)
            edges.pop((y, x), None)
            if d == 0:
                continue
            # sqrt(ab) - sc*sqrt(c) > 0 means the new triangle x -> k -> y -> x is oriented
            oriented_after = sc < 0 or a * b > c
            edges[(y, x) if oriented_after else (x, y)] = d
    return Diagram(S.nodes, edges, S.colors)


def composite_mutate(Bhat: Sequence[Sequence[int]], block: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Apply ``mu_j`` for every ``j`` in ``block``; raise if the result depends on the order."""
    rows = tuple(tuple(r) for r in Bhat)
    result = rows
    for j in block:
        result = mutate_rows(result, j)
    if any(rows[i][j] for i in block for j in block):
        for order in itertools.permutations(block):
            other = rows
            for j in order:
                other = mutate_rows(other, j)
            if other != result:
                raise UnfoldingViolation(f"composite mutation over {list(block)} depends on the order")
    return result


# ---------------------------------------------------------------------------
# Mutation-class exploration
# ---------------------------------------------------------------------------

EXHAUSTED = "exhausted"
WEIGHT_CUTOFF = "weight-cutoff"
NODE_BUDGET = "node-budget"


@dataclass
class MutationClassScan:
    seen: set[CanonicalForm]
    frontier_size: int
    reason: str
    max_weight: int
    witness: ExchangeMatrix | None = None  # matrix carrying a weight at or above the cutoff
    representatives: list[ExchangeMatrix] = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return len(self.seen)


def _max_weight(B: ExchangeMatrix) -> int:
    n = B.n
    return max((-B.rows[i][j] * B.rows[j][i] for i in range(n) for j in range(n)), default=0)


def scan_mutation_class(
    start: ExchangeMatrix | Diagram,
    weight_cutoff: int = 5,
    budget: int = 100_000,
    keep_representatives: bool = False,
) -> MutationClassScan:
    """Breadth-first search over single mutations, deduplicated by diagram form.

    Stops with ``weight-cutoff`` as soon as a diagram carries a weight of at
    least ``weight_cutoff``, with ``node-budget`` once more than ``budget``
    diagrams were seen, and with ``exhausted`` when the class is complete.
    """
    if isinstance(start, Diagram):
        from .realize import realize_diagram

        B0 = realize_diagram(start)
    else:
        B0 = start
    form0 = canonical_form(matrix_to_diagram(B0))
    seen = {form0}
    reps = [B0] if keep_representatives else []
    top = _max_weight(B0)
    if top >= weight_cutoff:
        return MutationClassScan(seen, 1, WEIGHT_CUTOFF, top, B0, reps)
    queue = deque([B0])
    while queue:
        B = queue.popleft()
        for k in range(B.n):
            C = mutate_matrix(B, k)
            w = _max_weight(C)
            top = max(top, w)
            if w >= weight_cutoff:
                return MutationClassScan(seen, len(queue), WEIGHT_CUTOFF, top, C, reps)
            form = canonical_form(matrix_to_diagram(C))
            if form in seen:
                continue
            seen.add(form)
            if keep_representatives:
                reps.append(C)
            if len(seen) > budget:
                return MutationClassScan(seen, len(queue) + 1, NODE_BUDGET, top, None, reps)
            queue.append(C)
    return MutationClassScan(seen, 0, EXHAUSTED, top, None, reps)
