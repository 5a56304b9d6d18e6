"""Random and structured diagrams for testing and benchmarking."""

from __future__ import annotations

import math
import random
from collections.abc import Sequence

from .blocks import ELEMENTARY, NEW, Decomposition, GluingError, PlacedBlock, assemble, catalog
from .model import Color, Diagram, ExchangeMatrix


def random_diagram(rng: random.Random, n: int, weights: Sequence[int] = (1, 2, 4), density: float = 0.5) -> Diagram:
    """Uniformly oriented random diagram on ``n`` nodes."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = rng.choice(weights)
                edges.append((i, j, w) if rng.random() < 0.5 else (j, i, w))
    return Diagram(range(n), edges)


def random_matrix(
    rng: random.Random, n: int, d_choices: Sequence[int] = (1, 2, 3), max_entry: int = 2, density: float = 0.6
) -> ExchangeMatrix:
    """Random skew-symmetrizable matrix with skew-symmetrizer drawn from ``d_choices``.

    Entries are built as ``b_ij = a * d_i / g`` and ``b_ji = -a * d_j / g``
    with ``g = gcd(d_i, d_j)``, so ``b_ij d_j = -b_ji d_i`` holds by construction.
    """
    d = [rng.choice(d_choices) for _ in range(n)]
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() >= density:
                continue
            a = rng.choice([k for k in range(-max_entry, max_entry + 1) if k])
            g = math.gcd(d[i], d[j])
            rows[i][j] = a * d[i] // g
            rows[j][i] = -a * d[j] // g
    return ExchangeMatrix.from_rows(rows)


def random_glued(
    rng: random.Random,
    n_blocks: int,
    kinds: Sequence[str] = ELEMENTARY + NEW,
    glue_prob: float = 0.8,
    tries: int = 50,
) -> tuple[Diagram, Decomposition] | None:
    """Glue ``n_blocks`` random blocks along random white nodes.

    Returns the assembled diagram (nodes relabeled 0..n-1 in random order)
    together with the decomposition that produced it, or ``None`` if every
    attempt broke a gluing rule.
    """
    cat = catalog()
    for _ in range(tries):
        chosen = [rng.choice(kinds) for _ in range(n_blocks)]
        names: list[tuple[int, str]] = []
        for bi, k in enumerate(chosen):
            names.extend((bi, v) for v in cat[k].nodes)
        node_of = {bn: i for i, bn in enumerate(names)}
        whites = [bn for bn in names if cat[chosen[bn[0]]].colors[bn[1]] is Color.WHITE]
        rng.shuffle(whites)
        free = list(whites)
        while len(free) >= 2 and rng.random() < glue_prob:
            a = free.pop()
            partners = [b for b in free if b[0] != a[0]]
            if not partners:
                break
            b = rng.choice(partners)
            free.remove(b)
            node_of[b] = node_of[a]
        ids = sorted(set(node_of.values()))
        perm = list(range(len(ids)))
        rng.shuffle(perm)
        relabel = {old: perm[i] for i, old in enumerate(ids)}
        blocks = []
        for bi, k in enumerate(chosen):
            images = tuple(relabel[node_of[(bi, v)]] for v in cat[k].nodes)
            blocks.append(PlacedBlock(k, images))
        D = Decomposition(tuple(blocks))
        try:
            G = assemble(D)
        except GluingError:
            continue
        return G.uncolored(), D
    return None


def block_chain(length: int, kinds: Sequence[str] = ("Triangle", "II", "Diamond", "Spike")) -> Diagram:
    """A path of blocks, each glued to the next at one white node.

    Used to scale the decomposer to large inputs; the result is uncolored
    and s-decomposable by construction.
    """
    cat = catalog()
    blocks = []
    nxt = 0
    prev_free: int | None = None
    for i in range(length):
        tpl = cat[kinds[i % len(kinds)]]
        whites = list(tpl.white)
        images = {}
        first = True
        for v in tpl.nodes:
            if first and v == whites[0] and prev_free is not None:
                images[v] = prev_free
                first = False
            else:
                images[v] = nxt
                nxt += 1
        out = whites[-1] if len(whites) > 1 else None
        blocks.append(PlacedBlock(tpl.kind, tuple(images[v] for v in tpl.nodes)))
        prev_free = images[out] if out is not None else None
    return assemble(Decomposition(tuple(blocks))).uncolored()
