"""Shared, seeded test corpora.

Every corpus is deterministic so frozen values in the tests stay valid.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterator
from functools import lru_cache

from sdecomp.canon import canonical_form
from sdecomp.generate import random_diagram, random_matrix
from sdecomp.model import Diagram, ExchangeMatrix
from sdecomp.mutation import NonRealizable
from sdecomp.realize import realize_diagram


def connected_diagrams(n: int, weights: tuple[int, ...]) -> Iterator[Diagram]:
    """Every connected diagram on ``n`` nodes with the given weights, one per isomorphism class."""
    pairs = list(itertools.combinations(range(n), 2))
    opts = [None] + [(flip, w) for flip in (False, True) for w in weights]
    seen = set()
    for combo in itertools.product(opts, repeat=len(pairs)):
        edges = [(b, a, o[1]) if o[0] else (a, b, o[1]) for (a, b), o in zip(pairs, combo) if o]
        G = Diagram(range(n), edges)
        if not G.is_connected():
            continue
        key = canonical_form(G)
        if key in seen:
            continue
        seen.add(key)
        yield G


@lru_cache(maxsize=None)
def small_diagrams(max_nodes: int = 4, weights: tuple[int, ...] = (1, 2, 3, 4)) -> tuple[Diagram, ...]:
    return tuple(G for n in range(1, max_nodes + 1) for G in connected_diagrams(n, weights))


@lru_cache(maxsize=None)
def random_five_node(count: int = 10_000, seed: int = 20) -> tuple[Diagram, ...]:
    """Random connected 5-node diagrams; half are drawn from weights {1,2,4} to keep many decomposable."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        weights = (1, 2, 4) if len(out) % 2 else (1, 2, 3, 4)
        G = random_diagram(rng, 5, weights, rng.choice((0.35, 0.5, 0.7)))
        if G.is_connected():
            out.append(G)
    return tuple(out)


@lru_cache(maxsize=None)
def random_matrices(count: int = 1000, seed: int = 10, max_n: int = 8) -> tuple[ExchangeMatrix, ...]:
    rng = random.Random(seed)
    return tuple(random_matrix(rng, rng.randint(1, max_n)) for _ in range(count))


def realizable(G: Diagram) -> ExchangeMatrix | None:
    try:
        return realize_diagram(G)
    except NonRealizable:
        return None
