"""Brute-force ground truth for decompositions and mutation-finiteness.

Nothing here shares code with the decomposer: placements are enumerated as
all injective maps of every catalog template into the target, and gluings
are searched exhaustively.  Use on small diagrams only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .blocks import Decomposition, PlacedBlock, catalog, validate_decomposition
from .model import Color, Diagram, ExchangeMatrix, matrix_to_diagram
from .mutation import EXHAUSTED, WEIGHT_CUTOFF, scan_mutation_class


@dataclass
class OracleResult:
    decompositions: set[Decomposition] = field(default_factory=set)
    complete: bool = True

    @property
    def decomposable(self) -> bool:
        return bool(self.decompositions)

    def signatures(self) -> set[frozenset]:
        return {d.signature() for d in self.decompositions}


def _plausible(tpl, images, G: Diagram) -> bool:
    """Necessary conditions read straight off the gluing rules."""
    img = dict(zip(tpl.nodes, images))
    for a, b, w in tpl.edges:
        x, y = img[a], img[b]
        s = G.signed(x, y)
        white = tpl.colors[a] is Color.WHITE and tpl.colors[b] is Color.WHITE
        if not white or w != 1:
            # an edge at a sealed node is never merged with another one
            if s != w:
                return False
        elif s not in (0, 1, 4):
            return False
    for v in tpl.nodes:
        if tpl.colors[v] is Color.BLACK:
            x = img[v]
            mine = {img[u] for u in tpl.neighbors[v]}
            if set(G.neighbors(x)) != mine:
                return False
    return True


def placements(G: Diagram) -> list[PlacedBlock]:
    out = set()
    nodes = G.nodes
    for tpl in catalog().values():
        for images in itertools.permutations(nodes, len(tpl.nodes)):
            if _plausible(tpl, images, G):
                out.add(PlacedBlock(tpl.kind, images).canonical())
    return sorted(out, key=lambda b: (b.kind, b.images))


def oracle_decompose(G: Diagram, max_blocks: int | None = None, first_only: bool = False) -> OracleResult:
    """Every decomposition of ``G`` into at most ``max_blocks`` catalog blocks.

    Each node carries at most two block nodes and each block has at least two
    nodes, so ``len(G)`` blocks always suffice; a smaller ``max_blocks`` that
    cuts the search marks the result incomplete.
    """
    bound = len(G) if max_blocks is None else max_blocks
    result = OracleResult()
    for w in G.edges.values():
        if w not in (1, 2, 4):
            return result
    cands = placements(G)
    by_node: dict[int, list[int]] = {v: [] for v in G.nodes}
    by_pair: dict[tuple[int, int], list[int]] = {}
    info = []
    for ci, pb in enumerate(cands):
        tpl = pb.template
        cols = [(v, tpl.colors[name]) for name, v in zip(tpl.nodes, pb.images)]
        contrib = [(t, h, w, ww) for t, h, w, ww in pb.contributions()]
        info.append((cols, contrib))
        for v in pb.images:
            by_node[v].append(ci)
        for t, h, _, _ in contrib:
            by_pair.setdefault((min(t, h), max(t, h)), []).append(ci)

    count = {v: 0 for v in G.nodes}
    sealed = {v: False for v in G.nodes}
    pairs: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    chosen: list[int] = []

    def value(key):
        cs = pairs.get(key, [])
        if not cs:
            return 0
        if len(cs) == 1:
            t, h, w = cs[0]
            return w if (t, h) == key else -w
        (t1, h1, _), (t2, h2, _) = cs
        if (t1, h1) != (t2, h2):
            return 0
        return 4 if (t1, h1) == key else -4

    def target(key):
        return G.signed(*key)

    def open_(key) -> bool:
        x, y = key
        return len(pairs.get(key, [])) < 2 and count[x] < 2 and count[y] < 2 and not sealed[x] and not sealed[y]

    def fits(ci) -> bool:
        cols, contrib = info[ci]
        for v, c in cols:
            if count[v] >= 2 or sealed[v] or (count[v] == 1 and c is not Color.WHITE):
                return False
        for t, h, w, ww in contrib:
            cs = pairs.get((min(t, h), max(t, h)), [])
            if cs and not (ww and len(cs) == 1 and cs[0][2] == 1):
                return False
        return True

    def push(ci):
        cols, contrib = info[ci]
        for v, c in cols:
            count[v] += 1
            if c is Color.BLACK:
                sealed[v] = True
        for t, h, w, _ in contrib:
            pairs.setdefault((min(t, h), max(t, h)), []).append((t, h, w))
        chosen.append(ci)

    def pop(ci):
        cols, contrib = info[ci]
        for v, c in cols:
            count[v] -= 1
            if c is Color.BLACK:
                sealed[v] = False
        for t, h, w, _ in contrib:
            pairs[(min(t, h), max(t, h))].pop()
        chosen.pop()

    def dead(ci) -> bool:
        cols, contrib = info[ci]
        touched = {(min(t, h), max(t, h)) for t, h, _, _ in contrib}
        for v, _ in cols:
            for u in G.neighbors(v):
                touched.add((min(u, v), max(u, v)))
        return any(value(k) != target(k) and not open_(k) for k in touched)

    def pivot():
        for (t, h) in G.edges:
            key = (min(t, h), max(t, h))
            if value(key) != target(key):
                return by_pair.get(key, [])
        for key, cs in pairs.items():
            if cs and value(key) != target(key):
                return by_pair.get(key, [])
        for v in G.nodes:
            if count[v] == 0:
                return by_node[v]
        return None

    done = False

    def search():
        nonlocal done
        if done:
            return
        options = pivot()
        if options is None:
            D = Decomposition(tuple(cands[i] for i in chosen))
            ok, _ = validate_decomposition(D, G)
            if ok:
                result.decompositions.add(D)
                if first_only:
                    done = True
            return
        if len(chosen) >= bound:
            if options:
                result.complete = False
            return
        for ci in options:
            if not fits(ci):
                continue
            push(ci)
            if not dead(ci):
                search()
            pop(ci)
            if done:
                return

    if len(G) > 0:
        search()
    return result


@dataclass(frozen=True)
class FinitenessVerdict:
    outcome: str  # finite | infinite-by-criterion | undecided
    class_size: int | None
    scan_reason: str
    criterion: str = "weight >= 5 somewhere in the mutation class (external growth criterion)"


def oracle_is_finite(B: ExchangeMatrix, cutoff: int = 5, budget: int = 20_000) -> FinitenessVerdict:
    """Finite iff the breadth-first scan exhausts; infinite once a weight of ``cutoff`` or more shows up.

    The class of a disconnected matrix is the product of the classes of its
    components, so each component is decided on its own.  Rank-2 components
    are always mutation-finite; the weight criterion only applies from rank 3.
    """
    comps = matrix_to_diagram(B).components()
    if len(comps) > 1:
        parts = [oracle_is_finite(ExchangeMatrix.from_rows([[B[i, j] for j in c] for i in c]), cutoff, budget)
                 for c in comps]
        for outcome in ("infinite-by-criterion", "undecided"):
            bad = [p for p in parts if p.outcome == outcome]
            if bad:
                return FinitenessVerdict(outcome, None, bad[0].scan_reason)
        # isomorphism classes of a product are not the product of the counts
        return FinitenessVerdict("finite", None, EXHAUSTED)
    if B.n < 3:
        scan = scan_mutation_class(B, weight_cutoff=10**18, budget=budget)
        return FinitenessVerdict("finite", scan.size, scan.reason)
    scan = scan_mutation_class(B, weight_cutoff=cutoff, budget=budget)
    if scan.reason == EXHAUSTED:
        return FinitenessVerdict("finite", scan.size, scan.reason)
    if scan.reason == WEIGHT_CUTOFF:
        return FinitenessVerdict("infinite-by-criterion", None, scan.reason)
    return FinitenessVerdict("undecided", None, scan.reason)
