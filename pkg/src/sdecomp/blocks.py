"""Block catalog, gluing semantics and decomposition assembly."""

from __future__ import annotations

import hashlib
import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources

from .model import Color, Diagram

ELEMENTARY = ("Spike", "Triangle", "Infork", "Outfork", "Diamond", "Square")
NEW = ("Ia", "Ib", "II", "IIIa", "IIIb", "IV", "V")


class GluingError(ValueError):
    """An identification breaks one of the gluing rules."""

    def __init__(self, rule: int, message: str):
        super().__init__(f"gluing rule {rule}: {message}")
        self.rule = rule


@dataclass(frozen=True)
class BlockTemplate:
    kind: str
    elementary: bool
    nodes: tuple[str, ...]
    colors: Mapping[str, Color]
    edges: tuple[tuple[str, str, int], ...]
    unfolding_nodes: tuple[tuple[str, str], ...]  # (unfolded vertex, folded node)
    unfolding_edges: tuple[tuple[str, str], ...]
    triangulation: Mapping[str, int]

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def white(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if self.colors[v] is Color.WHITE)

    @cached_property
    def copies(self) -> dict[str, int]:
        """Size of the index set each block node unfolds to."""
        out = {v: 0 for v in self.nodes}
        for _, folded in self.unfolding_nodes:
            out[folded] += 1
        return out

    @cached_property
    def doubled(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if self.copies[v] == 2)

    @cached_property
    def signed(self) -> dict[tuple[str, str], int]:
        out = {}
        for t, h, w in self.edges:
            out[(t, h)] = w
            out[(h, t)] = -w
        return out

    @cached_property
    def neighbors(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {v: {} for v in self.nodes}
        for t, h, w in self.edges:
            out[t][h] = w
            out[h][t] = -w
        return out

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """Node permutations (as index tuples) preserving colors and edges."""
        n = len(self.nodes)
        edges = {(self.index[t], self.index[h], w) for t, h, w in self.edges}
        cols = [self.colors[v] for v in self.nodes]
        out = []
        for perm in itertools.permutations(range(n)):
            if any(cols[perm[i]] != cols[i] for i in range(n)):
                continue
            if {(perm[t], perm[h], w) for t, h, w in edges} == edges:
                out.append(perm)
        return tuple(out)

    def diagram(self) -> Diagram:
        idx = self.index
        return Diagram(
            range(len(self.nodes)),
            {(idx[t], idx[h]): w for t, h, w in self.edges},
            {idx[v]: c for v, c in self.colors.items()},
        )


def _catalog_bytes() -> bytes:
    return resources.files("sdecomp.data").joinpath("blocks.json").read_bytes()


@lru_cache(maxsize=None)
def catalog() -> dict[str, BlockTemplate]:
    data = json.loads(_catalog_bytes())
    out = {}
    for rec in data["blocks"]:
        nodes = tuple(rec["nodes"])
        if "unfolding" in rec:
            un = tuple(rec["unfolding"]["nodes"].items())
            ue = tuple(tuple(e) for e in rec["unfolding"]["edges"])
        else:
            un = tuple((v, v) for v in nodes)
            ue = tuple((t, h) for t, h, w in rec["edges"] for _ in range(w))
        out[rec["kind"]] = BlockTemplate(
            kind=rec["kind"],
            elementary=rec["elementary"],
            nodes=nodes,
            colors={v: Color(c) for v, c in rec["nodes"].items()},
            edges=tuple((t, h, int(w)) for t, h, w in rec["edges"]),
            unfolding_nodes=un,
            unfolding_edges=ue,
            triangulation=dict(rec["triangulation"]),
        )
    return out


def catalog_hash() -> str:
    return hashlib.sha256(_catalog_bytes()).hexdigest()[:16]


def template(kind: str) -> BlockTemplate:
    try:
        return catalog()[kind]
    except KeyError:
        raise KeyError(f"unknown block kind {kind!r}") from None


# ---------------------------------------------------------------------------
# Placed blocks and decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlacedBlock:
    """A block template with its nodes sent to ambient node ids (template order)."""

    kind: str
    images: tuple[int, ...]

    @property
    def template(self) -> BlockTemplate:
        return template(self.kind)

    def image(self, node: str) -> int:
        return self.images[self.template.index[node]]

    def canonical(self) -> PlacedBlock:
        """Representative of this placement modulo template automorphisms."""
        best = min(tuple(self.images[p[i]] for i in range(len(p))) for p in self.template.automorphisms)
        return PlacedBlock(self.kind, best)

    def contributions(self) -> Iterable[tuple[int, int, int, bool]]:
        """``(tail, head, weight, white_white)`` for every block edge."""
        t = self.template
        for a, b, w in t.edges:
            ww = t.colors[a] is Color.WHITE and t.colors[b] is Color.WHITE
            yield self.image(a), self.image(b), w, ww

    def to_json(self) -> dict:
        t = self.template
        return {"kind": self.kind, "nodes": {v: self.images[i] for i, v in enumerate(t.nodes)}}


@dataclass(frozen=True)
class Gluing:
    glued_nodes: tuple[int, ...]
    effects: tuple[tuple[int, int, str], ...]  # (x, y, parallel-double | annihilate)


def combine(contribs: Sequence[tuple[int, int, int]]) -> tuple[int, int, int] | None:
    """Merge the (tail, head, weight) contributions landing on one node pair."""
    if len(contribs) == 1:
        return contribs[0]
    (t1, h1, w1), (t2, h2, w2) = contribs
    if (t1, h1) == (t2, h2):
        return (t1, h1, 2 * 2) if w1 == w2 == 1 else None
    return None


@dataclass(frozen=True)
class Decomposition:
    blocks: tuple[PlacedBlock, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(sorted((b.canonical() for b in self.blocks),
                                                        key=lambda b: (b.kind, b.images))))

    @property
    def new_blocks(self) -> tuple[PlacedBlock, ...]:
        return tuple(b for b in self.blocks if not b.template.elementary)

    def nodes(self) -> set[int]:
        return {v for b in self.blocks for v in b.images}

    def preimages(self) -> dict[int, list[tuple[int, str]]]:
        out: dict[int, list[tuple[int, str]]] = {}
        for bi, b in enumerate(self.blocks):
            for name, v in zip(b.template.nodes, b.images):
                out.setdefault(v, []).append((bi, name))
        return out

    def gluing(self) -> Gluing:
        pre = self.preimages()
        glued = tuple(sorted(v for v, ps in pre.items() if len(ps) == 2))
        pairs: dict[tuple[int, int], list] = {}
        for b in self.blocks:
            for t, h, w, _ in b.contributions():
                pairs.setdefault((min(t, h), max(t, h)), []).append((t, h))
        effects = []
        for (x, y), cs in sorted(pairs.items()):
            if len(cs) == 2:
                effects.append((x, y, "parallel-double" if cs[0] == cs[1] else "annihilate"))
        return Gluing(glued, tuple(effects))

    def signature(self) -> frozenset:
        """Identity of a decomposition: its unfolding blocks and the edges each covers.

        Ia and Ib covering the same edge are identified, since on an isolated
        weight-2 edge they differ only in which endpoint is called black.
        """
        out = []
        for b in self.new_blocks:
            kind = "I" if b.kind in ("Ia", "Ib") else b.kind
            out.append((kind, frozenset((t, h) for t, h, _, _ in b.contributions())))
        return frozenset(out)

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks]}


def assemble(D: Decomposition, extra_nodes: Iterable[int] = ()) -> Diagram:
    """Glue the placed blocks and return the colored diagram."""
    pre = D.preimages()
    colors: dict[int, Color] = {}
    for v, ps in pre.items():
        kinds = [D.blocks[bi] for bi, _ in ps]
        if len(ps) > 2:
            raise GluingError(1, f"node {v} is identified more than once")
        if len(ps) == 2:
            (b1, n1), (b2, n2) = ps
            if b1 == b2:
                raise GluingError(1, f"node {v} joins two nodes of the same {kinds[0].kind} block")
            for bi, name in ps:
                if D.blocks[bi].template.colors[name] is not Color.WHITE:
                    raise GluingError(2, f"black node {name} of {D.blocks[bi].kind} is identified at {v}")
            colors[v] = Color.BLACK
        else:
            bi, name = ps[0]
            colors[v] = D.blocks[bi].template.colors[name]
    pairs: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for b in D.blocks:
        for t, h, w, _ in b.contributions():
            pairs.setdefault((min(t, h), max(t, h)), []).append((t, h, w))
    edges = {}
    for key, cs in pairs.items():
        if len(cs) > 2:
            raise GluingError(1, f"pair {key} receives {len(cs)} edges")
        if len(cs) == 2 and any(w != 1 for _, _, w in cs):
            raise GluingError(2, f"pair {key} glues an edge with a black endpoint")
        merged = combine(cs)
        if merged is not None:
            t, h, w = merged
            edges[(t, h)] = w
    nodes = set(pre) | set(extra_nodes)
    return Diagram(nodes, edges, colors)


def validate_decomposition(D: Decomposition, target: Diagram) -> tuple[bool, list[str]]:
    """Compare ``assemble(D)`` with ``target`` on the nose.

    Uncolored target nodes accept either color.  Returns ``(ok, diff)``.
    """
    try:
        got = assemble(D)
    except GluingError as exc:
        return False, [str(exc)]
    diff = []
    missing = set(target.nodes) - set(got.nodes)
    extra = set(got.nodes) - set(target.nodes)
    diff += [f"node {v} is not covered" for v in sorted(missing)]
    diff += [f"node {v} is not in the target" for v in sorted(extra)]
    for (t, h), w in sorted(target.edges.items()):
        s = got.signed(t, h)
        if s == w:
            continue
        if s == 0:
            diff.append(f"edge {t}->{h} (weight {w}) missing")
        elif s < 0:
            diff.append(f"edge {t}->{h} has the wrong direction")
        else:
            diff.append(f"edge {t}->{h} has weight {s}, expected {w}")
    for (t, h), w in sorted(got.edges.items()):
        if target.signed(t, h) == 0:
            diff.append(f"edge {t}->{h} (weight {w}) not in the target")
    for v in sorted(set(target.nodes) & set(got.nodes)):
        want = target.color(v)
        if want is not Color.UNCOLORED and got.color(v) is not want:
            diff.append(f"node {v} is {got.color(v).value}, expected {want.value}")
    return not diff, diff


# ---------------------------------------------------------------------------
# Unfoldings and triangulation bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockUnfolding:
    vertices: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]
    index_sets: Mapping[str, tuple[str, ...]]
    needed: bool


def unfold_block(kind: str) -> BlockUnfolding:
    """Skew-symmetric unfolding quiver of a block with its index set per block node.

    Elementary blocks are already skew-symmetric; they come back as the
    identity unfolding with ``needed=False``.
    """
    t = template(kind)
    verts = tuple(u for u, _ in t.unfolding_nodes)
    idx = {u: i for i, u in enumerate(verts)}
    m = [[0] * len(verts) for _ in verts]
    for a, b in t.unfolding_edges:
        m[idx[a]][idx[b]] += 1
        m[idx[b]][idx[a]] -= 1
    sets: dict[str, list[str]] = {v: [] for v in t.nodes}
    for u, folded in t.unfolding_nodes:
        sets[folded].append(u)
    return BlockUnfolding(verts, tuple(map(tuple, m)), {k: tuple(v) for k, v in sets.items()}, not t.elementary)


@dataclass(frozen=True)
class SurfaceInvariants:
    blocks: int
    new_blocks: int
    gluings: int
    arcs: int
    triangles: int
    conjugate_pairs: int
    orbifold_points: int
    euler_characteristic: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def surface_invariants(D: Decomposition) -> SurfaceInvariants:
    """Totals over the pieces of the triangulation encoded by ``D``.

    ``arcs`` counts unfolded vertices, i.e. arcs of the unfolded
    triangulation.  The Euler characteristic is that of the gluing complex
    with one vertex per block and one edge per glued node.
    """
    glue = D.gluing()
    copies = {}
    for b in D.blocks:
        t = b.template
        for name, v in zip(t.nodes, b.images):
            copies[v] = max(copies.get(v, 0), t.copies[name])
    tri = [b.template.triangulation for b in D.blocks]
    return SurfaceInvariants(
        blocks=len(D.blocks),
        new_blocks=len(D.new_blocks),
        gluings=len(glue.glued_nodes),
        arcs=sum(copies.values()),
        triangles=sum(x["triangles"] for x in tri),
        conjugate_pairs=sum(x["conjugate_pairs"] for x in tri),
        orbifold_points=sum(x["orbifold_points"] for x in tri),
        euler_characteristic=len(D.blocks) - len(glue.glued_nodes),
    )
