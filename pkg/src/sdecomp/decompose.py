"""s-decomposition: reduce weight-2 neighborhoods, then decompose the rest.

Phase one visits every node incident to weight-2 edges, in decreasing order
of ``n`` (the number of such edges), and fixes the unfolding blocks that
contain them.  Removing those blocks leaves a diagram with weights 1 and 4
whose nodes may have one gluing slot already used; phase two decides that
residual over the six elementary blocks by visiting nodes in breadth-first
order and settling every block at the visited node at once.

Both phases backtrack when a local choice is not unique, so the verdict is
exact.  ``ReductionTrace.examinations`` counts neighborhood inspections per
node, including any made on abandoned branches.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import Counter, deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .blocks import ELEMENTARY, NEW, Decomposition, PlacedBlock, catalog, validate_decomposition
from .model import Color, Diagram

MAX_DEGREE = 8  # two square-block centers glued together
ALLOWED_WEIGHTS = (1, 2, 4)


@lru_cache(maxsize=1)
def _case_bytes() -> bytes:
    return resources.files("sdecomp").joinpath("data/cases.json").read_bytes()


@lru_cache(maxsize=1)
def case_table() -> dict[str, dict]:
    """Known local case labels, keyed by tag."""
    return {r["tag"]: r for r in json.loads(_case_bytes())["rules"]}


def case_table_hash() -> str:
    return hashlib.sha256(_case_bytes()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseLabel:
    n: int
    m: int | None
    tag: str
    action: str  # replace | DCC | reject


@dataclass(frozen=True)
class Certificate:
    rule: str  # weight | n-bound | degree | empty-neighborhood | uncovered | residual
    node: int | None
    message: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "node": self.node, "message": self.message}


@dataclass
class TraceEntry:
    node: int
    label: CaseLabel
    blocks: tuple[PlacedBlock, ...]


@dataclass
class ReductionTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    examinations: dict[int, int] = field(default_factory=dict)

    def examine(self, v: int) -> None:
        self.examinations[v] = self.examinations.get(v, 0) + 1

    @property
    def total_examinations(self) -> int:
        return sum(self.examinations.values())

    def max_per_node(self) -> int:
        return max(self.examinations.values(), default=0)

    def to_json(self) -> dict:
        return {
            "steps": [
                {
                    "node": e.node,
                    "n": e.label.n,
                    "m": e.label.m,
                    "tag": e.label.tag,
                    "rule": e.label.tag if e.label.tag in case_table() else "unlisted",
                    "action": e.label.action,
                    "blocks": [b.to_json() for b in e.blocks],
                }
                for e in self.entries
            ],
            "examinations": self.total_examinations,
            "max_examinations_per_node": self.max_per_node(),
        }


@dataclass
class Reduction:
    """Outcome of phase one for one choice of unfolding blocks."""

    residual: Diagram
    used: dict[int, int]  # residual node -> gluing slots already taken (white)
    placed: tuple[PlacedBlock, ...]
    trace: ReductionTrace


@dataclass
class SDecomposition:
    decomposable: bool
    decompositions: list[Decomposition]
    certificate: Certificate | None
    trace: ReductionTrace

    def to_json(self, trace: bool = False) -> dict:
        out = {
            "s_decomposable": self.decomposable,
            "decompositions": [d.to_json() for d in self.decompositions],
        }
        if self.certificate is not None:
            out["reject_certificate"] = self.certificate.to_json()
        if trace:
            out["trace"] = self.trace.to_json()
        return out


class Rejected(Exception):
    def __init__(self, certificate: Certificate):
        super().__init__(certificate.message)
        self.certificate = certificate


# ---------------------------------------------------------------------------
# Search state shared by both phases
# ---------------------------------------------------------------------------


def _key(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x < y else (y, x)


class _State:
    """Preimage counts and per-pair edge contributions with an undo trail."""

    def __init__(self, adj: dict[int, dict[int, int]], used: dict[int, int] | None = None):
        self.adj = adj
        self.count = dict.fromkeys(adj, 0)
        if used:
            self.count.update(used)
        self.sealed: set[int] = set()
        self.closed: set[int] = set()
        self.pairs: dict[tuple[int, int], list[tuple[int, int, int, bool]]] = {}
        self.partners: dict[int, set[int]] = {}
        self.blocks: list[PlacedBlock] = []
        self.trail: list[tuple] = []

    def target(self, x: int, y: int) -> int:
        return self.adj[x].get(y, 0)

    def value(self, x: int, y: int) -> int:
        cs = self.pairs.get(_key(x, y))
        if not cs:
            return 0
        if len(cs) == 1:
            t, h, w, _ = cs[0]
            return w if t == x else -w
        (t1, h1, _, _), (t2, _, _, _) = cs
        if t1 != t2:
            return 0
        return 4 if t1 == x else -4

    def exhausted(self, x: int) -> bool:
        return x in self.sealed or x in self.closed or self.count[x] >= 2

    def pending(self, x: int) -> Iterable[int]:
        """Nodes joined to ``x`` by a contribution that still needs annihilating."""
        return [y for y in self.partners.get(x, ()) if self.target(x, y) == 0 and self.value(x, y) != 0]

    def settled(self, x: int) -> bool:
        for y, s in self.adj[x].items():
            if self.value(x, y) != s:
                return False
        for y in self.partners.get(x, ()):
            if self.value(x, y) != self.target(x, y):
                return False
        return True

    def fits(self, pb: PlacedBlock) -> bool:
        tpl = pb.template
        for name, x in zip(tpl.nodes, pb.images):
            if x in self.closed or x in self.sealed or self.count[x] >= 2:
                return False
            black = tpl.colors[name] is Color.BLACK
            if black and self.count[x]:
                return False
            if black:
                mine = {pb.images[tpl.index[u]]: s for u, s in tpl.neighbors[name].items()}
                if self.adj[x] != mine:
                    return False
        for a, b, w in tpl.edges:
            x, y = pb.images[tpl.index[a]], pb.images[tpl.index[b]]
            ww = tpl.colors[a] is Color.WHITE and tpl.colors[b] is Color.WHITE
            cs = self.pairs.get(_key(x, y), ())
            t = self.target(x, y)
            if cs:
                if len(cs) > 1 or not (ww and cs[0][3] and cs[0][2] == 1 and w == 1):
                    return False
                merged = 4 if cs[0][0] == x else 0
                if merged != t:
                    return False
            elif ww and w == 1:
                if t not in (1, 4, 0):
                    return False
            elif t != w:
                return False
        return True

    def push(self, pb: PlacedBlock) -> None:
        tpl = pb.template
        for name, x in zip(tpl.nodes, pb.images):
            self.count[x] += 1
            self.trail.append(("count", x))
            if tpl.colors[name] is Color.BLACK:
                self.sealed.add(x)
                self.trail.append(("seal", x))
        for a, b, w in tpl.edges:
            x, y = pb.images[tpl.index[a]], pb.images[tpl.index[b]]
            ww = tpl.colors[a] is Color.WHITE and tpl.colors[b] is Color.WHITE
            self.pairs.setdefault(_key(x, y), []).append((x, y, w, ww))
            self.trail.append(("pair", _key(x, y)))
            for p, q in ((x, y), (y, x)):
                s = self.partners.setdefault(p, set())
                if q not in s:
                    s.add(q)
                    self.trail.append(("partner", p, q))
        self.blocks.append(pb)
        self.trail.append(("block",))

    def close(self, x: int) -> None:
        self.closed.add(x)
        self.trail.append(("close", x))

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            op = self.trail.pop()
            kind = op[0]
            if kind == "count":
                self.count[op[1]] -= 1
            elif kind == "seal":
                self.sealed.discard(op[1])
            elif kind == "pair":
                cs = self.pairs[op[1]]
                cs.pop()
                if not cs:
                    del self.pairs[op[1]]
            elif kind == "partner":
                self.partners[op[1]].discard(op[2])
            elif kind == "block":
                self.blocks.pop()
            elif kind == "close":
                self.closed.discard(op[1])


def _candidates(state: _State, tpl, img: dict[str, int], c: str) -> list[int]:
    """Ambient nodes that can host template node ``c`` given its mapped neighbors."""
    adj = state.adj
    out: dict[int, None] = {}
    for m, s in tpl.neighbors[c].items():
        if m not in img:
            continue
        s = -s  # seen from m
        src = img[m]
        ww = tpl.colors[m] is Color.WHITE and tpl.colors[c] is Color.WHITE
        for y, t in adj[src].items():
            if (t > 0) == (s > 0) and (abs(t) == abs(s) or (ww and abs(t) == 4)):
                out[y] = None
        if ww:
            for y in state.pending(src):
                out[y] = None
    return list(out)


@lru_cache(maxsize=None)
def _rigid_edges(kind: str, node: str) -> tuple[tuple[int, int], ...]:
    """Signed weights at ``node`` that any host must carry as they are.

    Only weight-1 edges between white nodes can merge or cancel; every other
    block edge appears unchanged in the glued diagram.
    """
    tpl = catalog()[kind]
    need: Counter = Counter()
    for m, s in tpl.neighbors[node].items():
        if not (abs(s) == 1 and tpl.colors[m] is Color.WHITE and tpl.colors[node] is Color.WHITE):
            need[s] += 1
    return tuple(sorted(need.items()))


def _blocks_at(
    state: _State, x: int, kinds: Iterable[str], through: int | None = None
) -> Iterator[PlacedBlock]:
    """Every placement of a block of ``kinds`` that contains ``x`` and fits the state.

    With ``through`` set, only blocks with an edge between ``x`` and that
    node are produced.

    Template nodes are mapped most-constrained first; a node whose mapped
    neighbors offer no candidate yet is postponed until another neighbor of
    it is mapped.
    """
    cat = catalog()
    seen = set()
    have = Counter(state.adj[x].values())
    for kind in kinds:
        tpl = cat[kind]

        def hosts(c: str, y: int) -> bool:
            if state.exhausted(y):
                return False
            if tpl.colors[c] is Color.BLACK and (state.count[y] or len(state.adj[y]) != len(tpl.neighbors[c])):
                return False
            hy = Counter(state.adj[y].values())
            return all(hy[s] >= k for s, k in _rigid_edges(kind, c))

        for root in tpl.nodes:
            if tpl.colors[root] is Color.BLACK and state.count[x]:
                continue
            if any(have[s] < k for s, k in _rigid_edges(kind, root)):
                continue
            if through is None:
                seeds = [{root: x}]
            else:
                seeds = [{root: x, m: through} for m in tpl.neighbors[root]
                         if hosts(m, through) and through in _candidates(state, tpl, {root: x}, m)]

            def extend():
                if len(img) == len(tpl.nodes):
                    yield tuple(img[v] for v in tpl.nodes)
                    return
                best = None
                for c in tpl.nodes:
                    if c in img:
                        continue
                    cands = [y for y in _candidates(state, tpl, img, c) if y not in used and hosts(c, y)]
                    if cands and (best is None or len(cands) < len(best[1])):
                        best = (c, cands)
                if best is None:
                    return
                c, cands = best
                for y in cands:
                    img[c] = y
                    used.add(y)
                    yield from extend()
                    used.discard(y)
                    del img[c]

            for img in seeds:
                used = set(img.values())
                for images in extend():
                    pb = PlacedBlock(kind, images).canonical()
                    if pb in seen:
                        continue
                    seen.add(pb)
                    if state.fits(pb):
                        yield pb


# ---------------------------------------------------------------------------
# Phase one: weight-2 neighborhoods
# ---------------------------------------------------------------------------


def _gate(G: Diagram) -> None:
    for (t, h), w in sorted(G.edges.items()):
        if w not in ALLOWED_WEIGHTS:
            raise Rejected(Certificate(
                "weight", t, f"edge {t}->{h} has weight {w}; s-decomposable diagrams only carry weights 1, 2, 4"))
    prof = weight2_profile(G)
    for v in G.nodes:
        if prof[v] > 4:
            raise Rejected(Certificate("n-bound", v, f"node {v} meets {prof[v]} weight-2 edges; at most 4 are possible"))
        if G.degree(v) > MAX_DEGREE:
            raise Rejected(Certificate("degree", v, f"node {v} has degree {G.degree(v)} > {MAX_DEGREE}"))
        if G.degree(v) == 0:
            raise Rejected(Certificate("uncovered", v, f"node {v} is isolated; no block covers it"))


def weight2_profile(G: Diagram) -> dict[int, int]:
    """Number of weight-2 edges at each node."""
    prof = dict.fromkeys(G.nodes, 0)
    for (t, h), w in G.edges.items():
        if w == 2:
            prof[t] += 1
            prof[h] += 1
    return prof


def _w2_edges_at(G: Diagram, o: int) -> list[tuple[int, int]]:
    return [_key(o, y) for y, s in G.neighbors(o).items() if abs(s) == 2]


def _label(G: Diagram, state: _State, o: int, blocks: tuple[PlacedBlock, ...], n: int) -> CaseLabel:
    roles = []
    for pb in blocks:
        tpl = pb.template
        roles.append(f"{pb.kind}:{tpl.nodes[pb.images.index(o)]}")
    m = None
    if n == 1:
        (p,) = [y for y, s in G.neighbors(o).items() if abs(s) == 2]
        m = sum(1 for s in G.neighbors(p).values() if abs(s) == 2)
    nodes = {v for pb in state.blocks for v in pb.images}
    # every edge at every block node is accounted for: the blocks are a whole component
    closed = all(state.settled(v) for v in nodes)
    tag = f"n={n}" + (f"/m={m}" if m is not None else "") + "/" + "+".join(sorted(roles))
    return CaseLabel(n, m, tag, "DCC" if closed else "replace")


def _options_at(G: Diagram, state: _State, o: int) -> list[tuple[PlacedBlock, ...]]:
    """Sets of one or two unfolding blocks at ``o`` covering its open weight-2 edges."""
    need = {k for k in _w2_edges_at(G, o) if k not in state.pairs}
    if not need:
        return [()]
    out = []
    for b1 in _blocks_at(state, o, NEW):
        mark = state.mark()
        state.push(b1)
        rest = {k for k in need if k not in state.pairs}
        if not rest:
            out.append((b1,))
        elif not state.exhausted(o):
            for b2 in _blocks_at(state, o, NEW):
                m2 = state.mark()
                state.push(b2)
                if all(k in state.pairs for k in rest):
                    out.append(tuple(sorted((b1, b2), key=_order_key)))
                state.undo(m2)
        state.undo(mark)
    return list(dict.fromkeys(out))


def _order_key(pb: PlacedBlock) -> tuple:
    return (pb.kind, pb.images)


def classify_node(G: Diagram, o: int) -> list[CaseLabel]:
    """Local case labels of ``o`` in the untouched diagram, one per admissible neighborhood.

    A node without any admissible neighborhood gets a single ``reject`` label.
    """
    n = weight2_profile(G)[o]
    if n == 0:
        return [CaseLabel(0, None, "n=0", "replace")]
    if n > 4:
        return [CaseLabel(n, None, f"n={n}/bound", "reject")]
    state = _State(G.adjacency())
    labels = []
    for opt in _options_at(G, state, o):
        mark = state.mark()
        for pb in opt:
            state.push(pb)
        labels.append(_label(G, state, o, opt, n))
        state.undo(mark)
    if not labels:
        return [CaseLabel(n, None, f"n={n}/none", "reject")]
    return sorted(set(labels), key=lambda c: c.tag)


def _residual(G: Diagram, placed: Iterable[PlacedBlock]) -> tuple[Diagram, dict[int, int]]:
    """Remove the unfolding blocks; what remains must be explained by elementary blocks."""
    count: dict[int, int] = {}
    sealed = set()
    contrib: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for pb in placed:
        tpl = pb.template
        for name, x in zip(tpl.nodes, pb.images):
            count[x] = count.get(x, 0) + 1
            if tpl.colors[name] is Color.BLACK:
                sealed.add(x)
        for t, h, w, _ in pb.contributions():
            contrib.setdefault(_key(t, h), []).append((t, h, w))
    keep = [v for v in G.nodes if v not in sealed]
    keep_set = set(keep)
    edges = {}
    for (t, h), w in G.edges.items():
        if t not in keep_set or h not in keep_set:
            continue
        if _key(t, h) not in contrib:
            edges[(t, h)] = w
    for (x, y), cs in contrib.items():
        if x not in keep_set or y not in keep_set:
            continue
        target = G.signed(x, y)
        if len(cs) == 2:
            continue  # fixed by two unfolding blocks; _State.fits checked it
        t, h, _ = cs[0]
        s = target if t == x else -target  # target seen from t
        if s == 4:
            edges[(t, h)] = 1  # keep the edge, weight 4 -> 1
        elif s == 0:
            edges[(h, t)] = 1  # must be annihilated
    used = {v: count[v] for v in keep if count.get(v)}
    return Diagram(keep, edges), used


def apply_replacement(G: Diagram, blocks: Iterable[PlacedBlock]) -> tuple[Diagram, dict[int, int]]:
    """Swap the given unfolding blocks for their weight-2-free remainder.

    Sealed nodes disappear with their edges.  An edge the block shares with
    the rest of the diagram stays with weight 1, reversed when the block's
    own edge has to be cancelled.  Returns the new diagram and the number of
    gluing slots already taken at each surviving block node.
    """
    return _residual(G, blocks)


def _reductions(G: Diagram, trace: ReductionTrace) -> Iterator[Reduction]:
    prof = weight2_profile(G)
    order = sorted((v for v in G.nodes if prof[v]), key=lambda v: (-prof[v], v))
    state = _State(G.adjacency())
    # iterative depth-first search over (position, options, next option, mark, entry count)
    stack: list[list] = []
    i = 0
    entries: list[TraceEntry] = []
    while True:
        while i < len(order):
            o = order[i]
            if all(k in state.pairs for k in _w2_edges_at(G, o)):
                i += 1
                continue
            trace.examine(o)
            opts = _options_at(G, state, o)
            if not opts:
                trace.entries.append(TraceEntry(o, CaseLabel(prof[o], None, f"n={prof[o]}/none", "reject"), ()))
                break
            stack.append([i, opts, 0, state.mark(), len(entries)])
            frame = stack[-1]
            for pb in opts[0]:
                state.push(pb)
            entries.append(TraceEntry(o, _label(G, state, o, opts[0], prof[o]), opts[0]))
            frame[2] = 1
            i += 1
        else:
            residual, used = _residual(G, state.blocks)
            t = ReductionTrace(list(entries), trace.examinations)
            yield Reduction(residual, used, tuple(state.blocks), t)
        # backtrack to the next untried option
        while stack:
            frame = stack[-1]
            pos, opts, nxt, mark, nent = frame
            state.undo(mark)
            del entries[nent:]
            if nxt < len(opts):
                o = order[pos]
                for pb in opts[nxt]:
                    state.push(pb)
                entries.append(TraceEntry(o, _label(G, state, o, opts[nxt], prof[o]), opts[nxt]))
                frame[2] = nxt + 1
                i = pos + 1
                break
            stack.pop()
        else:
            return


def reduce(G: Diagram) -> Reduction:
    """First reduction of ``G`` to a weight-{1,4} residual; raises ``Rejected``."""
    _gate(G)
    trace = ReductionTrace()
    for red in _reductions(G, trace):
        return red
    bad = trace.entries[-1].node if trace.entries else None
    raise Rejected(Certificate("empty-neighborhood", bad, f"no unfolding-block neighborhood fits node {bad}"))


# ---------------------------------------------------------------------------
# Neighborhood search
# ---------------------------------------------------------------------------


def _completions(state: _State, x: int, kinds: Sequence[str]) -> list[tuple[PlacedBlock, ...]]:
    """Sets of blocks containing ``x`` after which every pair at ``x`` is exact."""
    if state.settled(x):
        return [()] if state.count[x] or x in state.sealed else []
    if state.exhausted(x):
        return []
    out = []
    # every option has a block through the first open pair at x
    for b1 in _blocks_at(state, x, kinds, _open_pair(state, x)):
        mark = state.mark()
        state.push(b1)
        if state.settled(x):
            out.append((b1,))
        elif not state.exhausted(x):
            for b2 in _blocks_at(state, x, kinds, _open_pair(state, x)):
                m2 = state.mark()
                state.push(b2)
                if state.settled(x):
                    out.append(tuple(sorted((b1, b2), key=_order_key)))
                state.undo(m2)
        state.undo(mark)
    # options that seal more nodes leave less room for later failure; then fewer blocks first
    return sorted(dict.fromkeys(out), key=lambda o: (-_sealing(o), len(o)))


def _open_pair(state: _State, x: int) -> int:
    for y in itertools.chain(state.adj[x], state.partners.get(x, ())):
        if state.value(x, y) != state.target(x, y):
            return y
    raise AssertionError("no open pair at an unsettled node")


def _sealing(option: tuple[PlacedBlock, ...]) -> int:
    return sum(1 for pb in option for name in pb.template.nodes if pb.template.colors[name] is Color.BLACK)


def _search_order(adj: dict[int, dict[int, int]], first: Sequence[int]) -> list[int]:
    """``first`` in the given order, then everything else breadth-first from it."""
    order = list(first)
    seen = set(first)
    q = deque(first)
    for root in itertools.chain((None,), adj):
        if root is not None and root not in seen:
            seen.add(root)
            order.append(root)
            q.append(root)
        while q:
            for y in sorted(adj[q.popleft()]):
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    q.append(y)
    return order


class _Solver:
    """Pick one admissible neighborhood per node so that neighbors agree.

    The admissible neighborhoods of a node are computed once, against the
    untouched diagram, the first time the node is looked at; that is the
    node's only examination.  Search and forward checking then work on the
    cached lists, so backtracking never re-examines a node.
    """

    def __init__(self, adj, used: dict[int, int], kinds: Sequence[str], trace: ReductionTrace):
        self.state = _State(adj, used)
        self.adj = adj
        self.kinds = kinds
        self.trace = trace
        self.opts: dict[int, list[tuple[tuple[PlacedBlock, ...], Counter]]] = {}
        self.assigned: dict[int, Counter] = {}
        self.need: dict[int, dict[PlacedBlock, int]] = {}
        self.empty: int | None = None
        self.deepest: tuple[int, int] = (-1, -1)

    def options(self, x: int):
        got = self.opts.get(x)
        if got is None:
            self.trace.examine(x)
            got = [(o, Counter(o)) for o in _completions(self.state, x, self.kinds)]
            self.opts[x] = got
            if not got and self.empty is None:
                self.empty = x
        return got

    def compatible(self, x: int, oc: Counter) -> bool:
        need = self.need.get(x, {})
        for b, k in need.items():
            if oc[b] != k:
                return False
        assigned = self.assigned
        for b in oc:
            if b in need:
                continue
            for z in b.images:
                if z != x and z in assigned:
                    return False
        return True

    def assign(self, x: int, oc: Counter) -> list[tuple[int, PlacedBlock]]:
        self.assigned[x] = oc
        added = []
        for b, k in oc.items():
            for z in set(b.images):
                if z == x or z in self.assigned:
                    continue
                nz = self.need.setdefault(z, {})
                if b not in nz:
                    nz[b] = k
                    added.append((z, b))
        return added

    def unassign(self, x: int, added) -> None:
        del self.assigned[x]
        for z, b in added:
            del self.need[z][b]

    def forward_ok(self, x: int, oc: Counter) -> bool:
        touched = set(self.adj[x])
        for b in oc:
            touched.update(b.images)
        for z in touched:
            if z == x or z in self.assigned:
                continue
            if not any(self.compatible(z, c) for _, c in self.options(z)):
                return False
        return True

    def solutions(self, order: Sequence[int]) -> Iterator[dict[int, Counter]]:
        stack: list[list] = []  # [position, candidates, next candidate, undo list]
        i = 0
        while True:
            if i == len(order):
                yield self.assigned
                i = len(order)  # fall through to backtracking
            else:
                x = order[i]
                cands = [oc for _, oc in self.options(x) if self.compatible(x, oc)]
                stack.append([i, cands, 0, None])
                if not cands and i > self.deepest[0]:
                    self.deepest = (i, x)
            # advance the top frame to its next viable candidate, popping exhausted frames
            while stack:
                frame = stack[-1]
                pos, cands, nxt, added = frame
                x = order[pos]
                if added is not None:
                    self.unassign(x, added)
                    frame[3] = None
                while nxt < len(cands):
                    oc = cands[nxt]
                    nxt += 1
                    added = self.assign(x, oc)
                    if self.forward_ok(x, oc):
                        frame[2], frame[3] = nxt, added
                        break
                    self.unassign(x, added)
                else:
                    if pos > self.deepest[0]:
                        self.deepest = (pos, x)
                    stack.pop()
                    continue
                i = pos + 1
                break
            else:
                return

    def certificate(self) -> Certificate:
        if self.empty is not None:
            return Certificate("empty-neighborhood", self.empty,
                               f"no admissible block neighborhood exists at node {self.empty}")
        node = self.deepest[1] if self.deepest[1] != -1 else None
        return Certificate("empty-neighborhood", node,
                           f"the admissible neighborhoods of node {node} all conflict with those of its neighbors")


def _collect(assigned: dict[int, Counter]) -> tuple[PlacedBlock, ...]:
    out = []
    for x, oc in assigned.items():
        for b, k in oc.items():
            if x == min(b.images):
                out.extend([b] * k)
    return tuple(out)


def block_decompose(
    R: Diagram, used: dict[int, int] | None = None, trace: ReductionTrace | None = None
) -> tuple[PlacedBlock, ...]:
    """Cover a weight-{1,4} diagram by elementary blocks.

    ``used`` gives, per node, gluing slots already taken by white nodes of
    other blocks.  Returns the placed blocks or raises ``Rejected``.
    """
    used = used or {}
    trace = trace if trace is not None else ReductionTrace()
    for (t, h), w in R.edges.items():
        if w not in (1, 4):
            raise Rejected(Certificate("residual", t, f"edge {t}->{h} of weight {w} left after reduction"))
    adj = R.adjacency()
    for v in R.nodes:
        if not adj[v] and not used.get(v):
            raise Rejected(Certificate("uncovered", v, f"node {v} is isolated; no block covers it"))
    solver = _Solver(adj, used, ELEMENTARY, trace)
    for assigned in solver.solutions(_search_order(adj, ())):
        return _collect(assigned)
    raise Rejected(solver.certificate())


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


def _labels(G: Diagram, assigned: dict[int, Counter], order: Sequence[int]) -> list[TraceEntry]:
    prof = weight2_profile(G)
    out = []
    for o in order:
        n = prof[o]
        if not n:
            break
        mine = tuple(b for b in sorted(assigned[o], key=_order_key) for _ in range(assigned[o][b])
                     if b.kind in NEW)
        roles = [f"{b.kind}:{b.template.nodes[b.images.index(o)]}" for b in mine]
        m = None
        if n == 1:
            (p,) = [y for y, s in G.neighbors(o).items() if abs(s) == 2]
            m = prof[p]
        closed = all(set(assigned[x]) <= set(mine) for b in mine for x in b.images)
        tag = f"n={n}" + (f"/m={m}" if m is not None else "") + "/" + "+".join(sorted(roles))
        out.append(TraceEntry(o, CaseLabel(n, m, tag, "DCC" if closed else "replace"), mine))
    return out


def _component_decompositions(G: Diagram, all_decompositions: bool, trace: ReductionTrace):
    """Decompositions of one connected diagram, distinct by signature."""
    adj = G.adjacency()
    prof = weight2_profile(G)
    first = sorted((v for v in G.nodes if prof[v]), key=lambda v: (-prof[v], v))
    order = _search_order(adj, first)
    solver = _Solver(adj, {}, ELEMENTARY + NEW, trace)
    found: dict[frozenset, Decomposition] = {}
    for assigned in solver.solutions(order):
        D = Decomposition(_collect(assigned))
        ok, diff = validate_decomposition(D, G)
        if not ok:
            raise AssertionError(f"assembled decomposition differs from the input: {diff}")
        sig = D.signature()
        if sig not in found:
            if not found:
                trace.entries.extend(_labels(G, assigned, order))
            found[sig] = D
        if not all_decompositions:
            break
    return list(found.values()), None if found else solver.certificate()


def s_decompose(G: Diagram, all_decompositions: bool = True) -> SDecomposition:
    """Decide s-decomposability of ``G`` and return its decompositions.

    Decompositions are distinct by ``Decomposition.signature``: the
    unfolding blocks and the edges they cover.  Disconnected diagrams are
    handled per component and combined by Cartesian product.
    """
    trace = ReductionTrace()
    if len(G) == 0:
        return SDecomposition(True, [Decomposition(())], None, trace)
    try:
        _gate(G)
    except Rejected as exc:
        return SDecomposition(False, [], exc.certificate, trace)
    per_component = []
    for comp in G.components():
        sub = G.subdiagram(comp) if len(comp) < len(G) else G
        decs, cert = _component_decompositions(sub, all_decompositions, trace)
        if not decs:
            return SDecomposition(False, [], cert, trace)
        per_component.append(decs)
    combined = [
        Decomposition(tuple(b for d in combo for b in d.blocks))
        for combo in itertools.product(*per_component)
    ]
    return SDecomposition(True, combined, None, trace)


def is_s_decomposable(G: Diagram) -> bool:
    return s_decompose(G, all_decompositions=False).decomposable
