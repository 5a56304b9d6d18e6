"""Text formats for matrices and diagrams, and DOT export.

Matrix format::

    3
    0 1 -1
    -2 0 2
    2 -2 0

Diagram format (nodes numbered from 1)::

    diagram 3
    1 2 2
    2 3 4

Blank lines and ``#`` comments are ignored in both.
"""

from __future__ import annotations

from .model import Color, Diagram, ExchangeMatrix, MalformedInput, NotSkewSymmetrizable


class ParseError(MalformedInput):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(text: str):
    """Yield ``(line_no, [(column, token), ...])`` for every non-empty line."""
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if toks:
            yield no, toks


def _int(tok: tuple[int, str], line: int) -> int:
    col, s = tok
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer, got {s!r}", line, col) from None


def parse(text: str) -> ExchangeMatrix | Diagram:
    lines = list(_tokens(text))
    if not lines:
        raise ParseError("empty input", 1)
    no, head = lines[0]
    if head[0][1].lower() == "diagram":
        return _parse_diagram(lines)
    return _parse_matrix(lines)


def _parse_matrix(lines) -> ExchangeMatrix:
    no, head = lines[0]
    if len(head) != 1:
        raise ParseError("header must be the single number n", no, head[min(1, len(head) - 1)][0])
    n = _int(head[0], no)
    if n < 0:
        raise ParseError("n must be non-negative", no, head[0][0])
    body = lines[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (lines[-1][0] + 1)
        raise ParseError(f"expected {n} matrix rows, found {len(body)}", where)
    rows = []
    for no, toks in body:
        if len(toks) != n:
            col = toks[n][0] if len(toks) > n else toks[-1][0]
            raise ParseError(f"row has {len(toks)} entries, expected {n}", no, col)
        rows.append([_int(t, no) for t in toks])
    for i in range(n):
        if rows[i][i] != 0:
            raise ParseError(f"diagonal entry b[{i + 1}][{i + 1}] = {rows[i][i]} must be 0", body[i][0], body[i][1][i][0])
    try:
        return ExchangeMatrix.from_rows(rows)
    except NotSkewSymmetrizable as exc:
        line = body[exc.pair[0]][0] if exc.pair else body[0][0] if body else 1
        col = body[exc.pair[0]][1][exc.pair[1]][0] if exc.pair else 1
        raise ParseError(f"not skew-symmetrizable: {exc.reason}", line, col) from None


def _parse_diagram(lines) -> Diagram:
    no, head = lines[0]
    if len(head) != 2:
        raise ParseError("header must be 'diagram n'", no, head[-1][0])
    n = _int(head[1], no)
    if n < 0:
        raise ParseError("n must be non-negative", no, head[1][0])
    edges = {}
    for no, toks in lines[1:]:
        if len(toks) != 3:
            raise ParseError(f"edge line needs 'tail head weight', got {len(toks)} fields", no, toks[0][0])
        t, h, w = (_int(x, no) for x in toks)
        for val, tok in ((t, toks[0]), (h, toks[1])):
            if not 1 <= val <= n:
                raise ParseError(f"node {val} outside 1..{n}", no, tok[0])
        if w < 1:
            raise ParseError(f"weight {w} must be positive", no, toks[2][0])
        if t == h:
            raise ParseError("loops are not allowed", no, toks[1][0])
        key = (min(t, h), max(t, h))
        if key in edges:
            raise ParseError(f"second edge between {key[0]} and {key[1]}", no, toks[0][0])
        edges[key] = (t - 1, h - 1, w)
    return Diagram(range(n), edges.values())


def format_matrix(B: ExchangeMatrix) -> str:
    lines = [str(B.n)] + [" ".join(map(str, r)) for r in B.tolist()]
    return "\n".join(lines) + "\n"


def format_diagram(G: Diagram) -> str:
    """Diagram text; nodes are renumbered 1..n in sorted order."""
    pos = {v: i + 1 for i, v in enumerate(G.nodes)}
    lines = [f"diagram {len(G)}"]
    for t, h, w in sorted(G.edge_list(), key=lambda e: (pos[e[0]], pos[e[1]])):
        lines.append(f"{pos[t]} {pos[h]} {w}")
    return "\n".join(lines) + "\n"


def to_dot(G: Diagram, name: str = "G") -> str:
    """Graphviz source: black nodes filled, weights above 1 as edge labels."""
    pos = {v: i + 1 for i, v in enumerate(G.nodes)}
    out = [f"digraph {name} {{", "  node [shape=circle];"]
    for v in G.nodes:
        c = G.color(v)
        if c is Color.BLACK:
            out.append(f'  {pos[v]} [style=filled, fillcolor=black, fontcolor=white];')
        elif c is Color.WHITE:
            out.append(f'  {pos[v]} [style=filled, fillcolor=white];')
        else:
            out.append(f"  {pos[v]};")
    for t, h, w in sorted(G.edge_list(), key=lambda e: (pos[e[0]], pos[e[1]])):
        label = f' [label="{w}"]' if w != 1 else ""
        out.append(f"  {pos[t]} -> {pos[h]}{label};")
    out.append("}")
    return "\n".join(out) + "\n"
