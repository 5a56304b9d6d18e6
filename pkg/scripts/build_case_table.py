#!/usr/bin/env python3
"""Record the local case labels of the weight-2 reduction in data/cases.json.

Every label the decomposer assigns on a seeded corpus of glued diagrams is
kept with its n, m, the actions seen (replace or DCC), how often it occurred
and the smallest diagram that produced it.  A label is ``full`` when the
blocks it names account for all n weight-2 edges at the node; otherwise some
of them were settled by an earlier node.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from sdecomp.blocks import NEW, catalog
from sdecomp.decompose import s_decompose
from sdecomp.generate import random_glued

OUT = Path(__file__).resolve().parents[1] / "src" / "sdecomp" / "data" / "cases.json"
KINDS = NEW + ("Spike", "Triangle", "Diamond")


def _w2_at(kind: str, node: str) -> int:
    tpl = catalog()[kind]
    return sum(1 for a, b, w in tpl.edges if w == 2 and node in (a, b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("-o", "--output", type=Path, default=OUT)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    table: dict[str, dict] = {}
    for _ in range(args.samples):
        r = random_glued(rng, rng.randint(1, 5), kinds=KINDS)
        if r is None:
            continue
        G, _ = r
        if not G.is_connected():
            continue
        res = s_decompose(G)
        for e in res.trace.entries:
            lab = e.label
            if lab.action == "reject":
                continue
            rec = table.setdefault(lab.tag, {
                "tag": lab.tag, "n": lab.n, "m": lab.m, "actions": [], "observations": 0, "witness": None,
            })
            rec["observations"] += 1
            if lab.action not in rec["actions"]:
                rec["actions"].append(lab.action)
            edges = [list(x) for x in sorted(G.edge_list())]
            if rec["witness"] is None or (len(G), edges) < (rec["witness"]["nodes"], rec["witness"]["edges"]):
                rec["witness"] = {"nodes": len(G), "edges": edges, "node": e.node}
    for rec in table.values():
        roles = rec["tag"].split("/")[-1].split("+")
        rec["full"] = sum(_w2_at(*r.split(":")) for r in roles) == rec["n"]
        rec["actions"].sort()
    rules = sorted(table.values(), key=lambda r: (-r["n"], r["tag"]))
    doc = {
        "format": "sdecomp-case-table",
        "version": 1,
        "notes": [
            "tag = n=<n>[/m=<m>]/<kind:role>+...: the unfolding blocks fixed at the examined node and its role in each.",
            "full = the named blocks cover every weight-2 edge at the node.",
            f"collected from {args.samples} seeded random gluings (seed {args.seed}).",
        ],
        "rules": rules,
    }
    args.output.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(rules)} case labels to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
