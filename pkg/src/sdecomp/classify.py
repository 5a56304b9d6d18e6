"""Finite-mutation-type verdicts for exchange matrices.

A connected matrix of rank at least 3 is mutation-finite exactly when its
diagram is s-decomposable or its class is one of the exceptional classes in
the catalog.  Non-decomposable inputs are settled by scanning their own
mutation class: an exhausted scan proves finiteness and names the catalog
class it contains; a weight of 5 or more proves infiniteness by the bounded
weight criterion for mutation-finite matrices, which comes from outside this
package's theory and is recorded as such in the verdict.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .canon import CanonicalForm, canonical_form
from .decompose import s_decompose
from .model import Diagram, ExchangeMatrix, matrix_to_diagram
from .mutation import EXHAUSTED, NODE_BUDGET, WEIGHT_CUTOFF, scan_mutation_class

CATALOG_ENV = "SDECOMP_EXCEPTIONAL_CATALOG"
SCHEMA = "sdecomp/verdict"
SCHEMA_VERSION = 1

FINITE_DECOMPOSABLE = "finite: s-decomposable"
FINITE_EXCEPTIONAL = "finite: exceptional"
FINITE_SMALL_RANK = "finite: small-rank"
INFINITE = "infinite"
UNDECIDED = "undecided"

GROWTH_CRITERION = (
    "a mutation-finite matrix of rank >= 3 never reaches |b_ij * b_ji| >= 5 in its class "
    "(external criterion, not derived in this package)"
)


class ConfigurationError(RuntimeError):
    """The exceptional catalog could not be loaded."""


@dataclass(frozen=True)
class ExceptionalType:
    name: str
    rank: int
    skew_symmetric: bool
    class_size: int
    matrix: ExchangeMatrix
    form: CanonicalForm


@dataclass(frozen=True)
class ExceptionalCatalog:
    types: tuple[ExceptionalType, ...]
    source: str
    digest: str

    def by_form(self) -> dict[CanonicalForm, ExceptionalType]:
        return {t.form: t for t in self.types}


def _digest(data: bytes) -> str:
    import hashlib

    return hashlib.sha256(data).hexdigest()[:16]


def load_catalog(path: str | os.PathLike | None = None) -> ExceptionalCatalog:
    """Read the catalog from ``path``, ``$SDECOMP_EXCEPTIONAL_CATALOG`` or the packaged file."""
    path = path or os.environ.get(CATALOG_ENV)
    try:
        if path:
            data = Path(path).read_bytes()
            source = str(path)
        else:
            data = resources.files("sdecomp").joinpath("data/exceptional.json").read_bytes()
            source = "package:data/exceptional.json"
    except OSError as exc:
        raise ConfigurationError(f"exceptional catalog not readable: {exc}") from None
    return _parse_catalog(data, source)


@lru_cache(maxsize=8)
def _parse_catalog(data: bytes, source: str) -> ExceptionalCatalog:
    try:
        doc = json.loads(data)
        if doc.get("format") != "sdecomp-exceptional-catalog":
            raise ValueError("wrong format tag")
        types = []
        for rec in doc["types"]:
            B = ExchangeMatrix.from_rows(rec["matrix"])
            types.append(ExceptionalType(
                rec["name"], B.n, bool(rec["skew_symmetric"]), int(rec["class_size"]), B,
                canonical_form(matrix_to_diagram(B)),
            ))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigurationError(f"exceptional catalog {source} is malformed: {exc}") from None
    return ExceptionalCatalog(tuple(types), source, _digest(data))


@dataclass
class Verdict:
    outcome: str
    rank: int
    evidence: dict = field(default_factory=dict)
    components: list[Verdict] = field(default_factory=list)

    @property
    def finite(self) -> bool | None:
        if self.outcome.startswith("finite"):
            return True
        if self.outcome == INFINITE:
            return False
        return None

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "version": SCHEMA_VERSION, "outcome": self.outcome, "rank": self.rank,
               "evidence": self.evidence}
        if self.components:
            out["components"] = [c.to_json() for c in self.components]
        return out


def _submatrix(B: ExchangeMatrix, idx: list[int]) -> ExchangeMatrix:
    return ExchangeMatrix.from_rows([[B[i, j] for j in idx] for i in idx])


def classify(
    B: ExchangeMatrix,
    use_catalog: bool = True,
    catalog: ExceptionalCatalog | None = None,
    cutoff: int = 5,
    budget: int = 100_000,
) -> Verdict:
    """Decide whether ``B`` has finite mutation type.

    Disconnected matrices are classified per component; the whole is finite
    iff every component is.  With ``use_catalog=False`` a non-decomposable
    component whose scan does not hit the weight criterion is undecided.
    """
    if use_catalog and catalog is None:
        catalog = load_catalog()
    G = matrix_to_diagram(B)
    comps = G.components()
    if len(comps) <= 1:
        return _classify_connected(B, G, catalog if use_catalog else None, cutoff, budget)
    parts = [
        _classify_connected(_submatrix(B, c), G.subdiagram(c).relabel({v: i for i, v in enumerate(c)}),
                            catalog if use_catalog else None, cutoff, budget)
        for c in comps
    ]
    for p, c in zip(parts, comps):
        p.evidence["nodes"] = list(c)
    outcomes = [p.outcome for p in parts]
    if INFINITE in outcomes:
        outcome = INFINITE
    elif UNDECIDED in outcomes:
        outcome = UNDECIDED
    elif all(o == FINITE_DECOMPOSABLE for o in outcomes):
        outcome = FINITE_DECOMPOSABLE
    elif FINITE_EXCEPTIONAL in outcomes:
        outcome = FINITE_EXCEPTIONAL
    elif FINITE_DECOMPOSABLE in outcomes:
        outcome = FINITE_DECOMPOSABLE
    else:
        outcome = FINITE_SMALL_RANK
    return Verdict(outcome, B.n, {"connected": False}, parts)


def _classify_connected(B, G: Diagram, catalog, cutoff, budget) -> Verdict:
    n = B.n
    if n < 3:
        return Verdict(FINITE_SMALL_RANK, n, {"reason": "rank below 3; the class has at most two diagrams"})
    dec = s_decompose(G, all_decompositions=False)
    if dec.decomposable:
        return Verdict(FINITE_DECOMPOSABLE, n, {"decomposition": dec.decompositions[0].to_json()})
    evidence: dict = {"reject_certificate": dec.certificate.to_json() if dec.certificate else None}
    scan = scan_mutation_class(B, weight_cutoff=cutoff, budget=budget)
    evidence["scan"] = {"reason": scan.reason, "diagrams_seen": scan.size, "max_weight": scan.max_weight}
    if scan.reason == WEIGHT_CUTOFF:
        evidence["criterion"] = GROWTH_CRITERION
        return Verdict(INFINITE, n, evidence)
    if scan.reason == NODE_BUDGET or catalog is None:
        if catalog is None:
            evidence["catalog"] = "disabled"
        return Verdict(UNDECIDED, n, evidence)
    assert scan.reason == EXHAUSTED
    forms = scan.seen
    for t in catalog.types:
        if t.rank == n and t.form in forms:
            evidence["exceptional_type"] = t.name
            evidence["catalog"] = catalog.digest
            return Verdict(FINITE_EXCEPTIONAL, n, evidence)
    evidence["exceptional_type"] = None
    evidence["note"] = "class is finite and not s-decomposable but matches no catalog entry"
    evidence["catalog"] = catalog.digest
    return Verdict(FINITE_EXCEPTIONAL, n, evidence)
