from __future__ import annotations

import random

import pytest

from sdecomp.blocks import (
    ELEMENTARY,
    NEW,
    Decomposition,
    GluingError,
    PlacedBlock,
    assemble,
    catalog,
    catalog_hash,
    surface_invariants,
    unfold_block,
    validate_decomposition,
)
from sdecomp.generate import random_glued
from sdecomp.model import Color, Diagram, ExchangeMatrix, matrix_to_diagram

W, B = Color.WHITE, Color.BLACK
TWO_WAY_TRIANGLE = Diagram(range(3), [(0, 1, 2), (1, 2, 4), (2, 0, 2)])


def test_catalog_contents():
    cat = catalog()
    assert set(cat) == set(ELEMENTARY) | set(NEW)
    assert len(ELEMENTARY) == 6 and len(NEW) == 7
    assert len(catalog_hash()) == 16
    # every weight-2 edge of a new block has a black endpoint, so weight 4 never comes from weight 2
    for kind in NEW:
        t = cat[kind]
        for a, b, w in t.edges:
            if w == 2:
                assert B in (t.colors[a], t.colors[b]), kind
    for kind in ELEMENTARY:
        assert all(w == 1 for _, _, w in cat[kind].edges)


def test_single_triangle():
    G = assemble(Decomposition((PlacedBlock("Triangle", (0, 1, 2)),)))
    assert G.uncolored() == Diagram(range(3), [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    assert set(G.colors.values()) == {W}


def test_two_spikes_make_weight_four():
    G = assemble(Decomposition((PlacedBlock("Spike", (0, 1)), PlacedBlock("Spike", (0, 1)))))
    assert G.edge_list() == [(0, 1, 4)]
    assert G.color(0) is B and G.color(1) is B


def test_opposite_edges_annihilate():
    G = assemble(Decomposition((PlacedBlock("Triangle", (0, 1, 2)), PlacedBlock("Triangle", (1, 0, 3)))))
    assert G.signed(0, 1) == 0
    assert len(G) == 4 and len(G.edges) == 4
    assert G.color(0) is B and G.color(1) is B


@pytest.mark.parametrize(
    ("blocks", "rule"),
    [
        ((PlacedBlock("Ia", (0, 1)), PlacedBlock("Spike", (1, 2))), 2),  # black node glued
        ((PlacedBlock("Spike", (0, 1)), PlacedBlock("Spike", (1, 2)), PlacedBlock("Spike", (1, 3))), 1),
    ],
)
def test_gluing_rule_errors(blocks, rule):
    with pytest.raises(GluingError) as info:
        assemble(Decomposition(blocks))
    assert info.value.rule == rule


def test_validate_ia_and_ib():
    G = Diagram(range(2), [(1, 0, 2)])
    ok, diff = validate_decomposition(Decomposition((PlacedBlock("Ia", (0, 1)),)), G)
    assert ok and not diff
    ok, diff = validate_decomposition(Decomposition((PlacedBlock("Ib", (0, 1)),)), G)
    assert not ok and any("direction" in d for d in diff)


def test_validate_two_way_decompositions():
    iv = Decomposition((PlacedBlock("IV", (0, 1, 2)),))
    ii = Decomposition((PlacedBlock("II", (2, 0, 1)), PlacedBlock("Spike", (1, 2))))
    assert validate_decomposition(iv, TWO_WAY_TRIANGLE)[0]
    assert validate_decomposition(ii, TWO_WAY_TRIANGLE)[0]
    assert iv.signature() != ii.signature()
    assert surface_invariants(iv) != surface_invariants(ii)


def test_signature_merges_ia_ib():
    a = Decomposition((PlacedBlock("Ia", (0, 1)),))
    b = Decomposition((PlacedBlock("Ib", (1, 0)),))
    assert a.signature() == b.signature()


def test_unfold_ia():
    u = unfold_block("Ia")
    assert u.needed
    assert u.index_sets == {"u": ("u",), "v": ("v1", "v2")}
    idx = {v: i for i, v in enumerate(u.vertices)}
    arrows = {(a, b) for a in u.vertices for b in u.vertices if u.matrix[idx[a]][idx[b]] == 1}
    assert arrows == {("v1", "u"), ("v2", "u")}


def test_unfold_v_shape():
    u = unfold_block("V")
    assert sorted(u.vertices) == sorted(["u1", "u2", "p", "q", "r", "w"])
    assert u.index_sets["u"] == ("u1", "u2")


def test_unfold_elementary_is_identity():
    u = unfold_block("Spike")
    assert not u.needed
    assert all(len(s) == 1 for s in u.index_sets.values())


@pytest.mark.parametrize("kind", NEW)
def test_unfoldings_fold_back(kind):
    """Column sums over index sets reproduce a matrix with the block's diagram."""
    u = unfold_block(kind)
    t = catalog()[kind]
    idx = {v: i for i, v in enumerate(u.vertices)}
    rows = []
    for x in t.nodes:
        i = idx[u.index_sets[x][0]]
        rows.append([sum(u.matrix[i][idx[c]] for c in u.index_sets[y]) for y in t.nodes])
    folded = matrix_to_diagram(ExchangeMatrix.from_rows(rows))
    assert folded == t.diagram().uncolored()


def test_invariants_examples():
    tri = surface_invariants(Decomposition((PlacedBlock("Triangle", (0, 1, 2)),)))
    assert (tri.triangles, tri.orbifold_points) == (1, 0)
    ia = surface_invariants(Decomposition((PlacedBlock("Ia", (0, 1)),)))
    assert ia.orbifold_points == 1


def test_random_gluings_validate():
    rng = random.Random(3)
    done = 0
    while done < 200:
        r = random_glued(rng, rng.randint(1, 5))
        if r is None:
            continue
        G, D = r
        assert validate_decomposition(D, G)[0]
        done += 1
