from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdecomp.blocks import Decomposition, PlacedBlock, validate_decomposition
from sdecomp.decompose import (
    Rejected,
    apply_replacement,
    block_decompose,
    case_table,
    case_table_hash,
    classify_node,
    is_s_decomposable,
    reduce,
    s_decompose,
    weight2_profile,
)
from sdecomp.generate import block_chain, random_glued
from sdecomp.model import Diagram
from sdecomp.oracle import oracle_decompose

TWO_WAY_TRIANGLE = Diagram(range(3), [(0, 1, 2), (1, 2, 4), (2, 0, 2)])
TWO_WAY_PATH = Diagram(range(3), [(0, 1, 2), (1, 2, 2)])
TRIANGLE = Diagram(range(3), [(0, 1, 1), (1, 2, 1), (2, 0, 1)])


def star(n2: int) -> Diagram:
    return Diagram(range(n2 + 1), [(0, i, 2) for i in range(1, n2 + 1)])


# --- weight-2 profile and local labels ------------------------------------


def test_profile_examples():
    assert set(weight2_profile(TRIANGLE).values()) == {0}
    assert weight2_profile(TWO_WAY_TRIANGLE) == {0: 2, 1: 1, 2: 1}


def test_star_with_five_weight2_edges_rejected():
    assert classify_node(star(5), 0)[0].action == "reject"
    res = s_decompose(star(5))
    assert res.certificate.rule == "n-bound" and res.certificate.node == 0


def test_n4_label_is_dcc():
    v = Diagram(range(5), [(0, 1, 2), (0, 3, 2), (2, 0, 2), (4, 0, 2), (1, 2, 1), (3, 2, 1), (1, 4, 1), (3, 4, 1)])
    labels = classify_node(v, 0)
    assert [(lab.n, lab.action) for lab in labels] == [(4, "DCC")]


def test_n3_degree_six_rejected():
    g = Diagram(range(7), [(0, 1, 2), (0, 2, 2), (0, 3, 2), (0, 4, 1), (5, 0, 1), (0, 6, 1)])
    assert [lab.action for lab in classify_node(g, 0)] == ["reject"]
    assert not is_s_decomposable(g)


def test_two_way_apex_has_a_dcc_label():
    labels = classify_node(TWO_WAY_TRIANGLE, 0)
    assert {lab.n for lab in labels} == {2}
    assert "DCC" in {lab.action for lab in labels}


# --- replacement ----------------------------------------------------------


def test_weight4_chord_becomes_weight1():
    # II at the apex leaves the chord 1 -> 2 (weight 4) with weight 1 for an elementary block
    residual, used = apply_replacement(TWO_WAY_TRIANGLE, [PlacedBlock("II", (2, 0, 1))])
    assert residual.edge_list() == [(1, 2, 1)]
    assert used == {1: 1, 2: 1}


def test_reduce_removes_weight2_edges():
    r = reduce(TWO_WAY_PATH)
    assert all(w != 2 for w in r.residual.edges.values())
    r = reduce(TRIANGLE)
    assert r.residual == TRIANGLE and not r.trace.entries


# --- elementary phase -----------------------------------------------------


def test_elementary_examples():
    assert block_decompose(TRIANGLE) == (PlacedBlock("Triangle", (0, 1, 2)),)
    assert block_decompose(Diagram(range(2), [(0, 1, 4)])) == (PlacedBlock("Spike", (0, 1)),) * 2


def test_four_cycle_against_oracle():
    for edges in ([(0, 1, 1), (2, 1, 1), (2, 3, 1), (0, 3, 1)], [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]):
        G = Diagram(range(4), edges)
        assert is_s_decomposable(G) == oracle_decompose(G).decomposable


def test_residual_weight_rejected():
    with pytest.raises(Rejected) as info:
        block_decompose(Diagram(range(2), [(0, 1, 2)]))
    assert info.value.certificate.rule == "residual"


# --- full pipeline --------------------------------------------------------


def test_two_way_two_decompositions():
    for G in (TWO_WAY_TRIANGLE, TWO_WAY_PATH):
        res = s_decompose(G)
        assert res.decomposable and len(res.decompositions) == 2  # [PUBLISHED]
        for D in res.decompositions:
            assert validate_decomposition(D, G)[0]


def test_single_weight2_edge_unique():
    for G in (Diagram(range(2), [(0, 1, 2)]), Diagram(range(2), [(1, 0, 2)])):
        assert len(s_decompose(G).decompositions) == 1


@pytest.mark.parametrize("w", [3, 5, 6, 9])
def test_weight_gate(w):
    res = s_decompose(Diagram(range(3), [(0, 1, 1), (1, 2, w)]))
    assert not res.decomposable and res.certificate.rule == "weight"
    assert res.decompositions == []


def test_isolated_node_and_empty_input():
    assert s_decompose(Diagram(range(0), [])).decomposable
    res = s_decompose(Diagram(range(3), [(0, 1, 1)]))
    assert res.certificate.rule == "uncovered" and res.certificate.node == 2


def test_disconnected_input_is_product():
    G = Diagram(range(6), [(0, 1, 2), (1, 2, 2), (3, 4, 2), (4, 5, 2)])
    assert len(s_decompose(G).decompositions) == 4


def test_empty_neighborhood_certificate():
    # [DERIVED] node 3 meets a pendant edge, a triangle edge and a non-oriented triangle; no block fits
    res = s_decompose(Diagram(range(4), [(0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]))
    assert not res.decomposable
    assert not oracle_decompose(Diagram(range(4), [(0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)])).decomposable
    assert res.certificate.rule == "empty-neighborhood" and res.certificate.node == 3


def test_first_only_and_json():
    res = s_decompose(TWO_WAY_TRIANGLE, all_decompositions=False)
    assert len(res.decompositions) == 1
    doc = res.to_json(trace=True)
    assert doc["s_decomposable"] is True
    assert doc["trace"]["max_examinations_per_node"] <= 2


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_glued_diagrams_are_decomposable(seed):
    rng = random.Random(seed)
    r = random_glued(rng, rng.randint(1, 6))
    if r is None or not r[0].is_connected():
        return
    G, D = r
    res = s_decompose(G)
    assert res.decomposable
    assert D.signature() in {E.signature() for E in res.decompositions}
    assert res.trace.max_per_node() <= 2


def test_chain_examination_budget():
    G = block_chain(300)
    res = s_decompose(G, all_decompositions=False)
    assert res.decomposable
    assert res.trace.total_examinations <= 2 * len(G)


def test_case_table():
    table = case_table()
    full = [r for r in table.values() if r["full"]]
    # [PUBLISHED] two labels at n = 4 and eight at n = 3
    assert sum(1 for r in full if r["n"] == 4) == 2
    assert sum(1 for r in full if r["n"] == 3) == 8
    assert len(case_table_hash()) == 16


def test_decomposition_identity_is_signature():
    a = Decomposition((PlacedBlock("II", (2, 0, 1)), PlacedBlock("Spike", (1, 2))))
    b = Decomposition((PlacedBlock("II", (2, 0, 1)), PlacedBlock("Spike", (1, 2))))
    assert a.signature() == b.signature()
