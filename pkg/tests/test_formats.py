from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdecomp.formats import ParseError, format_diagram, format_matrix, parse, to_dot
from sdecomp.generate import random_diagram, random_matrix
from sdecomp.model import Color, Diagram, ExchangeMatrix, MalformedInput


def test_parse_matrix_with_comments():
    B = parse("# two-way triangle\n3\n0 1 -1\n-2 0 2  # row two\n2 -2 0\n")
    assert isinstance(B, ExchangeMatrix)
    assert B.rows == ((0, 1, -1), (-2, 0, 2), (2, -2, 0))


def test_parse_diagram_is_one_based():
    G = parse("diagram 3\n1 2 2\n2 3 4\n")
    assert isinstance(G, Diagram)
    assert G.edge_list() == [(0, 1, 2), (1, 2, 4)]


@pytest.mark.parametrize(
    ("text", "line", "column"),
    [
        ("2\n0 x\n-1 0\n", 2, 3),
        ("2\n0 1\n", 3, 1),
        ("2\n1 1\n-1 0\n", 2, 1),
        ("2\n0 1\n1 0\n", 2, 3),
        ("2\n0 1 5\n-1 0\n", 2, 5),
        ("diagram 2\n1 3 1\n", 2, 3),
        ("diagram 2\n1 1 1\n", 2, 3),
        ("diagram 2\n1 2 1\n2 1 1\n", 3, 1),
        ("diagram 2\n1 2 0\n", 2, 5),
        ("", 1, 1),
    ],
)
def test_parse_errors_point_at_the_problem(text, line, column):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert isinstance(info.value, MalformedInput)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 7))
def test_round_trips(seed, n):
    rng = random.Random(seed)
    B = random_matrix(rng, n)
    assert parse(format_matrix(B)) == B
    G = random_diagram(rng, n, (1, 2, 4))
    assert parse(format_diagram(G)) == G


def test_dot_export():
    G = Diagram(range(3), [(0, 1, 2), (1, 2, 1)], {0: Color.BLACK, 1: Color.WHITE, 2: Color.WHITE})
    dot = to_dot(G)
    assert dot.startswith("digraph G {")
    assert '1 -> 2 [label="2"];' in dot
    assert "2 -> 3;" in dot
    assert "1 [style=filled, fillcolor=black" in dot
