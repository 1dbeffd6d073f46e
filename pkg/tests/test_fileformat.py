from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F
from dynlab.fileformat import (
    ParseError,
    document_of,
    format_rational,
    parse_rational,
    parse_system_file,
    serialize,
    serialize_system,
)
from dynlab.orbits import build_step_graph
from dynlab.recurrence import chain_classes
from dynlab.reports import dumps, export_dot, jsonable, make_report, rational
from dynlab.system import cantor, circle_grid, cone, random_system, shift_to_limit

SWAP = """dynlab-system 1
metric line
point a 0
point b 1
map a b
map b a
"""


def test_two_point_swap():
    doc, space, f = parse_system_file(SWAP)
    assert f.is_permutation()
    assert space.labels == ("a", "b") and space.d("a", "b") == 1
    assert doc.mapping == {"a": "b", "b": "a"}


def test_explicit_distances_and_comments():
    text = """# a triangle
dynlab-system 1
point x
point y   # trailing comment
point z
dist x y 1/2
dist y z 1/2
dist x z 3/4
map x y
map y z
map z z
"""
    _, space, f = parse_system_file(text)
    assert space.d("x", "z") == F("3/4")
    assert f.labels[f("y")] == "z"


@pytest.mark.parametrize(
    "text, line, needle",
    [
        ("dynlab-system 1\nmetric line\npoint a 1/0\nmap a a\n", 3, "1/0"),
        ("dynlab-system 1\nmetric line\npoint a 0\npoint b 1\nmap a b\n", 6, "not total"),
        ("dynlab-system 1\nmetric line\npoint a 0\npoint a 1\nmap a a\n", 4, "duplicate label"),
        ("dynlab-system 1\nmetric line\npoint a 0\nmap a q\n", 4, "unknown point"),
        ("dynlab-system 2\n", 1, "version"),
        ("metric line\n", 1, "header"),
        ("dynlab-system 1\nmetric line\npoint a 0\nwobble a\n", 4, "unknown keyword"),
        ("dynlab-system 1\npoint a\npoint b\nmap a a\nmap b b\n", 3, "missing distance"),
        (
            "dynlab-system 1\npoint a\npoint b\npoint c\ndist a b 1\ndist b c 1\ndist a c 3\n"
            "map a a\nmap b b\nmap c c\n",
            7,
            "triangle",
        ),
        ("dynlab-system 1\nmetric line\npoint a 0\nmap a a\nmap a a\n", 5, "already mapped"),
        ("dynlab-system 1\nmetric line\npoint a\nmap a a\n", 3, "coordinate"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, needle):
    with pytest.raises(ParseError) as err:
        parse_system_file(text)
    assert err.value.line == line
    assert needle in str(err.value)


def test_parse_error_column():
    with pytest.raises(ParseError) as err:
        parse_system_file("dynlab-system 1\nmetric line\npoint a   x/2\nmap a a\n")
    assert (err.value.line, err.value.column) == (3, 11)


@pytest.mark.parametrize("tok, val", [("3", 3), ("-2/4", F("-1/2")), ("0", 0), ("10/5", 2)])
def test_parse_rational_ok(tok, val):
    assert parse_rational(tok) == val


@pytest.mark.parametrize("tok", ["1/0", "0.5", "1e3", "a", "1//2", "", "1/-2"])
def test_parse_rational_rejects(tok):
    with pytest.raises(ValueError):
        parse_rational(tok)


def test_format_rational():
    assert format_rational(F("2/4")) == "1/2"
    assert format_rational(F(3)) == "3"


@pytest.mark.parametrize(
    "f", [cantor(2), circle_grid(6, F("1/3")), shift_to_limit(3), cone(cantor(1), 2), random_system(5, 9)]
)
def test_round_trip_builders(f):
    text = serialize_system(f)
    doc, _, g = parse_system_file(text)
    assert g == f
    assert serialize(doc) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6), st.booleans())
def test_round_trip_random(n, seed, perm):
    f = random_system(n, seed, perm)
    doc = document_of(f)
    doc2, _, g = parse_system_file(serialize(doc))
    assert g == f and doc2 == doc


def test_reports_use_exact_rationals():
    assert rational(F("1/3")) == "1/3" and rational(2) == "2/1"
    assert rational(float("inf")) == "inf"
    rep = make_report("x", {"epsilon": F("1/2")}, {"v": F("1/9")}, 0.0123)
    assert rep["inputs"] == {"epsilon": "1/2"}
    assert rep["verdict"] == {"v": "1/9"}
    assert rep["timing"] == {"elapsed_ms": 12}
    assert "." not in dumps(make_report("x", {}, F("1/3"), 0))
    assert jsonable(frozenset({0, 2}), ["a", "b", "c"]) == ["a", "c"]


def test_dot_function_edges_only(E1):
    text = export_dot(E1, build_step_graph(E1, F("1/3")))
    assert text.count("->") == 4
    assert text.count("style=bold") == 4
    assert text == export_dot(E1, build_step_graph(E1, F("1/3")))


def test_dot_cluster_for_cycle(rot):
    g = build_step_graph(rot, F("1/8"))
    text = export_dot(rot, g, chain_classes(rot, F("1/8")))
    assert text.count("subgraph cluster_") == 1
    assert 'label="minimal"' in text
    assert text.index('"0"') < text.index('"1/2"') < text.index('"1/4"')
