from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F
from dynlab.space import (
    UnknownPointError,
    ball,
    clopen_cover,
    distance_spectrum,
    from_table,
    h_components,
    line_space,
    validate_metric,
)
from dynlab.system import cantor, cone, interval_grid, random_system, shift_to_limit, circle_grid
from oracles import ball_scan, components_bfs, pair_distances


def test_two_point_metric_ok():
    assert validate_metric(from_table(["0", "1"], [[0, 1], [1, 0]])) is None


def test_triangle_violation_names_triple():
    sp = from_table(["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    bad = validate_metric(sp)
    assert bad.axiom == "triangle"
    assert set(bad.points) == {"a", "b", "c"}


def test_zero_distance_between_distinct_points():
    bad = validate_metric(from_table(["a", "b"], [[0, 0], [0, 0]]))
    assert bad.axiom == "positivity" and bad.points == ("a", "b")


def test_asymmetric_table():
    bad = validate_metric(from_table(["a", "b"], [[0, 1], [2, 0]]))
    assert bad.axiom == "symmetry"


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        line_space([0, 1], labels=["a", "a"])


@pytest.mark.parametrize(
    "space, expected",
    [
        (interval_grid(4).space, ["0", "1/4", "1/2", "3/4", "1"]),
        (cantor(1).space, ["0", "1/3", "2/3", "1"]),
        (line_space([5]), ["0"]),
    ],
)
def test_distance_spectrum(space, expected):
    spec = distance_spectrum(space)
    assert spec == [F(s) for s in expected]
    assert spec == sorted(pair_distances(space))


def test_ball_strict(I4):
    sp = I4.space
    assert sp.label_set(ball(sp, "0", F("1/4"))) == {"0"}
    assert sp.label_set(ball(sp, "1/2", F("3/8"))) == {"1/4", "1/2", "3/4"}
    assert ball(sp, "1/2", 0) == frozenset()
    assert ball(sp, "1/2", F("3/8")) == ball_scan(sp, sp.index("1/2"), F("3/8"))


def test_ball_unknown_label(I4):
    with pytest.raises(UnknownPointError):
        ball(I4.space, "7", 1)


def test_h_components_grid_frozen_at_spacing(I4):
    assert [len(b) for b in h_components(I4.space, F("1/4"))] == [1] * 5
    assert h_components(I4.space, F("3/10")) == [frozenset(range(5))]


def test_h_components_cantor_level_one(E1):
    # consecutive gaps of E_1 are all 1/3, so strict d < 1/3 joins nothing
    sp = E1.space
    assert h_components(sp, F("1/3")) == components_bfs(sp, F("1/3"))
    assert [sp.label_set(b) for b in h_components(sp, F("1/3"))] == [{"0"}, {"1/3"}, {"2/3"}, {"1"}]
    assert [sp.label_set(b) for b in h_components(sp, F("2/3"))] == [{"0", "1/3", "2/3", "1"}]


def test_h_components_cantor_level_two(E2):
    sp = E2.space
    blocks = [sp.label_set(b) for b in h_components(sp, F("1/3"))]
    assert blocks == [{"0", "1/9", "2/9", "1/3"}, {"2/3", "7/9", "8/9", "1"}]


def _exhaustive_cover(space, eps):
    """Scan every spectrum h independently and keep the best separation."""
    best = None
    # a one-point space has no positive distances; any h gives the single block
    for h in distance_spectrum(space)[1:] or [Fraction(1)]:
        blocks = components_bfs(space, h)
        diam = max(max(space.dist[a][b] for a in bl for b in bl) for bl in blocks)
        if diam >= eps:
            continue
        seps = [space.dist[a][b] for i, x in enumerate(blocks) for y in blocks[i + 1:] for a in x for b in y]
        sep = min(seps) if seps else None
        key = (1, 0) if sep is None else (0, sep)
        if best is None or key > best[0]:
            best = (key, blocks, sep, diam)
    return best


def test_clopen_cover_cantor_one(E1):
    cover = clopen_cover(E1.space, F("1/2"))
    assert cover.separation == F("1/3")
    assert cover.max_diameter == 0
    assert len(cover.blocks) == 4
    ref = _exhaustive_cover(E1.space, F("1/2"))
    assert (list(cover.blocks), cover.separation) == (ref[1], ref[2])


def test_clopen_cover_cantor_two(E2):
    cover = clopen_cover(E2.space, F("1/2"))
    assert [E2.space.label_set(b) for b in cover.blocks] == [{"0", "1/9", "2/9", "1/3"}, {"2/3", "7/9", "8/9", "1"}]
    assert cover.separation == F("1/3") and cover.max_diameter == F("1/3")


def test_clopen_cover_interval(I4):
    c = clopen_cover(I4.space, F("1/8"))
    assert len(c.blocks) == 5 and c.separation == F("1/4") and c.max_diameter == 0
    c = clopen_cover(I4.space, F("1/2"))
    assert c.separation == F("1/4")


def test_clopen_cover_fine_grid_and_pairs():
    assert clopen_cover(interval_grid(8).space, F("1/2")).separation == F("1/8")
    assert clopen_cover(line_space([0, 1]), F("1/2")).separation == 1
    assert clopen_cover(line_space([0, F("1/2")]), F("1/4")).max_diameter == 0


def test_clopen_cover_never_absent_on_finite_space():
    # h = min gap always yields singletons of diameter 0
    for f in (interval_grid(16), cantor(3), random_system(8, 11)):
        assert clopen_cover(f.space, F("1/1000")).max_diameter == 0


def test_clopen_cover_single_block_is_unseparated():
    two = clopen_cover(line_space([0, F("1/10")]), F("1/2"))
    assert two.separation == F("1/10") and len(two.blocks) == 2
    three = clopen_cover(line_space([0, F("1/10"), F("1/5")]), F("1/2"))
    assert len(three.blocks) == 1 and three.separation is None


spaces = st.builds(lambda n, seed: random_system(n, seed).space, st.integers(1, 8), st.integers(0, 10**6))


@settings(max_examples=60, deadline=None)
@given(spaces, st.data())
def test_components_are_separated_and_refine(space, data):
    spec = distance_spectrum(space)
    h1 = data.draw(st.sampled_from(spec[1:] + [Fraction(1, 7), Fraction(2)]))
    h2 = data.draw(st.sampled_from(spec[1:] + [Fraction(1, 7), Fraction(2)]))
    h1, h2 = min(h1, h2), max(h1, h2)
    fine, coarse = h_components(space, h1), h_components(space, h2)
    assert fine == components_bfs(space, h1)
    for i, a in enumerate(fine):
        for b in fine[i + 1:]:
            assert all(space.dist[x][y] >= h1 for x in a for y in b)
    assert all(any(block <= big for big in coarse) for block in fine)


@settings(max_examples=60, deadline=None)
@given(spaces, st.integers(1, 12))
def test_clopen_cover_contract(space, k):
    eps = Fraction(k, 8)
    cover = clopen_cover(space, eps)
    ref = _exhaustive_cover(space, eps)
    assert (cover is None) == (ref is None)
    if cover is not None:
        assert cover.max_diameter < eps
        assert cover.separation is None or cover.separation > 0
        assert cover.separation == ref[2]
        assert sorted(x for b in cover.blocks for x in b) == list(range(len(space)))


@pytest.mark.parametrize(
    "f",
    [cantor(3), interval_grid(8), circle_grid(6, F("1/3")), shift_to_limit(4), cone(cantor(1), 3), random_system(6, 3)],
)
def test_builders_produce_metrics(f):
    assert validate_metric(f.space) is None
