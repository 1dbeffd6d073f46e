import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F, seq
from dynlab.orbits import (
    Chain,
    LassoPseudoOrbit,
    PreconditionError,
    bad_cantor_pseudo_orbit,
    block_pseudo_orbit,
    build_step_graph,
    chain_through_component,
    concatenate_chains,
    extend_to_lasso,
    is_chain,
    make_chain,
    orbit_lasso,
    reverse_chain,
    validate_chain,
    validate_lasso,
)
from dynlab.space import UnknownPointError, distance_spectrum
from dynlab.system import cantor, random_system


def test_validate_chain_examples(E2):
    assert validate_chain(E2, ["1/9", "1/3", "1"], F("1/9")) is None
    assert validate_chain(E2, ["1", "1/9"], F("1/9")) == 0
    assert validate_chain(E2, ["1", "1/9"], F("2/9")) is None


def test_validate_chain_errors(E2):
    with pytest.raises(UnknownPointError):
        validate_chain(E2, ["1", "5"], 1)
    with pytest.raises(ValueError):
        validate_chain(E2, [], 1)


def test_make_chain_reports_index(E2):
    with pytest.raises(PreconditionError) as err:
        make_chain(E2, ["1/9", "1/3", "1", "1/9"], F("1/9"))
    assert err.value.index == 2


def test_concatenate(E2):
    a = make_chain(E2, ["1/9", "1/3"], F("2/9"))
    b = make_chain(E2, ["1/3", "1", "1/9"], F("2/9"))
    c = concatenate_chains(a, b)
    assert c.points == seq(E2, "1/9", "1/3", "1", "1/9")
    assert is_chain(E2, c.points, F("2/9"))
    single = make_chain(E2, ["1/9"], F("2/9"))
    assert concatenate_chains(single, a) == a


def test_concatenate_mismatch(E2):
    a = make_chain(E2, ["1/9", "1/3"], F("2/9"))
    with pytest.raises(ValueError):
        concatenate_chains(a, a)
    with pytest.raises(ValueError):
        concatenate_chains(a, make_chain(E2, ["1/3"], F("1/9")))


def test_extend_to_lasso(E2, rot, I4):
    po = extend_to_lasso(E2, make_chain(E2, ["1/9", "1/3", "1"], F("1/9")))
    assert po.stem == seq(E2, "1/9", "1/3", "1") and po.cycle == seq(E2, "0")
    po = extend_to_lasso(rot, make_chain(rot, ["0"], F("1/8")))
    assert po.stem == () and po.cycle == seq(rot, "0", "1/4", "1/2", "3/4")
    po = extend_to_lasso(I4, make_chain(I4, ["1/2"], 1))
    assert po.cycle == seq(I4, "1/2")


def test_lasso_indexing_and_validation(E2):
    po = LassoPseudoOrbit(seq(E2, "2/9"), seq(E2, "2/3", "0"), F("1/9"))
    assert po.unroll(5) == list(seq(E2, "2/9", "2/3", "0", "2/3", "0"))
    # wrap step 0 -> 2/3 misses t(0) = 0 by 2/3
    assert validate_lasso(E2, po) == 2
    with pytest.raises(ValueError):
        LassoPseudoOrbit((), (), 1)


def test_reverse_chain_rotation(rot):
    c = reverse_chain(rot, "0", "1/4", F("1/8"))
    assert c.points == seq(rot, "1/4", "1/2", "3/4", "0")
    assert is_chain(rot, c.points, F("1/8"))


def test_reverse_chain_fixed_point(I4):
    c = reverse_chain(I4, "1/2", "1/2", F("1/8"))
    assert set(c.points) == {I4.space.index("1/2")}
    assert is_chain(I4, c.points, F("1/8"))


def test_reverse_chain_refusals(E2, rot):
    assert reverse_chain(E2, "1/9", "1/3", 1) is None
    # d(f(0), 1/2) = 1/4 is not below the one-step modulus 1/4
    assert reverse_chain(rot, "0", "1/2", F("1/8")) is None


def test_chain_through_component(five_cycle):
    c = chain_through_component(five_cycle, "0", "1/5", F("1/2"))
    assert c.points == seq(five_cycle, "0", "2/5", "4/5", "1/5", "3/5", "1/5")
    assert is_chain(five_cycle, c.points, F("1/2"))
    loop = chain_through_component(five_cycle, "2/5", "2/5", F("1/2"))
    assert loop.points == seq(five_cycle, "2/5", "4/5", "1/5", "3/5", "0", "2/5")


def test_chain_through_component_refusals(five_cycle, E2):
    assert chain_through_component(E2, "0", "1/9", 1) is None
    # components of d < 1/10 are singletons
    assert chain_through_component(five_cycle, "0", "1/5", F("1/5")) is None


def test_block_pseudo_orbit_rotation(rot):
    po = block_pseudo_orbit(rot, ["0", "1/4", "1/2"], 4, F("3/5"))
    assert po.stem == seq(rot, "0", "1/4", "1/2", "3/4", "1/4", "1/2", "3/4", "0")
    assert po.cycle == seq(rot, "1/2", "3/4", "0", "1/4")
    assert validate_lasso(rot, po) is None


def test_block_pseudo_orbit_identity(I4):
    po = block_pseudo_orbit(I4, ["1/4", "1/2"], 1, F("3/4"))
    assert po.unroll(4) == list(seq(I4, "1/4", "1/2", "1/2", "1/2"))


def test_block_pseudo_orbit_preconditions(rot, I4):
    with pytest.raises(PreconditionError):
        # rho(rot^2, id) = 1/2
        block_pseudo_orbit(rot, ["0", "1/4"], 2, F("3/5"))
    with pytest.raises(PreconditionError) as err:
        block_pseudo_orbit(I4, ["0", "1/4", "1"], 1, F("3/4"))
    assert err.value.index == 1


def test_bad_cantor_pseudo_orbit(E2, E1):
    po = bad_cantor_pseudo_orbit(2, F("2/9"))
    assert po.stem == () and po.cycle == seq(E2, "1/9", "1/3", "1")
    assert validate_lasso(E2, po) is None
    po1 = bad_cantor_pseudo_orbit(1, F("1/2"))
    assert po1.cycle == seq(E1, "1/3", "1")
    with pytest.raises(PreconditionError):
        bad_cantor_pseudo_orbit(2, F("1/9"))


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_bad_cantor_validates_at_twice_gap(M):
    po = bad_cantor_pseudo_orbit(M, Fraction(2, 3**M))
    assert validate_lasso(cantor(M), po) is None


def _edge_scan(f, delta):
    n = len(f)
    return {(x, y) for x in range(n) for y in range(n) if f.space.dist[f.image[x]][y] < delta}


def test_step_graph_examples(E2):
    g = build_step_graph(E2, F("1/9"))
    assert g.edges() == {(x, E2.image[x]) for x in range(8)}
    g2 = build_step_graph(E2, F("2/9"))
    assert (E2.space.index("1"), E2.space.index("1/9")) in g2.edges()
    assert g2.edges() == _edge_scan(E2, F("2/9"))
    full = build_step_graph(E2, F("2"))
    assert len(full.edges()) == 64
    with pytest.raises(ValueError):
        build_step_graph(E2, 0)


systems = st.builds(random_system, st.integers(1, 6), st.integers(0, 10**6), st.booleans())


@settings(max_examples=80, deadline=None)
@given(systems, st.integers(0, 10**6), st.integers(1, 8))
def test_walks_are_pseudo_orbits(f, seed, k):
    delta = Fraction(k, 8)
    rng = random.Random(seed)
    n = len(f)
    g = build_step_graph(f, delta)
    assert g.edges() == _edge_scan(f, delta)
    for _ in range(10):
        s = [rng.randrange(n) for _ in range(rng.randint(1, 6))]
        assert g.is_walk(s) == is_chain(f, s, delta)


@settings(max_examples=60, deadline=None)
@given(systems, st.integers(1, 8), st.integers(1, 8))
def test_step_graph_monotone(f, a, b):
    d1, d2 = sorted((Fraction(a, 8), Fraction(b, 8)))
    assert build_step_graph(f, d1).edges() <= build_step_graph(f, d2).edges()
    for x in range(len(f)):
        assert f.image[x] in build_step_graph(f, d1).successors[x]


@settings(max_examples=60, deadline=None)
@given(systems, st.integers(0, 10**6))
def test_truncation_and_extension(f, seed):
    rng = random.Random(seed)
    n = len(f)
    delta = rng.choice(distance_spectrum(f.space)[1:] or [Fraction(1)])
    g = build_step_graph(f, delta)
    walk = [rng.randrange(n)]
    for _ in range(rng.randint(0, 6)):
        walk.append(rng.choice(g.successors[walk[-1]]))
    for cut in range(1, len(walk) + 1):
        assert is_chain(f, walk[:cut], delta)
    po = extend_to_lasso(f, Chain(tuple(walk), delta))
    assert validate_lasso(f, po) is None
    horizon = len(walk) + 2 * n
    unrolled = po.unroll(horizon)
    assert unrolled[: len(walk)] == walk
    assert unrolled[len(walk) - 1:] == f.orbit(walk[-1], horizon - len(walk) + 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_permutation_constructions_validate(n, seed):
    f = random_system(n, seed, permutation=True)
    spec = distance_spectrum(f.space)
    rng = random.Random(seed)
    delta = rng.choice(spec[1:] or [Fraction(1)]) * rng.choice([1, 2, 3])
    p, q = rng.randrange(n), rng.randrange(n)
    c = chain_through_component(f, p, q, delta)
    if c is not None:
        assert (c.start, c.end) == (p, q)
        assert is_chain(f, c.points, delta)
    y = rng.randrange(n)
    r = reverse_chain(f, p, y, delta)
    if r is not None:
        assert (r.start, r.end) == (y, p)
        assert is_chain(f, r.points, delta)
    stem, cyc = orbit_lasso(f, p)
    assert stem == () and cyc[0] == p
    assert f.power(len(cyc)).image[p] == p
