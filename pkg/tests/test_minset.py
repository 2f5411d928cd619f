import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from artincube import minset as ms


@st.composite
def isometries(draw, max_D=3, tmax=3):
    D = draw(st.integers(1, max_D))
    perm = draw(st.permutations(range(D)))
    signs = draw(st.lists(st.sampled_from((1, -1)), min_size=D, max_size=D))
    t = draw(st.lists(st.integers(-tmax, tmax), min_size=D, max_size=D))
    return ms.LatticeIsometry(tuple(perm), tuple(signs), tuple(t))


def brute_delta(g, R=8):
    return min(ms.displacement(g, x) for x in itertools.product(range(-R, R + 1), repeat=g.D))


SWAP_11 = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,+); t=(1,1)")
SWAP_12 = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,+); t=(1,2)")


def test_swap_translate_examples():
    W = ms.Window.cube(2, 5)
    assert ms.translation_length_1(SWAP_11).delta == 2
    strip = {p for p in itertools.product(range(-5, 6), repeat=2) if abs(p[0] - p[1]) <= 1}
    assert ms.min1_set(SWAP_11, W) == strip
    assert ms.translation_length_1(SWAP_12).delta == 3
    assert ms.min1_set(SWAP_12.power(2), W) == set(itertools.product(range(-5, 6), repeat=2))
    assert ms.check_orbit_count(SWAP_11).details["orbits"] == 4
    assert ms.check_orbit_count(SWAP_12).details["orbits"] == 6


def test_parse_and_print():
    assert SWAP_11(( 3, 7)) == (8, 4)
    assert ms.parse_isometry(SWAP_12.to_text()) == SWAP_12
    assert ms.parse_isometry("t=(1,-2)") == ms.LatticeIsometry.translation((1, -2))
    for bad in ("D=2; sigma=(1,1)", "D=2; signs=(+,*)", "D=3; t=(1,2)", "sigma=1,2", "q=3"):
        with pytest.raises(ValueError):
            ms.parse_isometry(bad)


@given(isometries(tmax=2))
def test_closed_form_matches_brute_force(g):
    tl = ms.translation_length_1(g)
    assert tl.delta == brute_delta(g)
    assert ms.displacement(g, tl.certificate) == tl.delta


@given(isometries(), isometries())
def test_group_operations(g, h):
    x = (2, -1, 5)[:g.D]
    assert g.inverse()(g(x)) == x
    assert g.power(3)(x) == g(g(g(x)))
    assert g.power(-2) == g.inverse().power(2)
    if g.D == h.D:
        assert g.compose(h)(x) == g(h(x))


@given(isometries(), st.integers(1, 6))
def test_translation_length_is_subadditive_in_powers(g, k):
    d = ms.translation_length_1(g).delta
    assert ms.translation_length_1(g.power(k)).delta <= k * d


@given(isometries())
def test_stable_power_is_additive_when_hyperbolic(g):
    hb = ms.is_hyperbolic_on_lattice(g)
    if hb.hyperbolic:
        k = math.factorial(g.D)
        assert ms.translation_length_1(g.power(k)).delta == k * hb.delta


def test_positive_delta_without_an_axis():
    # rotation-like: delta 1, yet g^4 is the identity
    g = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,-); t=(1,0)")
    assert ms.translation_length_1(g).delta == 1
    assert g.power(4) == ms.LatticeIsometry.identity(2)
    assert not ms.is_hyperbolic_on_lattice(g).hyperbolic
    assert ms.check_hyperbolic_on_subdivision(g).kind == "Elliptic"
    with pytest.raises(ms.NotHyperbolic):
        ms.check_orbit_count(g)


def test_stable_power_need_not_be_a_translation():
    g = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,-); t=(0,0)")
    assert not g.power(2).is_translation()


@given(isometries())
def test_subdivision_decides(g):
    hb = ms.check_hyperbolic_on_subdivision(g)
    assert hb.kind in ("Hyperbolic", "Elliptic")
    if hb.kind == "Elliptic":
        assert g.subdivided()(hb.witness) == hb.witness


@given(isometries(max_D=2), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_min1_equivariance(g, v):
    v = v[:g.D]
    W = ms.Window.cube(g.D, 4)
    conj = g.conjugate_by_translation(v)
    shifted = {tuple(a + b for a, b in zip(p, v)) for p in ms.min1_set(g, W)}
    assert ms.min1_set(conj, W.shifted(v)) == shifted


def test_skewering_cases():
    H = ms.CoordHyperplane(0, 0)
    assert ms.skewers(ms.parse_isometry("t=(2)"), H) is ms.Skew.PLUS
    assert ms.skewers(ms.parse_isometry("t=(-1)"), H) is ms.Skew.MINUS
    assert ms.skewers(ms.LatticeIsometry.identity(1), H) is ms.Skew.PRESERVES
    assert ms.skewers(ms.parse_isometry("signs=(-); t=(1)"), H) is ms.Skew.PRESERVES
    assert ms.skewers(ms.parse_isometry("signs=(-); t=(0)"), H) is ms.Skew.NEITHER
    assert ms.Skew.PLUS.value == "Skewers+"


def test_window_sizing_rule():
    with pytest.raises(ms.WindowTooSmall):
        ms.check_skewering(SWAP_11, ms.Window.cube(2, 1))


@given(st.integers(0, 10**6))
def test_harnesses_on_random_hyperbolic_isometries(seed):
    rng = random.Random(seed)
    D = rng.choice((2, 3))
    (g,) = ms.sample_hyperbolic(D, 1, rng)
    W = ms.harness_window(g)
    for rep in (ms.check_skewering(g, W), ms.check_orbit_count(g),
                ms.check_median_closure(g, W, cap=2000, rng=rng)):
        assert rep.ok, (str(g), rep.name, rep.violations)


def test_median_closure_detects_broken_sets():
    bad = {(0, 0), (2, 0), (1, 1)}
    assert ms.median_closure_violations(bad, [tuple(sorted(bad))])
    rep = ms.negative_control(ms.Window.cube(2, 3), rng=random.Random(1))
    assert rep.ok and rep.details["flagged"] > 0
