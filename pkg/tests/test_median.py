import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from artincube import median as md
from artincube.cubes import ExplicitCubeComplex, grid_window, is_locally_cat0


@st.composite
def grid_complexes(draw):
    D = draw(st.integers(1, 3))
    sides = draw(st.lists(st.integers(1, {1: 6, 2: 4, 3: 2}[D]), min_size=D, max_size=D))
    return grid_window((0,) * D, tuple(sides))


@st.composite
def cubulated_algebras(draw):
    D = draw(st.sampled_from((2, 3)))
    side = 3 if D == 2 else 2
    box = list(itertools.product(range(side + 1), repeat=D))
    seed = draw(st.lists(st.sampled_from(box), min_size=2, max_size=4, unique=True))
    pts, mu = md.grid_median_algebra(md.median_closure(seed))
    return md.cubulate_median_algebra(pts, mu)


complexes = st.one_of(grid_complexes(), cubulated_algebras())


def test_small_grid_facts():
    X = grid_window((0, 0), (2, 3))
    assert len(md.hyperplanes(X)) == 5
    assert md.d1(X, (0, 0), (2, 3)) == 5
    assert md.median(X, (0, 0), (2, 0), (1, 3)) == (1, 0)
    assert md.interval(X, (0, 0), (1, 1)) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert md.convex_hull_1(X, [(0, 1), (1, 0)]) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert md.gate_projection(X, {(0, 0), (0, 1)}, (2, 3)) == (0, 1)


def test_grid_median_is_coordinatewise():
    X = grid_window((0, 0, 0), (2, 1, 2))
    for a, b, c in itertools.combinations(X.vertices, 3):
        assert md.median(X, a, b, c) == md.coordinatewise_median(a, b, c)


def test_brute_force_interval():
    X = grid_window((0, 0), (3, 2))
    G = X.graph
    for x, y in itertools.combinations(X.vertices, 2):
        on_geodesic = {v for path in nx.all_shortest_paths(G, x, y) for v in path}
        assert md.interval(X, x, y) == on_geodesic


def test_metric_median_graphs():
    c5, k4 = md.is_metric_median(nx.cycle_graph(5)), md.is_metric_median(nx.complete_graph(4))
    assert not c5 and len(c5.witness) == 3
    assert not k4 and k4.count == 0
    assert md.is_metric_median(nx.cycle_graph(4))
    assert md.is_metric_median(nx.hypercube_graph(3))
    assert md.is_metric_median(nx.random_labeled_tree(12, seed=1))
    assert not md.is_metric_median(nx.complete_bipartite_graph(2, 3))
    assert not md.is_metric_median(nx.Graph([(0, 1), (2, 3)]))


def test_self_osculating_cycle_rejected():
    X = ExplicitCubeComplex(range(6), [(i, (i + 1) % 6) for i in range(6)])
    with pytest.raises(md.HyperplaneSelfOsculation):
        md.hyperplanes(X)


@given(complexes, st.data())
def test_distance_counts_separating_hyperplanes(X, data):
    x, y = data.draw(st.sampled_from(X.vertices)), data.draw(st.sampled_from(X.vertices))
    assert md.d1(X, x, y) == md.separating_count(X, x, y)


@given(complexes, st.data())
def test_median_is_lipschitz(X, data):
    x, y, z = (data.draw(st.sampled_from(X.vertices)) for _ in range(3))
    x2 = data.draw(st.sampled_from(sorted(X.graph[x], key=repr)))
    m, m2 = md.median(X, x, y, z), md.median(X, x2, y, z)
    assert md.d1(X, m, m2) <= 1
    assert md.median(X, x, y, z) == md.median(X, z, x, y) == md.median(X, y, z, x)
    assert md.median(X, x, x, y) == x


@given(complexes, st.data())
def test_gate_projection(X, data):
    seeds = data.draw(st.lists(st.sampled_from(X.vertices), min_size=1, max_size=3))
    C = md.convex_hull_1(X, seeds)
    assert md.is_convex(X, C)
    x = data.draw(st.sampled_from(X.vertices))
    p = md.gate_projection(X, C, x)
    assert p in C
    assert md.gate_projection(X, C, p) == p
    assert md.d1(X, x, p) == min(md.d1(X, x, c) for c in C)
    for c in C:
        assert md.median(X, x, p, c) == p


def test_gate_requires_unique_nearest_point():
    X = grid_window((0, 0), (2, 2))
    with pytest.raises(md.GateNotUnique):
        md.gate_projection(X, {(0, 1), (1, 0)}, (0, 0))


def test_staircase_cubulation():
    pts, mu = md.grid_median_algebra(md.staircase_points(3))
    X = md.cubulate_median_algebra(pts, mu)
    assert X.counts() == {0: 10, 1: 12, 2: 3}
    assert is_locally_cat0(X)
    for a, b, c in itertools.combinations(pts, 3):
        assert md.median(X, a, b, c) == mu(a, b, c)


def test_cubulate_tree_median_algebra():
    T = nx.random_labeled_tree(9, seed=4)
    nodes, table = md.graph_median_table(T)
    mu = {(nodes[i], nodes[j], nodes[k]): nodes[table[i, j, k]]
          for i, j, k in itertools.product(range(len(nodes)), repeat=3)}
    X = md.cubulate_median_algebra(nodes, mu)
    assert {frozenset(e) for e in X.edges} == {frozenset(e) for e in T.edges}
    assert X.dimension == 1


def test_cubulate_rejects_bad_input():
    with pytest.raises(md.MedianAxiomViolation):
        md.grid_median_algebra([(0, 0), (2, 0), (1, 1)])
    pts = [0, 1, 2]
    with pytest.raises(md.MedianAxiomViolation):
        md.cubulate_median_algebra(pts, lambda a, b, c: a)
    with pytest.raises(md.MedianAxiomViolation):
        md.cubulate_median_algebra(pts, lambda a, b, c: 7)
    pts, mu = md.grid_median_algebra(itertools.product(range(2), repeat=3))
    with pytest.raises(md.MedianAxiomViolation):
        md.cubulate_median_algebra(pts, mu, ambient_rank=2)


def test_random_median_subalgebras_round_trip():
    rng = random.Random(0)
    for _ in range(10):
        seed = rng.sample(list(itertools.product(range(4), repeat=2)), 4)
        pts, mu = md.grid_median_algebra(md.median_closure(seed))
        X = md.cubulate_median_algebra(pts, mu, ambient_rank=2)
        assert is_locally_cat0(X)


def test_subdivision_of_grid():
    X = grid_window((0, 0), (2, 2))
    S = md.cubical_subdivision(X)
    assert len(S.vertices) == 25
    assert set(S.vertices) == set(itertools.product(range(5), repeat=2))
    assert S.counts() == grid_window((0, 0), (4, 4)).counts()


@given(complexes)
def test_subdivision_doubles_distances(X):
    S = md.cubical_subdivision(X)
    assert is_locally_cat0(S)
    assert len(md.hyperplanes(S)) == 2 * len(md.hyperplanes(X))
    v, w = X.vertices[0], X.vertices[-1]
    key = lambda p: tuple(2 * t for t in p)
    assert md.d1(S, key(v), key(w)) == 2 * md.d1(X, v, w)


def test_subdivision_of_abstract_vertices():
    X = ExplicitCubeComplex("abcd", [("a", "b", "c", "d")])
    S = md.cubical_subdivision(X)
    assert S.counts() == {0: 9, 1: 12, 2: 4}
