import networkx as nx
import pytest
from hypothesis import given, strategies as st

from artincube import cubes as cb
from artincube.cubes import ComplexError, ExplicitCubeComplex


def torus(extra_square=False):
    X = cb.SquareComplex(name="torus")
    X.add_vertex("o")
    X.add_edge("a", "o", "o")
    X.add_edge("b", "o", "o")
    X.add_square([("a", 1), ("b", 1), ("a", -1), ("b", -1)])
    if extra_square:
        X.add_square([("a", 1), ("b", 1), ("a", -1), ("b", -1)])
    return X


def test_torus_link_is_a_four_cycle():
    X = torus()
    link = cb.vertex_link(X, "o")
    G = link.graph()
    assert len(link.points) == 4
    assert nx.is_isomorphic(G, nx.cycle_graph(4))
    assert cb.is_locally_cat0(X)
    assert X.euler_characteristic() == 0


def test_doubled_square_is_rejected():
    chk = cb.is_locally_cat0(torus(extra_square=True))
    assert not chk and "same link simplex" in chk.reason


def test_folded_square_is_rejected():
    X = cb.SquareComplex()
    X.add_vertex("o")
    X.add_edge("a", "o", "o")
    # every corner of the square a a a^-1 a^-1 meets the loop a twice
    X.add_square([("a", 1), ("a", 1), ("a", -1), ("a", -1)])
    chk = cb.is_locally_cat0(X)
    assert not chk and "twice" in chk.reason


def test_cube_corner_rejected_by_both_checkers():
    C = cb.cube_corner_counterexample()
    for chk in (cb.is_locally_cat0(C), cb.cube_triple_condition(C)):
        assert not chk and chk.vertex == (0, 0, 0)


def test_full_cube_accepted():
    C = cb.grid_window((0, 0, 0), (1, 1, 1))
    assert C.counts() == {0: 8, 1: 12, 2: 6, 3: 1}
    assert cb.is_locally_cat0(C) and cb.cube_triple_condition(C)


@pytest.mark.parametrize("lows, highs", [((0,), (4,)), ((0, 0), (2, 3)), ((-1, 0, 0), (1, 1, 2)),
                                         ((0, 0, 0, 0), (1, 1, 1, 1))])
def test_grid_windows(lows, highs):
    X = cb.grid_window(lows, highs)
    assert cb.is_locally_cat0(X)
    assert cb.as_cube_complex(X).euler_characteristic() == 1


grid3 = cb.grid_window((0, 0, 0), (2, 2, 1))
SQUARES = grid3.squares
CUBES = grid3.cubes_of_dim(3)


@given(st.lists(st.booleans(), min_size=len(SQUARES), max_size=len(SQUARES)),
       st.lists(st.booleans(), min_size=len(CUBES), max_size=len(CUBES)))
def test_link_checker_agrees_with_cube_triples(sq_mask, cube_mask):
    cells = list(grid3.edges)
    cells += [s for s, keep in zip(SQUARES, sq_mask) if keep]
    cells += [c for c, keep in zip(CUBES, cube_mask) if keep]
    X = ExplicitCubeComplex(grid3.vertices, cells)
    assert bool(cb.is_locally_cat0(X)) == bool(cb.cube_triple_condition(X))


def test_product_of_trees():
    T1 = cb.tree_complex([(0, 1), (1, 2), (1, 3)], name="T1")
    T2 = cb.tree_complex([("a", "b"), ("b", "c")], name="T2")
    P = cb.product_explicit(T1, T2)
    assert P.counts() == {0: 12, 1: 3 * 3 + 4 * 2, 2: 6}
    assert cb.is_locally_cat0(P)
    with pytest.raises(ComplexError):
        cb.tree_complex([(0, 1), (1, 2), (2, 0)])


def test_explicit_complex_validation():
    with pytest.raises(ComplexError):
        ExplicitCubeComplex([0, 1, 2], [(0, 1, 2)])
    with pytest.raises(ComplexError):
        ExplicitCubeComplex([0, 1, 2, 3], [(0, 1), (2, 3)])
    with pytest.raises(ComplexError):
        ExplicitCubeComplex([0, 1], [(0, 5)])


def test_square_boundary_round_trip():
    X = torus()
    cell = X.squares()[0]
    assert cb.square_boundary(cell) == [("a", 1), ("b", 1), ("a", -1), ("b", -1)]
    with pytest.raises(ComplexError):
        bad = cb.SquareComplex()
        bad.add_vertex("u")
        bad.add_vertex("w")
        bad.add_edge("e", "u", "w")
        bad.add_edge("f", "u", "w")
        bad.add_square([("e", 1), ("f", 1), ("e", -1), ("f", -1)])


def factor_segment():
    S = cb.CubeComplex(["0", "1"])
    S.add_edge("s", "0", "1")
    return S


def test_product_complex_and_downward_closure():
    S = factor_segment()
    P = cb.ProductCubeComplex([S, S], lambda t: True)
    M = P.materialize()
    assert M.counts() == {0: 4, 1: 4, 2: 1}
    assert cb.is_locally_cat0(P)
    with pytest.raises(ComplexError):
        # keeps the square but drops one of its corners
        cb.ProductCubeComplex([S, S], lambda t: not all(c.dim == 0 and c.base == "1" for c in t))


def test_text_format_round_trip():
    for X in (torus(), cb.cube_corner_counterexample(), cb.grid_window((0, 0, 0), (1, 1, 2))):
        text = cb.complex_to_text(X)
        Y = cb.complex_from_text(text)
        C = cb.as_cube_complex(X)
        assert Y.counts() == C.counts()
        assert bool(cb.is_locally_cat0(Y)) == bool(cb.is_locally_cat0(X))
        assert cb.complex_to_text(Y).splitlines()[1:] == text.splitlines()[1:]


def test_text_format_errors():
    with pytest.raises(ComplexError, match="line 2"):
        cb.complex_from_text("vertex a\nedge e a b -\n")
    with pytest.raises(ComplexError, match="line 1"):
        cb.complex_from_text("blob\n")


def test_dot_output():
    X = torus()
    assert cb.skeleton_dot(X).startswith('digraph "torus"')
    assert cb.link_dot(cb.vertex_link(X, "o")).count("--") == 4
