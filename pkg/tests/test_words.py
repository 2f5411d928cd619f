import itertools
import math

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from artincube import coxeter as cx
from artincube import words as wd
from conftest import matrices

INF = math.inf


def brute_force_classes(M, n):
    """Union-find over all words of length n, joining words one relation apart."""
    gens = M.generators
    words = list(itertools.product(gens, repeat=n))
    uf = nx.utils.UnionFind(words)
    rels = []
    for a, b, p in M.finite_pairs():
        if p <= n:
            rels.append((wd.build_w(p, a, b), wd.build_w(p, b, a)))
    for w in words:
        for lhs, rhs in rels:
            p = len(lhs)
            for i in range(n - p + 1):
                if w[i:i + p] == lhs:
                    uf.union(w, w[:i] + rhs + w[i + p:])
    return uf


@pytest.mark.parametrize("labels", [
    {"ab": 3, "bc": 3, "ac": 2},
    {"ab": 4, "bc": 2},
    {"ab": 3, "ac": 3, "bc": 3},
    {"ab": 5, "bc": 4, "ac": 2},
])
def test_monoid_equal_matches_brute_force(labels):
    M = cx.CoxeterMatrix("abc", {frozenset(k): v for k, v in labels.items()})
    n = 5
    uf = brute_force_classes(M, n)
    words = list(itertools.product(M.generators, repeat=n))
    for u in words[::7]:
        for v in words[::11]:
            want = uf[u] == uf[v]
            got = wd.monoid_equal(u, v, M)
            assert got is (wd.Answer.EQUAL if want else wd.Answer.NOT_EQUAL), (u, v)


def test_monoid_class_matches_brute_force():
    M = cx.braid_matrix(4)
    n = 5
    uf = brute_force_classes(M, n)
    groups = {}
    for w in itertools.product(M.generators, repeat=n):
        groups.setdefault(uf[w], set()).add(w)
    for cls in list(groups.values())[::5]:
        w = next(iter(cls))
        assert wd.monoid_class(M, w) == cls


def test_build_w_and_z():
    assert wd.build_w(4, "a", "b") == ("a", "b", "a", "b")
    assert wd.build_w(1, "a", "b") == ("a",)
    for p in (2, INF):
        with pytest.raises(wd.WordError):
            wd.build_z(cx.dihedral_matrix(p), "a", "b")
    with pytest.raises(wd.WordError):
        wd.build_w(0, "a", "b")
    for p in range(3, 8):
        M = cx.dihedral_matrix(p)
        z = wd.build_z(M, "a", "b")
        assert len(z) == (p if p % 2 == 0 else 2 * p)
        for g in "ab":
            assert wd.commutes_positive(z, (g,), M) is wd.Answer.EQUAL


def test_budget_exceeded_and_env(monkeypatch):
    M = cx.braid_matrix(4)
    u = ("s1", "s2", "s1", "s3", "s2", "s1") * 2
    v = tuple(reversed(u))
    assert wd.monoid_equal(u, v, M, budget=3) is wd.Answer.BUDGET_EXCEEDED
    monkeypatch.setenv(wd.BUDGET_ENV, "2")
    assert wd.default_budget() == 2
    assert wd.monoid_equal(u, v, M) is wd.Answer.BUDGET_EXCEEDED
    monkeypatch.setenv(wd.BUDGET_ENV, "junk")
    with pytest.raises(ValueError):
        wd.default_budget()


def test_documented_examples():
    M2, M3 = cx.dihedral_matrix(2), cx.dihedral_matrix(3)
    assert wd.monoid_equal(("a", "b"), ("b", "a"), M2) is wd.Answer.EQUAL
    assert wd.monoid_equal(("a", "b", "a"), ("b", "a", "b"), M3) is wd.Answer.EQUAL
    assert wd.monoid_equal(("a", "b"), ("b", "a"), M3) is wd.Answer.NOT_EQUAL
    assert wd.monoid_equal(("a",), ("a", "a"), M3) is wd.Answer.NOT_EQUAL
    assert wd.commutes_positive(("a",), ("a",), M3) is wd.Answer.EQUAL


def test_unknown_generator():
    with pytest.raises(wd.WordError):
        wd.monoid_equal(("a", "q"), ("a", "a"), cx.dihedral_matrix(3))


short_words = st.lists(st.sampled_from("abc"), min_size=4, max_size=4).map(tuple)


@given(matrices(min_size=3, max_size=3), short_words, short_words, short_words)
def test_monoid_equal_is_an_equivalence(M, u, v, w):
    eq = lambda x, y: wd.monoid_equal(x, y, M, budget=2000)
    assert eq(u, u) is wd.Answer.EQUAL
    uv, vu = eq(u, v), eq(v, u)
    if wd.Answer.BUDGET_EXCEEDED not in (uv, vu):
        assert uv is vu
    uw, vw = eq(u, w), eq(v, w)
    if uv is wd.Answer.EQUAL and vw is wd.Answer.EQUAL:
        assert uw in (wd.Answer.EQUAL, wd.Answer.BUDGET_EXCEEDED)


@given(matrices(min_size=2, max_size=4), st.data())
def test_valid_projection_respects_relations(M, data):
    keep = data.draw(st.lists(st.sampled_from(M.generators), min_size=1, max_size=2, unique=True))
    proj = wd.even_projection(M, keep)
    if proj.valid:
        assert wd.projection_respects_relations(M, proj)
    else:
        assert proj.offending and all(p % 2 for _, _, p in proj.offending)


def test_projection_rule_exhaustive():
    for M in cx.all_matrices(3, (2, 3, 4, 5, INF)):
        for keep in itertools.chain(itertools.combinations(M.generators, 1),
                                    itertools.combinations(M.generators, 2)):
            proj = wd.even_projection(M, keep)
            assert proj.valid == wd.projection_respects_relations(M, proj)


group_words = st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from((1, -1))), max_size=12).map(tuple)


@given(group_words)
def test_free_reduce_idempotent_and_shrinking(w):
    r = wd.free_reduce(w)
    assert wd.free_reduce(r) == r
    assert len(r) <= len(w)
    assert all(r[i][0] != r[i + 1][0] or r[i][1] == r[i + 1][1] for i in range(len(r) - 1))
    assert wd.free_reduce(w + wd.inv(w)) == ()


@given(group_words)
def test_group_word_text_round_trip(w):
    assert wd.parse_group_word(wd.format_group_word(w)) == tuple(w)


def test_center_noncommutation():
    for labels in ({"ab": 3, "ac": 3, "bc": 3}, {"ab": 3, "ac": 4}):
        M = cx.CoxeterMatrix("abc", {frozenset(k): v for k, v in labels.items()})
        rep = wd.check_center_noncommutation(M, N=1)
        assert rep.cells == {(1, 1): wd.Answer.NOT_EQUAL}


def test_center_noncommutation_hypotheses():
    M = cx.CoxeterMatrix("abc", {frozenset("ab"): 4, frozenset("ac"): 3})
    with pytest.raises(wd.HypothesisError):
        wd.check_center_noncommutation(M)
    with pytest.raises(wd.HypothesisError):
        wd.check_center_noncommutation(cx.dihedral_matrix(3))
    # roles that satisfy the hypotheses in another order
    rep = wd.check_center_noncommutation(M, roles=("a", "c", "b"))
    assert not rep.cells_with(wd.Answer.EQUAL)


def test_center_avoids_product():
    rep = wd.check_center_avoids_product(cx.dihedral_matrix(4), N=2, P=8, Q=8)
    assert len(rep.cells) == 2 * 9 * 9
    assert set(rep.cells.values()) == {wd.Answer.NOT_EQUAL}


def test_center_is_a_product_for_control():
    # z_ab = (ab)^2 for m = 4 equals u^1 with u = abab: the harness must find it
    M = cx.dihedral_matrix(4)
    rep = wd.check_center_avoids_product(M, part_A=[("a", "b", "a", "b")], part_B=[("b",)], N=1, P=2, Q=2)
    assert rep.cells[(1, 1, 0, ("a", "b", "a", "b"), ("b",))] is wd.Answer.EQUAL


def test_center_avoids_product_rejects_invalid_projection():
    M = cx.CoxeterMatrix("abc", {frozenset("ab"): 4, frozenset("bc"): 3})
    with pytest.raises(wd.HypothesisError):
        wd.check_center_avoids_product(M, keep=("a", "b"))


@pytest.mark.parametrize("p", range(2, 9))
def test_cyclic_presentation_collapses(p):
    assert wd.verify_bm_presentation(p) is wd.Equivalence.EQUIVALENT


def test_presentation_text_round_trip():
    P = wd.bm_presentation(4)
    assert wd.Presentation.from_text(P.to_text()) == P
    with pytest.raises(wd.WordError):
        wd.Presentation.from_text("rel a b\n")


def test_conjugate_up_to_inverse():
    r = wd.gword("a", "b", "a-")
    assert wd.conjugate_up_to_inverse(r, wd.gword("b"))
    assert wd.conjugate_up_to_inverse(wd.gword("a", "b", "c"), wd.gword("c-", "b-", "a-"))
    assert not wd.conjugate_up_to_inverse(wd.gword("a", "b"), wd.gword("a", "a"))


@given(matrices(min_size=2, max_size=3), st.lists(st.sampled_from("abc"), min_size=1, max_size=6))
def test_equal_words_have_equal_length(M, u):
    u = tuple(g for g in u if g in M.generators)
    cls = wd.monoid_class(M, u, budget=5000)
    if cls is not None:
        assert all(len(w) == len(u) for w in cls)
        assert all(wd.monoid_equal(u, w, M) is wd.Answer.EQUAL for w in list(cls)[:5])
