"""Hyperplanes, ℓ¹ geometry and median structure on embedded CAT(0) cube complexes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import networkx as nx
import numpy as np

from .cubes import ExplicitCubeComplex, grid_window


class HyperplaneSelfOsculation(ValueError):
    pass


class MedianNotUnique(ValueError):
    pass


class GateNotUnique(ValueError):
    pass


class MedianAxiomViolation(ValueError):
    def __init__(self, message, witness=()):
        super().__init__(f"{message}: {witness}")
        self.witness = witness


@dataclass(frozen=True)
class Hyperplane:
    edges: frozenset
    minus: frozenset
    plus: frozenset

    def separates(self, x, y) -> bool:
        return (x in self.minus) != (y in self.minus)

    def side(self, x) -> int:
        return 1 if x in self.plus else -1


def _cache(X, key, build):
    store = X.__dict__.setdefault("_median_cache", {})
    if key not in store:
        store[key] = build()
    return store[key]


def distance_matrix(X: ExplicitCubeComplex) -> np.ndarray:
    def build():
        n = len(X.vertices)
        idx = X.index
        D = np.full((n, n), -1, dtype=np.int64)
        for v, lengths in nx.all_pairs_shortest_path_length(X.graph):
            row = D[idx[v]]
            for w, d in lengths.items():
                row[idx[w]] = d
        return D
    return _cache(X, "dist", build)


def hyperplanes(X: ExplicitCubeComplex) -> list[Hyperplane]:
    def build():
        edges = [frozenset(e) for e in X.edges]
        uf = nx.utils.UnionFind(edges)
        for sq in X.squares:
            uf.union(frozenset((sq[0], sq[1])), frozenset((sq[2], sq[3])))
            uf.union(frozenset((sq[0], sq[2])), frozenset((sq[1], sq[3])))
        out = []
        for cls in sorted(uf.to_sets(), key=lambda s: sorted(map(repr, next(iter(s))))):
            cls = frozenset(cls)
            G = X.graph.copy()
            G.remove_edges_from(tuple(e) for e in cls)
            comps = list(nx.connected_components(G))
            if len(comps) != 2:
                raise HyperplaneSelfOsculation(
                    f"removing the class of {sorted(map(repr, next(iter(cls))))} leaves {len(comps)} components")
            a, b = comps
            for e in cls:
                x, y = tuple(e)
                if (x in a) == (y in a):
                    raise HyperplaneSelfOsculation(f"edge {tuple(e)} does not cross its hyperplane")
            first = min(cls, key=lambda e: sorted(map(repr, e)))
            anchor = min(first, key=repr)
            minus, plus = (a, b) if anchor in a else (b, a)
            out.append(Hyperplane(cls, frozenset(minus), frozenset(plus)))
        return out
    return _cache(X, "hyperplanes", build)


def _side_matrix(X) -> np.ndarray:
    """Boolean (hyperplanes x vertices) table: True on the plus side."""
    def build():
        H = hyperplanes(X)
        idx = X.index
        M = np.zeros((len(H), len(X.vertices)), dtype=bool)
        for i, h in enumerate(H):
            for v in h.plus:
                M[i, idx[v]] = True
        return M
    return _cache(X, "sides", build)


def separating_count(X, x, y) -> int:
    S = _side_matrix(X)
    i, j = X.index[x], X.index[y]
    return int(np.count_nonzero(S[:, i] != S[:, j]))


def d1(X: ExplicitCubeComplex, x, y) -> int:
    d = int(distance_matrix(X)[X.index[x], X.index[y]])
    h = separating_count(X, x, y)
    if d != h:
        raise HyperplaneSelfOsculation(f"graph distance {d} != {h} separating hyperplanes for {x}, {y}")
    return d


def _interval_mask(X, i: int, j: int) -> np.ndarray:
    D = distance_matrix(X)
    return D[i] + D[j] == D[i, j]


def interval(X: ExplicitCubeComplex, x, y) -> set:
    idx = X.index
    mask = _interval_mask(X, idx[x], idx[y])
    return {X.vertices[k] for k in np.flatnonzero(mask)}


def median(X: ExplicitCubeComplex, x, y, z):
    idx = X.index
    a, b, c = idx[x], idx[y], idx[z]
    both = _interval_mask(X, a, b) & _interval_mask(X, b, c) & _interval_mask(X, a, c)
    hits = np.flatnonzero(both)
    if len(hits) != 1:
        raise MedianNotUnique(f"triple {x}, {y}, {z} has {len(hits)} common interval points")
    return X.vertices[hits[0]]


def convex_hull_1(X: ExplicitCubeComplex, Y: Iterable) -> set:
    Y = list(Y)
    if not Y:
        raise ValueError("hull of the empty set")
    S = _side_matrix(X)
    idx = X.index
    cols = S[:, [idx[y] for y in Y]]
    keep = np.ones(len(X.vertices), dtype=bool)
    for i in range(S.shape[0]):
        if cols[i].all():
            keep &= S[i]
        elif not cols[i].any():
            keep &= ~S[i]
    hull = {X.vertices[k] for k in np.flatnonzero(keep)}
    closed = interval_closure(X, Y)
    assert hull == closed, "halfspace hull disagrees with interval closure"
    return hull


def interval_closure(X: ExplicitCubeComplex, Y: Iterable) -> set:
    """Smallest superset of Y closed under taking intervals between its points."""
    idx = X.index
    inside = np.zeros(len(X.vertices), dtype=bool)
    for y in Y:
        inside[idx[y]] = True
    D = distance_matrix(X)
    done: set = set()
    while True:
        pts = np.flatnonzero(inside)
        grown = inside.copy()
        for a, b in itertools.combinations(pts, 2):
            if (a, b) in done:
                continue
            done.add((a, b))
            grown |= D[a] + D[b] == D[a, b]
        if (grown == inside).all():
            return {X.vertices[k] for k in pts}
        inside = grown


def is_convex(X: ExplicitCubeComplex, C: Iterable) -> bool:
    C = set(C)
    return interval_closure(X, C) == C


def gate_projection(X: ExplicitCubeComplex, C: Iterable, x):
    C = list(C)
    if not C:
        raise ValueError("gate onto the empty set")
    D = distance_matrix(X)
    idx = X.index
    cols = np.array([idx[c] for c in C])
    dists = D[idx[x], cols]
    best = np.flatnonzero(dists == dists.min())
    if len(best) != 1:
        raise GateNotUnique(f"{len(best)} nearest points of C to {x}")
    p = C[best[0]]
    for c in C:
        if median(X, x, p, c) != p:
            raise GateNotUnique(f"median identity fails for x={x}, gate={p}, c={c}")
    return p


# ------------------------------------------------------------- median graphs

@dataclass
class MedianCheck:
    ok: bool
    witness: tuple = ()
    count: int = 0

    def __bool__(self):
        return self.ok


def _graph_distances(G: nx.Graph) -> tuple[list, np.ndarray]:
    nodes = list(G.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    D = np.full((len(nodes), len(nodes)), -1, dtype=np.int64)
    for v, lengths in nx.all_pairs_shortest_path_length(G):
        for w, d in lengths.items():
            D[idx[v], idx[w]] = d
    return nodes, D


def graph_median_table(G: nx.Graph) -> tuple[list, np.ndarray | MedianCheck]:
    """Table T[i,j,k] of graph medians, or a failing MedianCheck."""
    nodes, D = _graph_distances(G)
    n = len(nodes)
    if n and (D < 0).any():
        return nodes, MedianCheck(False, ("disconnected",))
    T = np.empty((n, n, n), dtype=np.int64)
    inter = [[D[i] + D[j] == D[i, j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            ij = inter[i][j]
            for k in range(j, n):
                hits = np.flatnonzero(ij & inter[j][k] & inter[i][k])
                if len(hits) != 1:
                    return nodes, MedianCheck(False, (nodes[i], nodes[j], nodes[k]), len(hits))
                m = hits[0]
                for a, b, c in set(itertools.permutations((i, j, k))):
                    T[a, b, c] = m
    return nodes, T


def is_metric_median(G: nx.Graph) -> MedianCheck:
    """Every vertex triple has exactly one point in the three pairwise intervals."""
    _, T = graph_median_table(G)
    if isinstance(T, MedianCheck):
        return T
    return MedianCheck(True)


# ------------------------------------------------------- median algebras

def median_table(points: Sequence, mu) -> np.ndarray:
    idx = {p: i for i, p in enumerate(points)}
    n = len(points)
    T = np.empty((n, n, n), dtype=np.int64)
    for i, j, k in itertools.product(range(n), repeat=3):
        v = mu(points[i], points[j], points[k]) if callable(mu) else mu[(points[i], points[j], points[k])]
        if v not in idx:
            raise MedianAxiomViolation("median leaves the point set", (points[i], points[j], points[k]))
        T[i, j, k] = idx[v]
    return T


def check_median_axioms(points: Sequence, T: np.ndarray):
    n = len(points)
    r = np.arange(n)
    for perm in itertools.permutations(range(3)):
        bad = np.argwhere(T != T.transpose(perm))
        if len(bad):
            raise MedianAxiomViolation("not symmetric", tuple(points[i] for i in bad[0]))
    aab = T[r[:, None], r[:, None], r[None, :]]
    bad = np.argwhere(aab != r[:, None])
    if len(bad):
        a, b = bad[0]
        raise MedianAxiomViolation("mu(a,a,b) != a", (points[a], points[b]))
    # mu(a,b,mu(c,d,e)) == mu(mu(a,b,c), mu(a,b,d), e), vectorised over (c, d, e)
    for a in range(n):
        for b in range(n):
            Tab = T[a, b]                       # Tab[x] = mu(a, b, x)
            lhs = Tab[T]                        # [c,d,e] -> mu(a,b,mu(c,d,e))
            rhs = T[Tab[:, None, None], Tab[None, :, None], r[None, None, :]]
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                c, d, e = bad[0]
                raise MedianAxiomViolation("five-point identity fails",
                                           tuple(points[i] for i in (a, b, c, d, e)))


def cubulate_median_algebra(points: Sequence, mu: Callable | dict, name: str = "X(M)",
                            ambient_rank: int | None = None) -> ExplicitCubeComplex:
    """Cube complex with vertex set ``points`` whose ℓ¹ median is ``mu``.

    Edges join a, b whose median interval is {a, b}; cubes are filled
    greedily over neighbour sets.  The result is checked against ``mu``.
    """
    points = list(points)
    n = len(points)
    T = median_table(points, mu)
    check_median_axioms(points, T)
    # c in I(a, b) iff mu(a, c, b) = c
    r = np.arange(n)
    inside = T.transpose(0, 2, 1)[:, :, :] == r[None, None, :]   # inside[a, b, c]
    sizes = inside.sum(axis=2)
    G = nx.Graph()
    G.add_nodes_from(range(n))
    for a, b in zip(*np.nonzero(np.triu(sizes == 2, k=1))):
        G.add_edge(int(a), int(b))
    cubes = [tuple(points[i] for i in e) for e in G.edges]
    cubes += [tuple(points[i] for i in c) for c in _fill_cubes(G)]
    X = ExplicitCubeComplex(points, cubes, name=name)
    if ambient_rank is not None and X.dimension > ambient_rank:
        raise MedianAxiomViolation("cubulation exceeds the ambient rank", (X.dimension, ambient_rank))
    nodes, GT = graph_median_table(X.graph)
    if isinstance(GT, MedianCheck):
        raise MedianAxiomViolation("cubulation is not a median graph", GT.witness)
    pos = [X.index[v] for v in nodes]
    back = np.empty(n, dtype=np.int64)
    back[pos] = np.arange(n)
    # GT is indexed by node order; compare with T in point order
    GTp = np.array(pos)[GT[np.ix_(back, back, back)]]
    if not (GTp == T).all():
        a, b, c = np.argwhere(GTp != T)[0]
        raise MedianAxiomViolation("graph median differs from mu", (points[a], points[b], points[c]))
    return X


def _fill_cubes(G: nx.Graph) -> list[tuple]:
    """All embedded cubes of dimension >= 2 in a graph, grown from corners."""
    found: dict = {}
    adj = {v: set(G[v]) for v in G}
    for v in G:
        nbrs = sorted(adj[v])
        level = {(w,): {0: v, 1: w} for w in nbrs}
        d = 1
        while level:
            nxt = {}
            keys = sorted(level)
            for J in keys:
                for w in nbrs:
                    if w <= J[-1]:
                        continue
                    K = J + (w,)
                    if any(K[:i] + K[i + 1:] not in level for i in range(len(K))):
                        continue
                    corners = _extend_corners(adj, level[J], K, v)
                    if corners is not None:
                        nxt[K] = corners
            d += 1
            for K, corners in nxt.items():
                tup = tuple(corners[m] for m in range(1 << d))
                found.setdefault(frozenset(tup), tup)
            level = nxt
    return list(found.values())


def _extend_corners(adj, base: dict, K: tuple, v) -> dict | None:
    """Corners of the cube at v spanned by neighbours K, extending the cube on K[:-1]."""
    d = len(K)
    top = 1 << (d - 1)
    corners = dict(base)
    corners[top] = K[-1]
    for m in range(1, 1 << (d - 1)):
        mm = m | top
        lower = [corners[mm ^ (1 << j)] for j in range(d) if (mm >> j) & 1]
        cand = set.intersection(*(adj[u] for u in lower))
        cand -= {corners[mm ^ (1 << j) ^ (1 << i)] for j in range(d) for i in range(d)
                 if (mm >> j) & 1 and (mm >> i) & 1 and i != j}
        if len(cand) != 1:
            return None
        corners[mm] = cand.pop()
    if len(set(corners.values())) != 1 << d:
        return None
    return corners


def coordinatewise_median(x, y, z):
    return tuple(sorted(t)[1] for t in zip(x, y, z))


def grid_median_algebra(points: Iterable) -> tuple[list, Callable]:
    """A subset of Z^D with the coordinatewise median (must be closed under it)."""
    pts = sorted(set(map(tuple, points)))
    pset = set(pts)
    for a, b, c in itertools.combinations_with_replacement(pts, 3):
        if coordinatewise_median(a, b, c) not in pset:
            raise MedianAxiomViolation("point set is not median-closed", (a, b, c))
    return pts, coordinatewise_median


def staircase_points(size: int = 3, width: int = 1) -> list:
    return [(x, y) for x in range(size + 1) for y in range(size + 1) if abs(x - y) <= width]


def median_closure(points: Iterable) -> set:
    """Closure of a finite subset of Z^D under the coordinatewise median."""
    S = set(map(tuple, points))
    while True:
        new = {coordinatewise_median(a, b, c) for a, b, c in itertools.combinations(S, 3)} - S
        if not new:
            return S
        S |= new


# ---------------------------------------------------------------- subdivision

def cubical_subdivision(X: ExplicitCubeComplex) -> ExplicitCubeComplex:
    """Split each d-cube into 2^d cubes.

    Integer-tuple vertices become doubled centroids, so the subdivision of a
    grid window is again a grid window; other vertex types become frozensets
    of face corners.
    """
    numeric = all(isinstance(v, tuple) and all(isinstance(t, (int, np.integer)) for t in v)
                  for v in X.vertices)

    def key(face: tuple):
        if numeric:
            k = len(face)
            return tuple(int(2 * s) // k for s in np.sum(np.array(face), axis=0))
        return frozenset(face)

    faces: dict = {}
    for c in [(v,) for v in X.vertices] + list(X.cubes):
        faces[frozenset(c)] = key(c)
    if numeric and len(set(faces.values())) != len(faces):
        numeric = False
        faces = {k: key(tuple(k)) for k in faces}

    new_cubes = []
    for c in X.cubes:
        d = len(c).bit_length() - 1
        for corner in range(1 << d):
            small = []
            for s in range(1 << d):
                face = frozenset(c[(corner & ~s) | t] for t in _submasks(s))
                small.append(faces[face])
            new_cubes.append(tuple(small))
    return ExplicitCubeComplex(list(faces.values()), new_cubes, name=f"sd({X.name})")


def _submasks(s: int):
    t = s
    while True:
        yield t
        if t == 0:
            return
        t = (t - 1) & s


__all__ = [
    "Hyperplane", "HyperplaneSelfOsculation", "MedianNotUnique", "GateNotUnique",
    "MedianAxiomViolation", "MedianCheck", "hyperplanes", "d1", "separating_count",
    "interval", "median", "convex_hull_1", "interval_closure", "is_convex", "gate_projection",
    "is_metric_median", "graph_median_table", "cubulate_median_algebra", "check_median_axioms",
    "median_table", "coordinatewise_median", "grid_median_algebra", "staircase_points",
    "median_closure", "cubical_subdivision", "distance_matrix", "grid_window",
]
