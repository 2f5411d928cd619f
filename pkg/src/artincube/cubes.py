"""Combinatorial cube complexes and Gromov's link condition.

Two representations live here.

``CubeComplex`` is the general one: vertices and directed edges are opaque
ids, and a d-cube is a :class:`Cell` recording, for each corner mask and each
direction whose bit is clear in the mask, which edge runs from that corner in
that direction and whether it is traversed forwards.  Loops, multi-edges and
one-vertex complexes (presentation complexes, Salvetti complexes) are all
fine.  ``SquareComplex`` builds one from square boundary words and
``ProductCubeComplex`` from factors and an admissibility predicate.

``ExplicitCubeComplex`` is the embedded one: cubes are tuples of distinct
vertices indexed by corner mask.  Grid windows, trees and cubulated median
algebras are of this kind, and the hyperplane/median engine runs on them.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import networkx as nx


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    tgt: Hashable
    label: frozenset | None = None


@dataclass(frozen=True)
class Cell:
    """A cube of dimension ``dim``.

    ``emap[(mask, k)] = (edge_id, forward)`` for every mask with bit k clear.
    Vertex cells keep their vertex in ``base``.
    """
    dim: int
    emap: tuple = ()           # sorted tuple of ((mask, k), (eid, fwd)) items
    base: Hashable = None

    @classmethod
    def from_map(cls, dim, emap: dict, base=None) -> "Cell":
        return cls(dim, tuple(sorted(emap.items(), key=lambda kv: (kv[0][1], kv[0][0]))), base)

    @cached_property
    def edge_map(self) -> dict:
        return dict(self.emap)

    def edge_ids(self) -> set:
        return {eid for _, (eid, _) in self.emap}


def _rebuild_mask(mask: int, k: int) -> int:
    """Remove bit k from ``mask`` and close the gap."""
    low = mask & ((1 << k) - 1)
    high = mask >> (k + 1)
    return low | (high << k)


def _insert_bit(mask: int, k: int, b: int) -> int:
    low = mask & ((1 << k) - 1)
    high = mask >> k
    return low | (b << k) | (high << (k + 1))


class CubeComplex:
    """Finite cube complex with possibly non-embedded cubes."""

    def __init__(self, vertices: Iterable = (), edges: Iterable[Edge] = (),
                 cubes: Iterable[Cell] = (), name: str = ""):
        self.name = name
        self.vertices: list = []
        self._vset: set = set()
        self.edges: dict = {}
        self.cubes: list[Cell] = []
        self.vertex_labels: dict = {}
        for v in vertices:
            self.add_vertex(v)
        for e in edges:
            self.add_edge(e.id, e.src, e.tgt, e.label)
        for c in cubes:
            self.add_cell(c)

    # construction -------------------------------------------------------
    def add_vertex(self, v, label=None):
        if v not in self._vset:
            self._vset.add(v)
            self.vertices.append(v)
        if label:
            self.vertex_labels[v] = frozenset(label)
        return v

    def add_edge(self, eid, src, tgt, label=None) -> Edge:
        if eid in self.edges:
            raise ComplexError(f"duplicate edge id {eid!r}")
        for v in (src, tgt):
            if v not in self._vset:
                raise ComplexError(f"edge {eid!r} uses unknown vertex {v!r}")
        e = Edge(eid, src, tgt, None if label is None else frozenset(label))
        self.edges[eid] = e
        return e

    def add_cell(self, cell: Cell) -> Cell:
        if cell.dim < 2:
            raise ComplexError("only cubes of dimension >= 2 are stored as cells")
        self.corners(cell)  # validates chaining
        self.cubes.append(cell)
        return cell

    # geometry of cells --------------------------------------------------
    def corners(self, cell: Cell) -> tuple:
        """Vertices of ``cell`` indexed by corner mask; checks the edges chain up."""
        if cell.dim == 0:
            return (cell.base,)
        em = cell.edge_map
        corners: list = [None] * (1 << cell.dim)
        for (mask, k), (eid, fwd) in em.items():
            if eid not in self.edges:
                raise ComplexError(f"cell uses unknown edge {eid!r}")
            e = self.edges[eid]
            lo, hi = (e.src, e.tgt) if fwd else (e.tgt, e.src)
            for m, v in ((mask, lo), (mask | (1 << k), hi)):
                if corners[m] is None:
                    corners[m] = v
                elif corners[m] != v:
                    raise ComplexError(f"cell edges do not close up at corner {m}")
        if len(em) != cell.dim << (cell.dim - 1):
            raise ComplexError("cell has the wrong number of edges")
        return tuple(corners)

    def edge_cell(self, eid) -> Cell:
        return Cell.from_map(1, {(0, 0): (eid, True)})

    def vertex_cell(self, v) -> Cell:
        return Cell(0, (), v)

    def face(self, cell: Cell, k: int, b: int) -> Cell:
        """Codimension-1 face of ``cell`` where coordinate k equals b."""
        if cell.dim == 1:
            (eid, fwd), = [val for _, val in cell.emap]
            e = self.edges[eid]
            lo, hi = (e.src, e.tgt) if fwd else (e.tgt, e.src)
            return Cell(0, (), hi if b else lo)
        em = {}
        for (mask, j), val in cell.emap:
            if j == k or ((mask >> k) & 1) != b:
                continue
            em[(_rebuild_mask(mask, k), j if j < k else j - 1)] = val
        return Cell.from_map(cell.dim - 1, em)

    def all_cells(self) -> list[Cell]:
        cells = [self.vertex_cell(v) for v in self.vertices]
        cells += [self.edge_cell(eid) for eid in self.edges]
        cells += list(self.cubes)
        return cells

    @property
    def dimension(self) -> int:
        if self.cubes:
            return max(c.dim for c in self.cubes)
        return 1 if self.edges else 0

    def counts(self) -> dict:
        out = {0: len(self.vertices), 1: len(self.edges)}
        for c in self.cubes:
            out[c.dim] = out.get(c.dim, 0) + 1
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in self.counts().items())

    def graph(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        G.add_nodes_from(self.vertices)
        for e in self.edges.values():
            G.add_edge(e.src, e.tgt, key=e.id)
        return G

    def is_connected(self) -> bool:
        return not self.vertices or nx.is_connected(self.graph())

    def squares(self) -> list[Cell]:
        return [c for c in self.cubes if c.dim == 2]

    def cell_key(self, cell: Cell) -> frozenset:
        """Key identifying a cube up to the symmetries of the standard cube."""
        if cell.dim == 0:
            return frozenset([("v", cell.base)])
        return frozenset(cell.edge_ids()) | frozenset([("corners", frozenset(self.corners(cell)))])


def square_cell(boundary: Sequence) -> Cell:
    """Cell for a square with boundary ``[(e1, s1), .., (e4, s4)]`` read from corner 0.

    Corners are visited in mask order 0, 1, 3, 2.
    """
    if len(boundary) != 4:
        raise ComplexError("a square boundary has exactly 4 letters")
    (e1, s1), (e2, s2), (e3, s3), (e4, s4) = boundary
    return Cell.from_map(2, {
        (0, 0): (e1, s1 > 0),
        (1, 1): (e2, s2 > 0),
        (2, 0): (e3, s3 < 0),
        (0, 1): (e4, s4 < 0),
    })


def square_boundary(cell: Cell) -> list:
    em = cell.edge_map
    (e1, f1), (e2, f2), (e3, f3), (e4, f4) = em[(0, 0)], em[(1, 1)], em[(2, 0)], em[(0, 1)]
    return [(e1, 1 if f1 else -1), (e2, 1 if f2 else -1),
            (e3, -1 if f3 else 1), (e4, -1 if f4 else 1)]


class SquareComplex(CubeComplex):
    """Square complex given by boundary words; loops and multi-edges allowed."""

    def add_square(self, boundary: Sequence) -> Cell:
        boundary = [(b, 1) if not isinstance(b, tuple) else b for b in boundary]
        return self.add_cell(square_cell(boundary))


def standard_cube_cell(dim: int, direction_edges: Sequence) -> Cell:
    """Cube all of whose direction-k edges are the single edge ``direction_edges[k]``."""
    em = {}
    for k in range(dim):
        for mask in range(1 << dim):
            if not (mask >> k) & 1:
                em[(mask, k)] = (direction_edges[k], True)
    return Cell.from_map(dim, em)


# ------------------------------------------------------------------ products

def union_label(X: CubeComplex, cell: Cell, with_vertices: bool = True) -> frozenset:
    """Labels of the edges of a cell, plus the labels of its corners if asked."""
    out = set()
    for eid in cell.edge_ids():
        lab = X.edges[eid].label
        if lab:
            out |= lab
    if with_vertices:
        for v in X.corners(cell):
            out |= X.vertex_labels.get(v, frozenset())
    return frozenset(out)


class ProductCubeComplex:
    """Subcomplex of a product of cube complexes cut out by an admissibility predicate.

    ``admissible`` receives the tuple of factor cells.  It is checked to be
    downward closed at construction time.
    """

    def __init__(self, factors: Sequence[CubeComplex], admissible: Callable[[tuple], bool],
                 name: str = "", factor_names: Sequence[str] | None = None):
        self.factors = list(factors)
        self.admissible = admissible
        self.name = name
        self.factor_names = list(factor_names or [f"X{i}" for i in range(len(self.factors))])
        self.factor_cells = [X.all_cells() for X in self.factors]
        self.cells = [t for t in itertools.product(*self.factor_cells) if admissible(t)]
        self.check_downward_closed()

    def check_downward_closed(self):
        admissible = set(map(self._key, self.cells))
        for t in self.cells:
            for i, (X, c) in enumerate(zip(self.factors, t)):
                for k in range(c.dim):
                    for b in (0, 1):
                        f = t[:i] + (X.face(c, k, b),) + t[i + 1:]
                        if self._key(f) not in admissible:
                            raise ComplexError(f"admissibility is not downward closed at {t}")

    def _key(self, t: tuple) -> tuple:
        return tuple(X.cell_key(c) for X, c in zip(self.factors, t))

    def materialize(self) -> CubeComplex:
        if getattr(self, "_materialized", None) is None:
            self._materialized = self._materialize()
        return self._materialized

    def _materialize(self) -> CubeComplex:
        """The product subcomplex as an ordinary :class:`CubeComplex`.

        Vertices are tuples of factor vertices; an edge id is
        ``(i, factor_edge_id, vertex_tuple_with_None_at_i)``.
        """
        out = CubeComplex(name=self.name)
        corners_of = [{} for _ in self.factors]

        def factor_corners(i, c):
            key = id(c)
            if key not in corners_of[i]:
                corners_of[i][key] = self.factors[i].corners(c)
            return corners_of[i][key]

        for t in self.cells:
            if sum(c.dim for c in t) == 0:
                v = tuple(c.base for c in t)
                lab = set()
                for X, c in zip(self.factors, t):
                    lab |= X.vertex_labels.get(c.base, frozenset())
                out.add_vertex(v, lab)
        for t in self.cells:
            dims = [c.dim for c in t]
            if sum(dims) != 1:
                continue
            i = dims.index(1)
            (eid, _), = [val for _, val in t[i].emap]
            e = self.factors[i].edges[eid]
            others = tuple(None if j == i else c.base for j, c in enumerate(t))
            src = tuple(e.src if j == i else c.base for j, c in enumerate(t))
            tgt = tuple(e.tgt if j == i else c.base for j, c in enumerate(t))
            out.add_edge((i, eid, others), src, tgt, e.label)
        for t in self.cells:
            dims = [c.dim for c in t]
            d = sum(dims)
            if d < 2:
                continue
            offs = list(itertools.accumulate([0] + dims[:-1]))
            em = {}
            for mask in range(1 << d):
                sub = [(mask >> offs[i]) & ((1 << dims[i]) - 1) for i in range(len(t))]
                for i, c in enumerate(t):
                    for kk in range(dims[i]):
                        if (sub[i] >> kk) & 1:
                            continue
                        eid, fwd = c.edge_map[(sub[i], kk)]
                        others = tuple(None if j == i else factor_corners(j, cj)[sub[j]]
                                       for j, cj in enumerate(t))
                        em[(mask, offs[i] + kk)] = ((i, eid, others), fwd)
            out.add_cell(Cell.from_map(d, em))
        return out


# --------------------------------------------------------------------- links

@dataclass
class VertexLink:
    vertex: Hashable
    points: list                 # (edge_id, 'src' | 'tgt')
    simplices: list              # one frozenset per cube corner at the vertex
    sources: list = field(default_factory=list)   # (cube index, corner mask) per simplex

    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.points)
        for s in self.simplices:
            for x, y in itertools.combinations(s, 2):
                G.add_edge(x, y)
        return G

    def edge_list(self) -> list:
        return [s for s in self.simplices if len(s) == 2]


def _corner_end(fwd: bool, at_start: bool) -> str:
    if at_start:
        return "src" if fwd else "tgt"
    return "tgt" if fwd else "src"


def link_simplex(cell: Cell, mask: int) -> list:
    """Link points of ``cell`` at the corner ``mask`` (with repetitions, if any)."""
    em = cell.edge_map
    pts = []
    for k in range(cell.dim):
        bit = 1 << k
        if mask & bit:
            eid, fwd = em[(mask ^ bit, k)]
            pts.append((eid, _corner_end(fwd, at_start=False)))
        else:
            eid, fwd = em[(mask, k)]
            pts.append((eid, _corner_end(fwd, at_start=True)))
    return pts


def vertex_link(X, v) -> VertexLink:
    X = as_cube_complex(X)
    if v not in X._vset:
        raise ComplexError(f"unknown vertex {v!r}")
    points = []
    for e in X.edges.values():
        if e.src == v:
            points.append((e.id, "src"))
        if e.tgt == v:
            points.append((e.id, "tgt"))
    simplices, sources = [], []
    for ci, cell in enumerate(X.cubes):
        for mask, corner in enumerate(X.corners(cell)):
            if corner == v:
                simplices.append(link_simplex(cell, mask))
                sources.append((ci, mask))
    return VertexLink(v, points, simplices, sources)


@dataclass
class LinkCheck:
    ok: bool
    vertex: Hashable = None
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def check_link(link: VertexLink) -> LinkCheck:
    """Simplicial + flag test for one vertex link."""
    v = link.vertex
    seen: dict = {}
    sets = []
    for pts, src in zip(link.simplices, link.sources):
        s = frozenset(pts)
        if len(s) != len(pts):
            return LinkCheck(False, v, "corner of a cube meets the same edge end twice", (src, tuple(pts)))
        if s in seen:
            return LinkCheck(False, v, "two cubes span the same link simplex", (seen[s], src, tuple(sorted(s, key=repr))))
        seen[s] = src
        sets.append(s)
    simplex_set = set(sets) | {frozenset([p]) for p in link.points}
    for s in sets:
        if len(s) > 2:
            for x in s:
                if s - {x} not in simplex_set:
                    return LinkCheck(False, v, "missing face", (tuple(sorted(s - {x}, key=repr)),))
    G = link.graph()
    for clique in nx.find_cliques(G):
        if len(clique) >= 3 and frozenset(clique) not in simplex_set:
            return LinkCheck(False, v, "empty simplex (clique not spanned by a cube)",
                             tuple(sorted(clique, key=repr)))
    return LinkCheck(True, v)


def is_locally_cat0(X) -> LinkCheck:
    """Gromov's criterion: every vertex link is a flag simplicial complex."""
    if isinstance(X, ProductCubeComplex):
        X.check_downward_closed()
    X = as_cube_complex(X)
    for v in X.vertices:
        res = check_link(vertex_link(X, v))
        if not res:
            return res
    return LinkCheck(True)


# ------------------------------------------------------------- explicit cubes

def cube_faces(corners: tuple) -> list[tuple]:
    """All codimension-1 faces of an embedded cube given by its corner tuple."""
    d = len(corners).bit_length() - 1
    out = []
    for k in range(d):
        for b in (0, 1):
            out.append(tuple(corners[_insert_bit(m, k, b)] for m in range(1 << (d - 1))))
    return out


def all_faces(corners: tuple) -> set:
    todo, seen = [tuple(corners)], set()
    while todo:
        c = todo.pop()
        key = frozenset(c)
        if key in seen:
            continue
        seen.add(key)
        if len(c) > 1:
            todo.extend(cube_faces(c))
    return seen


class ExplicitCubeComplex:
    """Cube complex whose cubes are embedded: tuples of distinct vertices.

    Every face of every given cube is added automatically; the 1-skeleton
    must be connected.
    """

    def __init__(self, vertices: Iterable, cubes: Iterable[tuple], name: str = "",
                 check_connected: bool = True):
        self.name = name
        self.vertices = list(dict.fromkeys(vertices))
        vset = set(self.vertices)
        by_key: dict = {}
        todo = [tuple(c) for c in cubes]
        while todo:
            c = todo.pop()
            n = len(c)
            if n & (n - 1) or len(set(c)) != n:
                raise ComplexError(f"not an embedded cube: {c}")
            key = frozenset(c)
            if key in by_key:
                continue
            for v in c:
                if v not in vset:
                    raise ComplexError(f"cube uses unknown vertex {v!r}")
            by_key[key] = c
            if n > 2:
                todo.extend(cube_faces(c))
        for v in self.vertices:
            by_key.setdefault(frozenset([v]), (v,))
        self._by_key = by_key
        self.cubes = sorted((c for c in by_key.values() if len(c) > 1),
                            key=lambda c: (len(c), repr(c)))
        if check_connected and self.vertices and not nx.is_connected(self.graph):
            raise ComplexError("1-skeleton is not connected")

    @classmethod
    def from_graph_and_cubes(cls, G: nx.Graph, cubes=(), name=""):
        return cls(G.nodes, [tuple(e) for e in G.edges] + list(cubes), name)

    def cubes_of_dim(self, d: int) -> list:
        return [c for c in self.cubes if len(c) == 1 << d]

    @property
    def edges(self) -> list:
        return self.cubes_of_dim(1)

    @property
    def squares(self) -> list:
        return self.cubes_of_dim(2)

    @property
    def dimension(self) -> int:
        return max((len(c).bit_length() - 1 for c in self.cubes), default=0)

    def has_cube(self, vertex_set) -> bool:
        return frozenset(vertex_set) in self._by_key

    @cached_property
    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.vertices)
        G.add_edges_from(self.edges)
        return G

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def counts(self) -> dict:
        out = {0: len(self.vertices)}
        for c in self.cubes:
            d = len(c).bit_length() - 1
            out[d] = out.get(d, 0) + 1
        return out

    def to_cube_complex(self) -> CubeComplex:
        X = CubeComplex(self.vertices, name=self.name)
        eid_of = {}
        for a, b in self.edges:
            eid = (a, b)
            X.add_edge(eid, a, b)
            eid_of[frozenset((a, b))] = (eid, a)
        for c in self.cubes:
            d = len(c).bit_length() - 1
            if d < 2:
                continue
            em = {}
            for k in range(d):
                for m in range(1 << d):
                    if not (m >> k) & 1:
                        lo, hi = c[m], c[m | (1 << k)]
                        eid, start = eid_of[frozenset((lo, hi))]
                        em[(m, k)] = (eid, start == lo)
            X.add_cell(Cell.from_map(d, em))
        return X


def as_cube_complex(X) -> CubeComplex:
    if isinstance(X, CubeComplex):
        return X
    if isinstance(X, ExplicitCubeComplex):
        return X.to_cube_complex()
    if isinstance(X, ProductCubeComplex):
        return X.materialize()
    raise TypeError(f"not a cube complex: {type(X).__name__}")


def cube_triple_condition(X: ExplicitCubeComplex) -> LinkCheck:
    """Gromov's condition read literally, for embedded complexes.

    Any three d-cubes (d >= 2) pairwise meeting in (d-1)-faces and jointly in
    a (d-2)-face must be codimension-1 faces of a common (d+1)-cube.
    """
    for d in range(2, X.dimension + 2):
        cubes = [frozenset(c) for c in X.cubes_of_dim(d)]
        if len(cubes) < 3:
            continue
        by_face = defaultdict(list)
        for q in cubes:
            for f in all_faces(X._by_key[q]):
                if len(f) == 1 << (d - 2):
                    by_face[f].append(q)
        half = 1 << (d - 1)
        for f, qs in by_face.items():
            for q1, q2, q3 in itertools.combinations(qs, 3):
                if len(q1 & q2) != half or len(q1 & q3) != half or len(q2 & q3) != half:
                    continue
                if q1 & q2 & q3 != f:
                    continue
                if not (q1 | q2 | q3) <= _span(X, q1 | q2 | q3, d + 1):
                    where = min(f, key=repr) if d == 2 else tuple(sorted(f, key=repr))
                    return LinkCheck(False, where, "three cubes not spanning a cube",
                                     tuple(tuple(sorted(q, key=repr)) for q in (q1, q2, q3)))
    return LinkCheck(True)


def _span(X: ExplicitCubeComplex, vs: frozenset, d: int) -> frozenset:
    for c in X.cubes_of_dim(d):
        s = frozenset(c)
        if vs <= s:
            return s
    return frozenset()


# ---------------------------------------------------------- standard examples

def grid_window(lows: Sequence[int], highs: Sequence[int]) -> ExplicitCubeComplex:
    """The standard cubulation of the box prod [lo_i, hi_i] in Z^D."""
    D = len(lows)
    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    verts = list(itertools.product(*ranges))
    cubes = []
    for v in verts:
        free = [k for k in range(D) if v[k] < highs[k]]
        if not free:
            continue
        corners = []
        for m in range(1 << len(free)):
            w = list(v)
            for j, k in enumerate(free):
                w[k] += (m >> j) & 1
            corners.append(tuple(w))
        cubes.append(tuple(corners))
    return ExplicitCubeComplex(verts, cubes, name=f"grid{tuple(lows)}-{tuple(highs)}")


def tree_complex(edges: Iterable[tuple], name: str = "tree") -> ExplicitCubeComplex:
    G = nx.Graph(list(edges))
    if not nx.is_tree(G):
        raise ComplexError("edges do not form a tree")
    return ExplicitCubeComplex(G.nodes, [tuple(e) for e in G.edges], name=name)


def product_explicit(X: ExplicitCubeComplex, Y: ExplicitCubeComplex) -> ExplicitCubeComplex:
    verts = [(x, y) for x in X.vertices for y in Y.vertices]
    cubes = []
    xs = [(x,) for x in X.vertices] + list(X.cubes)
    ys = [(y,) for y in Y.vertices] + list(Y.cubes)
    for a in xs:
        for b in ys:
            if len(a) * len(b) < 2:
                continue
            da = len(a).bit_length() - 1
            cubes.append(tuple((a[m & ((1 << da) - 1)], b[m >> da]) for m in range(len(a) * len(b))))
    return ExplicitCubeComplex(verts, cubes, name=f"{X.name}x{Y.name}")


def cube_corner_counterexample() -> ExplicitCubeComplex:
    """The three squares of a 3-cube meeting at the origin, with no 3-cube filled."""
    o = (0, 0, 0)
    verts = [v for v in itertools.product((0, 1), repeat=3) if v != (1, 1, 1)]
    sq = []
    for k in range(3):
        a, b = [j for j in range(3) if j != k]
        corners = []
        for m in range(4):
            w = [0, 0, 0]
            w[a] = m & 1
            w[b] = (m >> 1) & 1
            corners.append(tuple(w))
        sq.append(tuple(corners))
    assert all(s[0] == o for s in sq)
    return ExplicitCubeComplex(verts, sq, name="cube-corner")


# ------------------------------------------------------------- serialization

def _tok(x) -> str:
    s = x if isinstance(x, str) else repr(x)
    return "".join(s.split())


def complex_to_text(X) -> str:
    """Line-oriented text: vertices, labelled directed edges, squares, higher cubes."""
    X = as_cube_complex(X)
    lines = [f"# cube complex {X.name}".rstrip()]
    for v in X.vertices:
        lab = X.vertex_labels.get(v)
        lines.append(f"vertex {_tok(v)}" + (f" {','.join(sorted(lab))}" if lab else ""))
    for e in X.edges.values():
        lab = ",".join(sorted(e.label)) if e.label else "-"
        lines.append(f"edge {_tok(e.id)} {_tok(e.src)} {_tok(e.tgt)} {lab}")

    def letter(eid, fwd):
        return _tok(eid) + ("" if fwd else "^-1")

    for c in X.cubes:
        if c.dim == 2:
            lines.append("square " + " ".join(letter(eid, s > 0) for eid, s in square_boundary(c)))
        else:
            lines.append(f"cube {c.dim} " + " ".join(letter(eid, fwd) for _, (eid, fwd) in c.emap))
    return "\n".join(lines) + "\n"


def complex_from_text(text: str) -> CubeComplex:
    X = CubeComplex()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("# cube complex"):
            X.name = raw[len("# cube complex"):].strip()
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "vertex":
                X.add_vertex(rest[0], rest[1].split(",") if len(rest) > 1 else None)
            elif head == "edge":
                eid, src, tgt = rest[:3]
                lab = rest[3] if len(rest) > 3 else "-"
                X.add_edge(eid, src, tgt, None if lab == "-" else lab.split(","))
            elif head == "square":
                X.add_cell(square_cell([_letter(t) for t in rest]))
            elif head == "cube":
                d = int(rest[0])
                letters = [_letter(t) for t in rest[1:]]
                keys = sorted(((m, k) for k in range(d) for m in range(1 << d) if not (m >> k) & 1),
                              key=lambda mk: (mk[1], mk[0]))
                if len(letters) != len(keys):
                    raise ComplexError(f"cube of dimension {d} needs {len(keys)} edges")
                X.add_cell(Cell.from_map(d, {key: (eid, s > 0) for key, (eid, s) in zip(keys, letters)}))
            else:
                raise ComplexError(f"unknown record {head!r}")
        except (ComplexError, IndexError, ValueError) as exc:
            raise ComplexError(f"line {lineno}: {exc}") from None
    return X


def _letter(tok: str) -> tuple:
    if tok.endswith("^-1"):
        return tok[:-3], -1
    return tok, 1


def skeleton_dot(X) -> str:
    X = as_cube_complex(X)
    out = [f'digraph "{X.name or "complex"}" {{']
    for v in X.vertices:
        out.append(f'  "{_tok(v)}";')
    for e in X.edges.values():
        lab = ",".join(sorted(e.label)) if e.label else _tok(e.id)
        out.append(f'  "{_tok(e.src)}" -> "{_tok(e.tgt)}" [label="{lab}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def link_dot(link: VertexLink) -> str:
    def name(p):
        return f"{_tok(p[0])}:{p[1]}"

    out = [f'graph "link({_tok(link.vertex)})" {{']
    for p in link.points:
        out.append(f'  "{name(p)}";')
    for s in link.simplices:
        if len(s) == 2:
            x, y = s
            out.append(f'  "{name(x)}" -- "{name(y)}";')
    out.append("}")
    return "\n".join(out) + "\n"
