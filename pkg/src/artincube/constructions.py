"""Explicit locally CAT(0) cube complexes for cubulable Artin groups, and π₁ checks.

Builders return a :class:`LabeledComplex` (a one- or two-vertex square/cube
complex whose edges carry sets of Artin generators) or, for a general
matrix, a :class:`ProductCubeComplex` cut out of a product of those.  Every
builder records its provenance so that :func:`verify_pi1_is_artin` can run
the matching Tietze elimination.
"""
from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field

from .coxeter import (INF, CoxeterMatrix, Decomposition, classify, decompose,
                      is_even_big)
from .cubes import (CubeComplex, ProductCubeComplex, SquareComplex, standard_cube_cell,
                    union_label)
from .words import (Presentation, conjugate_up_to_inverse, cyclic_reduce, eliminate,
                    eliminate_bm, free_reduce, gword, inv, standard_relator, substitute,
                    support)


class ConstructionError(ValueError):
    pass


@dataclass
class Provenance:
    kind: str                       # bm, xa, xb, star, salvetti, general
    generators: tuple               # Artin generators realised by the complex
    params: dict = field(default_factory=dict)


class LabeledComplex(SquareComplex):
    provenance: Provenance


def _labels(*gens) -> frozenset:
    return frozenset(gens)


# ------------------------------------------------------------------ builders

def build_X_Ap(p: int, a: str = "a", b: str = "b") -> LabeledComplex:
    """Two vertices v, w; edges alpha_1..alpha_p, beta, gamma from v to w; p squares."""
    if not isinstance(p, int) or p < 2:
        raise ConstructionError("X(A(p)) needs a finite p >= 2")
    X = LabeledComplex(name=f"X(A({p}))")
    X.add_vertex("v")
    X.add_vertex("w", {a, b})
    lab = _labels(a, b)
    # beta first so the breadth-first spanning tree is {beta}
    X.add_edge("beta", "v", "w", lab)
    X.add_edge("gamma", "v", "w", lab)
    for i in range(1, p + 1):
        X.add_edge(f"alpha{i}", "v", "w", lab)
    for i in range(1, p + 1):
        j = i % p + 1
        X.add_square([(f"alpha{i}", 1), ("beta", -1), (f"alpha{j}", 1), ("gamma", -1)])
    X.provenance = Provenance("bm", (a, b), {"p": p})
    return X


def build_Xa_Ap(p: int, which: str = "a", a: str = "a", b: str = "b") -> LabeledComplex:
    """One vertex; edges x and the odd (which='a') or even (which='b') a_i; p/2 squares."""
    if not isinstance(p, int) or p < 2 or p % 2:
        raise ConstructionError("X_a / X_b need an even p >= 2")
    if which not in ("a", "b"):
        raise ConstructionError("which must be 'a' or 'b'")
    X = LabeledComplex(name=f"X_{which}(A({p}))")
    X.add_vertex("v")
    first = 1 if which == "a" else 2
    idx = list(range(first, p + 1, 2))
    both = _labels(a, b)
    X.add_edge("x", "v", "v", both)
    for i in idx:
        X.add_edge(f"a{i}", "v", "v", _labels(a if which == "a" else b) if i == first else both)
    for k, i in enumerate(idx):
        j = idx[(k + 1) % len(idx)]
        X.add_square([(f"a{i}", 1), ("x", 1), (f"a{j}", -1), ("x", -1)])
    X.provenance = Provenance("x" + which, (a, b), {"p": p, "which": which})
    return X


def _star_shape(M: CoxeterMatrix) -> tuple[str, list]:
    gens = list(M.generators)
    for center in gens:
        leaves = [g for g in gens if g != center]
        if all(is_even_big(M.m(center, b)) or M.m(center, b) == 2 for b in leaves) and \
                all(M.m(center, b) != INF and M.m(center, b) % 2 == 0 for b in leaves) and \
                all(M.m(x, y) == INF for x, y in itertools.combinations(leaves, 2)):
            return center, leaves
    raise ConstructionError("matrix is not an even star")


def build_even_star(M: CoxeterMatrix, center: str | None = None) -> LabeledComplex:
    """Wedge of the X_a complexes of the pairs (center, leaf) along the center's edge."""
    if center is None:
        center, leaves = _star_shape(M)
    else:
        leaves = [g for g in M.generators if g != center]
        for leaf in leaves:
            m = M.m(center, leaf)
            if m == INF or m % 2:
                raise ConstructionError(f"label {m} between {center} and {leaf} is not even")
        for x, y in itertools.combinations(leaves, 2):
            if M.m(x, y) != INF:
                raise ConstructionError(f"leaves {x}, {y} are joined")
    if not leaves:
        raise ConstructionError("a star needs at least one leaf")
    X = LabeledComplex(name=f"star({center}; {', '.join(leaves)})")
    X.add_vertex("v")
    X.add_edge("e", "v", "v", _labels(center))
    for leaf in leaves:
        p = M.m(center, leaf)
        lab = _labels(center, leaf)
        X.add_edge(f"x.{leaf}", "v", "v", lab)
        names = ["e"] + [f"a{i}.{leaf}" for i in range(3, p, 2)]
        for n in names[1:]:
            X.add_edge(n, "v", "v", lab)
        for k, n in enumerate(names):
            X.add_square([(n, 1), (f"x.{leaf}", 1), (names[(k + 1) % len(names)], -1), (f"x.{leaf}", -1)])
    X.provenance = Provenance("star", (center, *leaves),
                              {"center": center, "leaves": tuple(leaves),
                               "labels": tuple(M.m(center, l) for l in leaves)})
    return X


def build_salvetti(S0, M: CoxeterMatrix) -> LabeledComplex:
    """One vertex, a loop per generator, a |T|-cube per commuting clique T."""
    S0 = [g for g in M.generators if g in set(S0)]
    for s, t in itertools.combinations(S0, 2):
        if M.m(s, t) not in (2, INF):
            raise ConstructionError(f"label {M.m(s, t)} on ({s}, {t}) is not right-angled")
    X = LabeledComplex(name=f"Salvetti({', '.join(S0)})")
    X.add_vertex("o")
    for s in S0:
        X.add_edge(s, "o", "o", _labels(s))
    cliques = [T for r in range(2, len(S0) + 1) for T in itertools.combinations(S0, r)
               if all(M.m(s, t) == 2 for s, t in itertools.combinations(T, 2))]
    for T in cliques:
        X.add_cell(standard_cube_cell(len(T), T))
    X.provenance = Provenance("salvetti", tuple(S0), {})
    return X


class GeneralComplex(ProductCubeComplex):
    provenance: Provenance
    decomposition: Decomposition
    matrix: CoxeterMatrix


def commuting_labels(M: CoxeterMatrix, A: frozenset, B: frozenset) -> bool:
    return all(M.m(s, t) == 2 for s in A for t in B)


def build_general(M: CoxeterMatrix, vertex_labels: bool = True) -> GeneralComplex:
    """Subcomplex of the product of the factor complexes of the decomposition.

    A tuple of factor cells is kept when the labels of any two of its cells
    commute elementwise in M.  With ``vertex_labels`` the labels of cell
    corners count too; this removes duplicate loops at the second vertex of
    a two-vertex factor.  ``vertex_labels=False`` reads labels off edges only.
    """
    verdict = classify(M)
    if not verdict.cubulated:
        raise ConstructionError(f"matrix is not cubulable: {verdict.obstruction}")
    dec = decompose(M, verdict.ordering)
    factors = [build_salvetti(dec.free_part, M)]
    names = ["X0"]
    for a, b, p in dec.odd_pairs:
        factors.append(build_X_Ap(p, a, b))
        names.append(f"X{len(names)}")
    for c, leaves in dec.stars:
        factors.append(build_even_star(M.restrict((c, *leaves)), center=c))
        names.append(f"X{len(names)}")
    label_cache: dict = {}

    def cell_label(i, cell):
        key = (i, id(cell))
        if key not in label_cache:
            X = factors[i]
            if cell.dim == 0:
                lab = X.vertex_labels.get(cell.base, frozenset()) if vertex_labels else frozenset()
            else:
                lab = union_label(X, cell, with_vertices=vertex_labels)
            label_cache[key] = (cell, lab)
        return label_cache[key][1]

    def admissible(t):
        labs = [cell_label(i, c) for i, c in enumerate(t)]
        return all(commuting_labels(M, labs[i], labs[j])
                   for i, j in itertools.combinations(range(len(t)), 2))

    P = GeneralComplex(factors, admissible, name=f"X({' '.join(M.generators)})", factor_names=names)
    P.provenance = Provenance("general", tuple(M.generators), {"vertex_labels": vertex_labels})
    P.decomposition = dec
    P.matrix = M
    return P


def build_auto(M: CoxeterMatrix):
    """The general construction, or the single specific builder when M is one factor."""
    P = build_general(M)
    dec = P.decomposition
    parts = [x for x in dec.parts() if x]
    if len(parts) == 1:
        if dec.free_part:
            return build_salvetti(dec.free_part, M)
        if dec.odd_pairs:
            a, b, p = dec.odd_pairs[0]
            return build_X_Ap(p, a, b)
        c, leaves = dec.stars[0]
        return build_even_star(M.restrict((c, *leaves)), center=c)
    return P


# --------------------------------------------------------------- presentations

def spanning_tree(X: CubeComplex) -> set:
    """Breadth-first spanning tree from the first vertex, edges taken in insertion order."""
    if not X.vertices:
        return set()
    inc: dict = {v: [] for v in X.vertices}
    for e in X.edges.values():
        inc[e.src].append((e.id, e.tgt))
        inc[e.tgt].append((e.id, e.src))
    seen, tree = {X.vertices[0]}, set()
    queue = deque([X.vertices[0]])
    while queue:
        v = queue.popleft()
        for eid, w in inc[v]:
            if w not in seen:
                seen.add(w)
                tree.add(eid)
                queue.append(w)
    if len(seen) != len(X.vertices):
        raise ConstructionError("complex is not connected")
    return tree


def _gen_name(eid) -> str:
    return eid if isinstance(eid, str) else "".join(repr(eid).split())


def boundary_word(X: CubeComplex, cell, drop=frozenset(), rename=None) -> tuple:
    from .cubes import square_boundary
    word = []
    for eid, s in square_boundary(cell):
        if eid in drop:
            continue
        word.append(((rename or _gen_name)(eid), s))
    return free_reduce(word)


def presentation_of(X) -> Presentation:
    """π₁ presentation read off the 2-skeleton.

    For a product complex the edges of the factor trees are collapsed and
    parallel copies of an edge are identified along squares; the result
    lists factor generators, factor relators and the mixed-square
    commutators.  If that reduction is not possible the plain
    spanning-tree presentation of the materialised complex is returned.
    """
    if isinstance(X, ProductCubeComplex):
        red = reduce_product(X)
        if red.ok:
            return red.presentation
        X = X.materialize()
    tree = spanning_tree(X)
    gens = tuple(_gen_name(eid) for eid in X.edges if eid not in tree)
    rels = []
    for c in X.squares():
        w = boundary_word(X, c, drop=tree)
        if w:
            rels.append(w)
    return Presentation(gens, rels)


# ------------------------------------------------------ elimination schemes

class Pi1Status(enum.Enum):
    VERIFIED = "Verified"
    FAILED = "Failed"


@dataclass
class Pi1Result:
    status: Pi1Status
    witness: str = ""
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Pi1Status.VERIFIED


@dataclass
class FactorCheck:
    """Outcome of the elimination for one builder output.

    ``to_artin`` sends complex generators to Artin words and ``from_artin``
    sends Artin generators to words in complex generators.
    """
    ok: bool
    witness: str
    presentation: Presentation
    to_artin: dict
    from_artin: dict


def _same_relators(got, expected) -> bool:
    got = [cyclic_reduce(r) for r in got if cyclic_reduce(r)]
    expected = [cyclic_reduce(r) for r in expected if cyclic_reduce(r)]
    if len(got) != len(expected):
        return False
    used = [False] * len(expected)
    for r in got:
        for k, s in enumerate(expected):
            if not used[k] and conjugate_up_to_inverse(r, s):
                used[k] = True
                break
        else:
            return False
    return True


def _check_bm(X: LabeledComplex) -> FactorCheck:
    p = X.provenance.params["p"]
    a, b = X.provenance.generators
    pres = presentation_of(X)
    names = [f"alpha{i}" for i in range(1, p + 1)]
    expected = [gword(names[i], names[(i + 1) % p], "gamma-") for i in range(p)]
    to_artin = {"gamma": gword(a, b), names[0]: gword(a), names[1]: gword(b)}
    for i in range(2, p):
        to_artin[names[i]] = free_reduce(inv(to_artin[names[i - 1]]) + to_artin["gamma"])
    from_artin = {a: gword(names[0]), b: gword(names[1])}
    if set(pres.generators) != set(names) | {"gamma"} or not _same_relators(pres.relators, expected):
        return FactorCheck(False, "presentation differs from the cyclic a_i a_{i+1} = x form", pres,
                           to_artin, from_artin)
    ordered = Presentation(("gamma",) + tuple(names), expected)
    residual, _ = eliminate_bm(ordered, p, x="gamma", names=names)
    target = substitute(standard_relator(p, "A", "B"), {"A": gword(names[0]), "B": gword(names[1])})
    ok = (set(residual.generators) == {names[0], names[1]} and len(residual.relators) == 1
          and conjugate_up_to_inverse(residual.relators[0], target))
    return FactorCheck(ok, "" if ok else f"residual relator {residual.relators}", pres, to_artin, from_artin)


def _check_xa_family(X: LabeledComplex, pieces: list) -> FactorCheck:
    """Shared scheme for X_a, X_b and stars.

    ``pieces`` lists (chain, x, p, distinguished, other, first_is_a) per
    dihedral factor; chain[0] is the distinguished edge.
    """
    pres = presentation_of(X)
    expected = []
    for chain, x, _, _, _, _ in pieces:
        for k, n in enumerate(chain):
            expected.append(gword(n, x, chain[(k + 1) % len(chain)] + "-", x + "-"))
    to_artin, from_artin = {}, {}
    if not _same_relators(pres.relators, expected):
        return FactorCheck(False, "square relators differ from the construction", pres, to_artin, from_artin)
    cur = Presentation(pres.generators, list(expected))
    tags = [(n, k) for n, (chain, *_) in enumerate(pieces) for k in range(len(chain))]
    for n, (chain, x, *_) in enumerate(pieces):
        # the square of chain[k] solves for chain[k+1] = x^-1 chain[k] x
        for k in range(len(chain) - 1):
            i = tags.index((n, k))
            cur, _ = eliminate(cur, chain[k + 1], i)
            del tags[i]
    residual = {frozenset(support(r)): r for r in cur.relators}
    for chain, x, p, dist, other, first_is_a in pieces:
        r = residual.get(frozenset((chain[0], x)))
        if r is None:
            return FactorCheck(False, f"no residual relator on {chain[0]}, {x}", pres, {}, {})
        d = gword(chain[0])
        # the distinguished edge is one Artin generator; x is the product a b
        if first_is_a:
            images = {dist: d, other: free_reduce(inv(d) + gword(x))}
            a, b = dist, other
            x_img = gword(a, b)
        else:
            images = {dist: d, other: free_reduce(gword(x) + inv(d))}
            a, b = other, dist
            x_img = gword(a, b)
        target = substitute(standard_relator(p, a, b), images)
        if not conjugate_up_to_inverse(r, target):
            return FactorCheck(False, f"residual {r} is not the relation of A({p})", pres, {}, {})
        from_artin.update(images)
        to_artin[chain[0]] = gword(dist)
        to_artin[x] = x_img
        for k in range(1, len(chain)):
            prev = to_artin[chain[k - 1]]
            to_artin[chain[k]] = free_reduce(inv(x_img) + prev + x_img)
    if len(cur.relators) != len(pieces):
        return FactorCheck(False, "extra relators survive the elimination", pres, to_artin, from_artin)
    return FactorCheck(True, "", pres, to_artin, from_artin)


def _check_xa(X: LabeledComplex) -> FactorCheck:
    p, which = X.provenance.params["p"], X.provenance.params["which"]
    a, b = X.provenance.generators
    first = 1 if which == "a" else 2
    chain = [f"a{i}" for i in range(first, p + 1, 2)]
    if which == "a":
        return _check_xa_family(X, [(chain, "x", p, a, b, True)])
    return _check_xa_family(X, [(chain, "x", p, b, a, False)])


def _check_star(X: LabeledComplex) -> FactorCheck:
    c = X.provenance.params["center"]
    pieces = []
    for leaf, p in zip(X.provenance.params["leaves"], X.provenance.params["labels"]):
        chain = ["e"] + [f"a{i}.{leaf}" for i in range(3, p, 2)]
        pieces.append((chain, f"x.{leaf}", p, c, leaf, True))
    return _check_xa_family(X, pieces)


def _check_salvetti(X: LabeledComplex, M: CoxeterMatrix) -> FactorCheck:
    S0 = X.provenance.generators
    pres = presentation_of(X)
    expected = [gword(s, t, s + "-", t + "-") for s, t in itertools.combinations(S0, 2) if M.m(s, t) == 2]
    ok = set(pres.generators) == set(S0) and _same_relators(pres.relators, expected)
    ident = {s: gword(s) for s in S0}
    return FactorCheck(ok, "" if ok else "relators are not the commutators of m = 2 pairs",
                       pres, ident, dict(ident))


def check_factor(X: LabeledComplex, M: CoxeterMatrix | None = None) -> FactorCheck:
    kind = getattr(X, "provenance", None)
    if kind is None:
        raise ConstructionError("complex has no construction provenance")
    kind = kind.kind
    if kind == "bm":
        return _check_bm(X)
    if kind in ("xa", "xb"):
        return _check_xa(X)
    if kind == "star":
        return _check_star(X)
    if kind == "salvetti":
        if M is None:
            raise ConstructionError("Salvetti check needs the matrix")
        return _check_salvetti(X, M)
    raise ConstructionError(f"unknown construction {kind!r}")


def _matrix_matches(X: LabeledComplex, M: CoxeterMatrix) -> str:
    pv = X.provenance
    gens = set(pv.generators)
    if gens != set(M.generators):
        return f"complex realises {sorted(gens)}, matrix has {sorted(M.generators)}"
    if pv.kind in ("bm", "xa", "xb"):
        a, b = pv.generators
        if M.m(a, b) != pv.params["p"]:
            return f"label m({a},{b}) = {M.m(a, b)} but complex built for {pv.params['p']}"
    if pv.kind == "star":
        c = pv.params["center"]
        for leaf, p in zip(pv.params["leaves"], pv.params["labels"]):
            if M.m(c, leaf) != p:
                return f"label m({c},{leaf}) differs"
        for x, y in itertools.combinations(pv.params["leaves"], 2):
            if M.m(x, y) != INF:
                return f"leaves {x}, {y} are joined in the matrix"
    if pv.kind == "salvetti" and not M.is_right_angled():
        return "matrix is not right-angled"
    return ""


# ----------------------------------------------------------- product reduction

@dataclass
class ProductReduction:
    ok: bool
    witness: str = ""
    presentation: Presentation | None = None
    factor_checks: list = field(default_factory=list)
    commutators: set = field(default_factory=set)     # frozensets of two factor generators
    counts: dict = field(default_factory=dict)


def reduce_product(P: ProductCubeComplex, M: CoxeterMatrix | None = None) -> ProductReduction:
    """Collapse factor-tree copies and identify parallel edge copies along squares."""
    X = P.materialize()
    factor_trees = [spanning_tree(F) for F in P.factors]

    def fname(i, eid):
        return f"{P.factor_names[i]}.{_gen_name(eid)}"

    in_Y = {eid for eid in X.edges if eid[1] in factor_trees[eid[0]]}
    # spanning tree of X inside the tree-copy subcomplex Y
    inc: dict = {v: [] for v in X.vertices}
    for eid in in_Y:
        e = X.edges[eid]
        inc[e.src].append((eid, e.tgt))
        inc[e.tgt].append((eid, e.src))
    for v in inc:
        inc[v].sort(key=repr)
    base = X.vertices[0]
    seen, tree = {base}, set()
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for eid, w in inc[v]:
            if w not in seen:
                seen.add(w)
                tree.add(eid)
                queue.append(w)
    if len(seen) != len(X.vertices):
        missing = next(v for v in X.vertices if v not in seen)
        return ProductReduction(False, f"vertex {missing} is not reached through factor-tree copies")
    trivial = set(tree)
    squares = X.squares()
    changed = True
    while changed:
        changed = False
        for c in squares:
            ids = c.edge_ids()
            if ids <= in_Y:
                unknown = ids - trivial
                if len(unknown) == 1:
                    trivial |= unknown
                    changed = True
    if in_Y - trivial:
        eid = min(in_Y - trivial, key=repr)
        return ProductReduction(False, f"tree-copy edge {eid} is not null-homotopic via squares")

    # union parallel copies of the same factor edge across squares with trivial sides
    parent = {eid: eid for eid in X.edges if eid not in trivial}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in squares:
        em = c.edge_map
        for k, other in ((0, 1), (1, 0)):
            side1, side2 = em[(0, other)][0], em[(1 << k, other)][0]
            if side1 in trivial and side2 in trivial:
                e1, e2 = em[(0, k)][0], em[(1 << other, k)][0]
                if e1 in parent and e2 in parent:
                    parent[find(e1)] = find(e2)
    classes: dict = {}
    for eid in parent:
        classes.setdefault((eid[0], eid[1]), set()).add(find(eid))
    for (i, e), roots in classes.items():
        if len(roots) != 1:
            return ProductReduction(False, f"copies of {fname(i, e)} fall into {len(roots)} "
                                           f"distinct π₁ classes")

    def rename(eid):
        return fname(eid[0], eid[1])

    factor_checks = [check_factor(F, M if M is not None else getattr(P, "matrix", None))
                     for F in P.factors]
    factor_rels = []
    for i, fc in enumerate(factor_checks):
        factor_rels += [tuple((f"{P.factor_names[i]}.{g}", e) for g, e in r) for r in fc.presentation.relators]
    commutators: set = set()
    other: list = []
    seen_factor: list = []
    mixed = 0
    for c in squares:
        w = boundary_word(X, c, drop=trivial, rename=rename)
        if not w:
            continue
        fac = {g.split(".", 1)[0] for g, _ in w}
        if len(fac) == 1:
            seen_factor.append(w)
            continue
        mixed += 1
        gens = [g for g, _ in w]
        if len(w) == 4 and gens[0] == gens[2] and gens[1] == gens[3] and gens[0] != gens[1]:
            commutators.add(frozenset((gens[0], gens[1])))
        else:
            other.append(w)
    if other:
        return ProductReduction(False, f"unexpected mixed relator {other[0]}")
    for w in seen_factor:
        if not any(conjugate_up_to_inverse(w, r) for r in factor_rels):
            return ProductReduction(False, f"factor-square relator {w} is not a factor relator")
    gens = []
    for i, fc in enumerate(factor_checks):
        gens += [f"{P.factor_names[i]}.{g}" for g in fc.presentation.generators]
    rels = list(factor_rels)
    for pair in sorted(commutators, key=sorted):
        g, h = sorted(pair)
        rels.append(gword(g, h, g + "-", h + "-"))
    pres = Presentation(tuple(gens), rels)
    return ProductReduction(True, "", pres, factor_checks, commutators,
                            {"mixed_squares": mixed, "tree_copies": len(in_Y),
                             "identified_edges": len(parent)})


def _verify_general(P: GeneralComplex, M: CoxeterMatrix) -> Pi1Result:
    if set(P.provenance.generators) != set(M.generators):
        return Pi1Result(Pi1Status.FAILED, "complex was built for a different generating set")
    dec = decompose(M)
    for a, b, m in M.pairs():
        part = [k for k, S in enumerate(dec.parts()) if a in S or b in S]
        if m not in (2, INF) and len(set(part)) > 1:
            return Pi1Result(Pi1Status.FAILED, f"label {m} on ({a},{b}) crosses factors")
    red = reduce_product(P, M)
    if not red.ok:
        return Pi1Result(Pi1Status.FAILED, red.witness, red.counts)
    for i, fc in enumerate(red.factor_checks):
        if not fc.ok:
            return Pi1Result(Pi1Status.FAILED, f"factor {P.factor_names[i]}: {fc.witness}")
    # factor generator -> Artin support, Artin generator -> factor generators
    artin_support, factor_support = {}, {}
    for i, fc in enumerate(red.factor_checks):
        pre = P.factor_names[i] + "."
        for g, w in fc.to_artin.items():
            artin_support[pre + g] = support(w)
        for s, w in fc.from_artin.items():
            factor_support[s] = {pre + g for g, _ in w}
        for g in fc.presentation.generators:
            if pre + g not in artin_support:
                return Pi1Result(Pi1Status.FAILED, f"generator {pre + g} has no Artin image")
    for pair in red.commutators:
        g, h = sorted(pair)
        for s in artin_support[g]:
            for t in artin_support[h]:
                if M.m(s, t) != 2:
                    return Pi1Result(Pi1Status.FAILED, f"commutator [{g},{h}] forces {s}{t} = {t}{s}")
    needed = 0
    for s, t, m in M.pairs():
        if m != 2 or _same_part(dec, s, t):
            continue
        needed += 1
        for g in factor_support[s]:
            for h in factor_support[t]:
                if frozenset((g, h)) not in red.commutators:
                    return Pi1Result(Pi1Status.FAILED, f"relation {s}{t} = {t}{s} not realised: "
                                                       f"no square for [{g},{h}]")
    details = dict(red.counts)
    details.update({"commutators": len(red.commutators), "commuting_pairs": needed})
    return Pi1Result(Pi1Status.VERIFIED, "", details)


def _same_part(dec: Decomposition, s, t) -> bool:
    return any(s in S and t in S for S in dec.parts())


def mixed_square_census(P: GeneralComplex, M: CoxeterMatrix) -> dict:
    """Mixed squares sitting over the base vertices of the other factors.

    Their number must equal the number of cross-factor edge pairs whose
    labels commute in M, recounted here from the labels alone.
    """
    bases = [F.vertices[0] for F in P.factors]
    squares = 0
    for t in P.cells:
        dims = [c.dim for c in t]
        if sorted(dims)[-2:] != [1, 1] or sum(dims) != 2:
            continue
        if all(c.dim == 1 or c.base == b for c, b in zip(t, bases)):
            squares += 1
    pairs = 0
    for (i, F), (j, G) in itertools.combinations(enumerate(P.factors), 2):
        for e in F.edges.values():
            for f in G.edges.values():
                if commuting_labels(M, e.label, f.label):
                    pairs += 1
    return {"mixed_squares_at_base": squares, "commuting_edge_pairs": pairs}


def verify_pi1_is_artin(X, M: CoxeterMatrix) -> Pi1Result:
    """Check π₁(X) ≅ A(M) along the construction's own elimination scheme."""
    pv = getattr(X, "provenance", None)
    if pv is None:
        raise ConstructionError("unknown construction provenance")
    if pv.kind == "general":
        return _verify_general(X, M)
    bad = _matrix_matches(X, M)
    if bad:
        return Pi1Result(Pi1Status.FAILED, bad)
    fc = check_factor(X, M)
    if not fc.ok:
        return Pi1Result(Pi1Status.FAILED, fc.witness)
    # the two substitutions must be mutually inverse on Artin generators
    for s, w in fc.from_artin.items():
        back = substitute(w, fc.to_artin)
        if back != gword(s):
            return Pi1Result(Pi1Status.FAILED, f"{s} maps back to {back}")
    return Pi1Result(Pi1Status.VERIFIED, "", {"generators": len(fc.presentation.generators),
                                              "relators": len(fc.presentation.relators)})


def build(M: CoxeterMatrix, construction: str = "auto"):
    """Dispatch used by the command line."""
    if construction == "auto":
        return build_auto(M)
    if construction == "general":
        return build_general(M)
    if construction == "salvetti":
        return build_salvetti(M.generators, M)
    if construction == "star":
        return build_even_star(M)
    if construction in ("bm", "xa", "xb"):
        if len(M) != 2:
            raise ConstructionError(f"{construction} needs a two-generator matrix")
        a, b = M.generators
        p = M.m(a, b)
        if p == INF:
            raise ConstructionError("label is infinite")
        if construction == "bm":
            return build_X_Ap(p, a, b)
        return build_Xa_Ap(p, construction[1], a, b)
    raise ConstructionError(f"unknown construction {construction!r}")
