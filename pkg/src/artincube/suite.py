"""Acceptance checks shared by the test suite and ``artincube selftest``."""
from __future__ import annotations

import itertools
import random
import time
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable

import networkx as nx

from . import coxeter as cx
from . import constructions as cs
from . import median as md
from . import minset as ms
from . import words as wd
from .cubes import (ExplicitCubeComplex, cube_corner_counterexample, cube_triple_condition,
                    grid_window, is_locally_cat0)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class CriterionResult:
    key: str
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return ok

    def line(self) -> str:
        failed = [c.name for c in self.checks if not c.ok]
        status = "PASS" if self.ok else "FAIL"
        extra = f" error={self.error}" if self.error else (f" failed={failed}" if failed else "")
        return f"{status} {self.key}: {self.title} ({len(self.checks)} checks, {self.seconds:.1f}s){extra}"


# ------------------------------------------------------------------ criteria

def braid_verdicts(res: CriterionResult, full: bool):
    for n in (2, 3):
        v = cx.classify(cx.braid_matrix(n))
        res.add(f"B{n} cubulated", v.cubulated, v.status.value)
    for n in range(4, 9 if full else 6):
        v = cx.classify(cx.braid_matrix(n))
        ok = (not v.cubulated and v.obstruction.kind is cx.ObstructionKind.ODD_TRIPLE
              and tuple(v.obstruction.witness) == ("s1", "s2", "s3"))
        res.add(f"B{n} obstructed by (s1,s2,s3)", ok, str(v.obstruction))


def obstruction_equivalence(res: CriterionResult, full: bool):
    rep = cx.check_obstruction_equivalence(4 if full else 3, (2, 3, 4, 5, cx.INF))
    res.add("zero disagreements", rep.ok,
            f"{rep.checked} matrices, {rep.cubulated} cubulated, {len(rep.counterexamples)} disagreements")


@lru_cache(maxsize=2)
def _positive_sweep(full: bool, seed: int = 2024):
    """Builder outputs paired with their matrices."""
    out: list = []
    pmax = 8 if full else 4
    for p in range(2, pmax + 1):
        out.append((f"X(A({p}))", cs.build_X_Ap(p), cx.dihedral_matrix(p)))
        if p % 2 == 0:
            for which in "ab":
                out.append((f"X_{which}(A({p}))", cs.build_Xa_Ap(p, which), cx.dihedral_matrix(p)))
    for k in range(1, 4):
        for labels in itertools.combinations_with_replacement((2, 4, 6, 8) if full else (4, 6), k):
            M = cx.even_star_matrix(labels)
            out.append((f"star{labels}", cs.build_even_star(M), M))
    rng = random.Random(seed)
    want = 200 if full else 20
    found = 0
    while found < want:
        M = cx.random_block_matrix(rng.randint(2, 5), rng)
        if cx.classify(M).cubulated:
            found += 1
            out.append((f"general#{found}", cs.build_general(M), M))
    return tuple(out)


def gromov_verification(res: CriterionResult, full: bool, sweep=None):
    sweep = sweep if sweep is not None else _positive_sweep(full)
    bad = [name for name, X, _ in sweep if not is_locally_cat0(X)]
    res.add("all builder outputs locally CAT(0)", not bad, f"{len(sweep)} complexes, failures {bad[:5]}")
    census_bad = []
    for name, X, M in sweep:
        if isinstance(X, cs.GeneralComplex):
            c = cs.mixed_square_census(X, M)
            if c["mixed_squares_at_base"] != c["commuting_edge_pairs"]:
                census_bad.append(name)
    res.add("mixed squares match commuting label pairs", not census_bad, str(census_bad[:5]))
    C = cube_corner_counterexample()
    chk = is_locally_cat0(C)
    res.add("3-cube corner rejected at the corner vertex", not chk and chk.vertex == (0, 0, 0),
            f"{chk.reason} at {chk.vertex}")
    tri = cube_triple_condition(C)
    res.add("cube-triple checker agrees on the corner", not tri and tri.vertex == (0, 0, 0))


def pi1_verification(res: CriterionResult, full: bool, sweep=None):
    sweep = sweep if sweep is not None else _positive_sweep(full)
    bad = []
    for name, X, M in sweep:
        r = cs.verify_pi1_is_artin(X, M)
        if not r.ok:
            bad.append((name, r.witness))
    res.add("π₁ verified on the positive sweep", not bad, f"{len(sweep)} complexes, failures {bad[:3]}")
    for p in range(2, 9 if full else 5):
        eq = wd.verify_bm_presentation(p)
        res.add(f"cyclic presentation p={p}", eq is wd.Equivalence.EQUIVALENT, eq.value)


def random_windows(rng: random.Random, count: int) -> list[ExplicitCubeComplex]:
    out = []
    for _ in range(count):
        D = rng.randint(1, 3)
        lows = [rng.randint(-2, 2) for _ in range(D)]
        sides = [rng.randint(1, {1: 8, 2: 5, 3: 3}[D]) for _ in range(D)]
        out.append(grid_window(lows, [l + s for l, s in zip(lows, sides)]))
    return out


def random_median_algebras(rng: random.Random, count: int) -> list[tuple]:
    """Median closures of random point sets in small grids, with the coordinatewise median."""
    out = []
    while len(out) < count:
        D = rng.choice((2, 3))
        side = 4 if D == 2 else 2
        box = list(itertools.product(range(side + 1), repeat=D))
        pts = md.median_closure(rng.sample(box, rng.randint(2, 5)))
        if len(pts) < 2:
            continue
        out.append(md.grid_median_algebra(pts))
    return out


def median_engine(res: CriterionResult, full: bool, seed: int = 7):
    rng = random.Random(seed)
    n_win, n_alg = (50, 20) if full else (10, 5)
    complexes = random_windows(rng, n_win)
    for pts, mu in random_median_algebras(rng, n_alg):
        complexes.append(md.cubulate_median_algebra(pts, mu))
    pairs, triples, probes = (1000, 1000, 500) if full else (200, 200, 100)
    bad = 0
    for _ in range(pairs):
        X = rng.choice(complexes)
        x, y = rng.choice(X.vertices), rng.choice(X.vertices)
        if md.distance_matrix(X)[X.index[x], X.index[y]] != md.separating_count(X, x, y):
            bad += 1
    res.add("d1 equals separating hyperplane count", bad == 0, f"{pairs} pairs, {bad} mismatches")
    bad = 0
    for _ in range(triples):
        X = rng.choice(complexes)
        try:
            md.median(X, *(rng.choice(X.vertices) for _ in range(3)))
        except md.MedianNotUnique:
            bad += 1
    res.add("triple interval intersections are singletons", bad == 0, f"{triples} triples, {bad} failures")
    bad = 0
    for _ in range(probes):
        X = rng.choice(complexes)
        C = md.convex_hull_1(X, rng.sample(X.vertices, min(len(X.vertices), rng.randint(1, 3))))
        x, c = rng.choice(X.vertices), rng.choice(sorted(C))
        try:
            p = md.gate_projection(X, C, x)
            if md.median(X, x, p, c) != p:
                bad += 1
        except md.GateNotUnique:
            bad += 1
    res.add("gate projection median identity", bad == 0, f"{probes} probes, {bad} failures")
    c5 = md.is_metric_median(nx.cycle_graph(5))
    k4 = md.is_metric_median(nx.complete_graph(4))
    res.add("5-cycle rejected with witness", not c5 and len(c5.witness) == 3, str(c5.witness))
    res.add("K4 rejected with witness", not k4 and len(k4.witness) == 3, str(k4.witness))


def minset_lab(res: CriterionResult, full: bool, seed: int = 11):
    g = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,+); t=(1,1)")
    W = ms.Window.cube(2, 5)
    tl = ms.translation_length_1(g)
    pts = {tuple(int(a) for a in p) for p in W.points()}
    res.add("swap-translate example has delta 2", tl.delta == 2, str(tl.delta))
    res.add("its Min1 set is the diagonal strip", ms.min1_set(g, W) == {p for p in pts if abs(p[0] - p[1]) <= 1})
    g2 = ms.parse_isometry("D=2; sigma=(2,1); signs=(+,+); t=(1,2)")
    res.add("Min1 of the square of (y+1, x+2) is everything", ms.min1_set(g2.power(2), W) == pts)
    rng = random.Random(seed)
    per_D = 50 if full else 10
    sample = [g for D in ((2, 3) if full else (2,)) for g in ms.sample_hyperbolic(D, per_D, rng)]
    orbit_bad, skew_bad, med_bad = [], [], []
    for h in sample:
        if not ms.check_orbit_count(h).ok:
            orbit_bad.append(str(h))
        Wh = ms.harness_window(h)
        if not ms.check_skewering(h, Wh).ok:
            skew_bad.append(str(h))
        if not ms.check_median_closure(h, Wh, cap=3000, rng=rng).ok:
            med_bad.append(str(h))
    res.add("orbit count equals D! * delta", not orbit_bad, f"{len(sample)} isometries, failures {orbit_bad[:3]}")
    res.add("separating hyperplanes are skewered", not skew_bad, str(skew_bad[:3]))
    res.add("Min1 of the stable power is median closed", not med_bad, str(med_bad[:3]))
    neg = ms.negative_control(ms.Window.cube(2, 3), rng=rng)
    res.add("negative control fires", neg.ok, f"flagged {neg.details['flagged']} of {neg.checked}")


def word_computations(res: CriterionResult, full: bool):
    for name, labels in (("(3,3,3)", {"ab": 3, "ac": 3, "bc": 3}), ("(3,4,inf)", {"ab": 3, "ac": 4})):
        M = cx.CoxeterMatrix("abc", {frozenset(k): v for k, v in labels.items()})
        rep = wd.check_center_noncommutation(M, N=1)
        ok = not rep.cells_with(wd.Answer.EQUAL)
        res.add(f"central powers never commute {name}", ok,
                f"cells {len(rep.cells)}, budget exceeded {len(rep.budget_exceeded)}")
    M = cx.dihedral_matrix(4)
    rep = wd.check_center_avoids_product(M, N=2, P=8, Q=8)
    res.add("central powers avoid a^p b^q (m=4)", all(v is wd.Answer.NOT_EQUAL for v in rep.cells.values()),
            f"{len(rep.cells)} cells")
    mismatches = 0
    total = 0
    for M in cx.all_matrices(3, (2, 3, 4, 5, cx.INF) if full else (2, 3, 4, cx.INF)):
        for r in (1, 2):
            for keep in itertools.combinations(M.generators, r):
                total += 1
                proj = wd.even_projection(M, keep)
                if proj.valid != wd.projection_respects_relations(M, proj):
                    mismatches += 1
    res.add("projection validity matches the odd-label rule", mismatches == 0,
            f"{total} projections, {mismatches} mismatches")


def median_round_trip(res: CriterionResult, full: bool, seed: int = 5):
    pts, mu = md.grid_median_algebra(md.staircase_points(3))
    X = md.cubulate_median_algebra(pts, mu)
    res.add("staircase strip round trip", _graph_median_matches(X, mu), str(X.counts()))
    rng = random.Random(seed)
    bad = 0
    algs = random_median_algebras(rng, 20 if full else 5)
    for pts, mu in algs:
        if not _graph_median_matches(md.cubulate_median_algebra(pts, mu), mu):
            bad += 1
    res.add("random median subalgebras round trip", bad == 0, f"{len(algs)} algebras, {bad} failures")


def _graph_median_matches(X: ExplicitCubeComplex, mu) -> bool:
    for a, b, c in itertools.combinations_with_replacement(X.vertices, 3):
        if md.median(X, a, b, c) != mu(a, b, c):
            return False
    return True


CRITERIA: list[tuple[str, str, Callable]] = [
    ("braid", "braid group verdicts", braid_verdicts),
    ("equivalence", "condition checker agrees with obstruction finder", obstruction_equivalence),
    ("gromov", "link condition on every construction", gromov_verification),
    ("pi1", "fundamental groups are the Artin groups", pi1_verification),
    ("median", "hyperplane and median engine", median_engine),
    ("minset", "translation lengths, Min1 sets and skewering", minset_lab),
    ("words", "positive monoid computations", word_computations),
    ("roundtrip", "median algebra cubulation round trip", median_round_trip),
]


def run_criterion(key: str, full: bool = True) -> CriterionResult:
    for k, title, fn in CRITERIA:
        if k == key:
            res = CriterionResult(k, title)
            t = time.perf_counter()
            try:
                fn(res, full)
            except Exception as exc:  # reported, not raised: one failing item must not hide others
                res.error = f"{type(exc).__name__}: {exc}"
            res.seconds = time.perf_counter() - t
            return res
    raise KeyError(key)


def run_all(full: bool = True, keys=None) -> list[CriterionResult]:
    return [run_criterion(k, full) for k, _, _ in CRITERIA if keys is None or k in keys]
