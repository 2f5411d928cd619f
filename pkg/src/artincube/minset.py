"""Signed-permutation isometries of the standard cubulation of Z^D.

g(x)_i = s_i * x_{pi(i)} + t_i.  Everything here is exact: translation
lengths come from a per-cycle closed form, hyperplane images are computed
symbolically, and windows are only used to enumerate vertex sets.
"""
from __future__ import annotations

import enum
import itertools
import math
import random
import re
from dataclasses import dataclass, field

import numpy as np

from .median import coordinatewise_median


class WindowTooSmall(ValueError):
    pass


class NotHyperbolic(ValueError):
    pass


@dataclass(frozen=True)
class LatticeIsometry:
    perm: tuple      # 0-based: output coordinate i reads input coordinate perm[i]
    signs: tuple     # +1 / -1
    t: tuple

    def __post_init__(self):
        D = len(self.perm)
        if sorted(self.perm) != list(range(D)) or len(self.signs) != D or len(self.t) != D:
            raise ValueError("not a signed permutation with translation")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @property
    def D(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, D: int) -> "LatticeIsometry":
        return cls(tuple(range(D)), (1,) * D, (0,) * D)

    @classmethod
    def translation(cls, t) -> "LatticeIsometry":
        D = len(t)
        return cls(tuple(range(D)), (1,) * D, tuple(int(a) for a in t))

    @classmethod
    def random(cls, D: int, rng: random.Random, tmax: int = 3) -> "LatticeIsometry":
        perm = list(range(D))
        rng.shuffle(perm)
        return cls(tuple(perm), tuple(rng.choice((1, -1)) for _ in range(D)),
                   tuple(rng.randint(-tmax, tmax) for _ in range(D)))

    def __call__(self, x):
        return tuple(s * x[p] + t for p, s, t in zip(self.perm, self.signs, self.t))

    def apply_array(self, X: np.ndarray) -> np.ndarray:
        return X[:, list(self.perm)] * np.array(self.signs) + np.array(self.t)

    def compose(self, other: "LatticeIsometry") -> "LatticeIsometry":
        """self after other."""
        perm = tuple(other.perm[p] for p in self.perm)
        signs = tuple(s * other.signs[p] for p, s in zip(self.perm, self.signs))
        t = tuple(s * other.t[p] + ti for p, s, ti in zip(self.perm, self.signs, self.t))
        return LatticeIsometry(perm, signs, t)

    __matmul__ = compose

    def inverse(self) -> "LatticeIsometry":
        D = self.D
        perm, signs, t = [0] * D, [0] * D, [0] * D
        for i, (p, s, ti) in enumerate(zip(self.perm, self.signs, self.t)):
            perm[p], signs[p], t[p] = i, s, -s * ti
        return LatticeIsometry(tuple(perm), tuple(signs), tuple(t))

    def power(self, n: int) -> "LatticeIsometry":
        base = self if n >= 0 else self.inverse()
        out = LatticeIsometry.identity(self.D)
        n = abs(n)
        while n:
            if n & 1:
                out = base.compose(out)
            base = base.compose(base)
            n >>= 1
        return out

    def is_translation(self) -> bool:
        return self.perm == tuple(range(self.D)) and all(s == 1 for s in self.signs)

    def cycles(self) -> list[list[int]]:
        seen, out = set(), []
        for i in range(self.D):
            if i in seen:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.perm[j]
            out.append(cyc)
        return out

    def subdivided(self) -> "LatticeIsometry":
        """The same isometry in doubled coordinates (the cubical subdivision)."""
        return LatticeIsometry(self.perm, self.signs, tuple(2 * a for a in self.t))

    def conjugate_by_translation(self, v) -> "LatticeIsometry":
        tau = LatticeIsometry.translation(v)
        return tau.compose(self).compose(tau.inverse())

    def to_text(self) -> str:
        return (f"D={self.D}; sigma=({','.join(str(p + 1) for p in self.perm)}); "
                f"signs=({','.join('+' if s > 0 else '-' for s in self.signs)}); "
                f"t=({','.join(map(str, self.t))})")

    def __str__(self):
        return self.to_text()


_FIELD = re.compile(r"^\s*(D|sigma|signs|t)\s*=\s*(.+?)\s*$")


def parse_isometry(text: str) -> LatticeIsometry:
    """Parse ``D=2; sigma=(2,1); signs=(+,+); t=(1,1)`` (1-based sigma)."""
    fields = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        m = _FIELD.match(part)
        if not m:
            raise ValueError(f"cannot parse isometry field {part.strip()!r}")
        fields[m.group(1)] = m.group(2)
    D = int(fields.get("D", "0"))
    if D == 0:
        # infer the dimension from whichever tuple is given
        D = max((len([x for x in fields[k].strip("() ").split(",") if x.strip()])
                 for k in ("sigma", "signs", "t") if k in fields), default=0)

    def tup(key, default):
        raw = fields.get(key)
        if raw is None:
            return default
        raw = raw.strip()
        if not (raw.startswith("(") and raw.endswith(")")):
            raise ValueError(f"{key} must be parenthesised")
        return [x.strip() for x in raw[1:-1].split(",") if x.strip()]

    sigma = [int(x) - 1 for x in tup("sigma", [str(i + 1) for i in range(D)])]
    signs = [1 if x in ("+", "+1", "1") else -1 if x in ("-", "-1") else None
             for x in tup("signs", ["+"] * D)]
    if None in signs:
        raise ValueError("signs must be + or -")
    t = [int(x) for x in tup("t", ["0"] * D)]
    if D == 0:
        raise ValueError("dimension is missing")
    if not (len(sigma) == len(signs) == len(t) == D):
        raise ValueError("sigma, signs and t must all have length D")
    return LatticeIsometry(tuple(sigma), tuple(signs), tuple(t))


def displacement(g: LatticeIsometry, x) -> int:
    return sum(abs(a - b) for a, b in zip(g(x), x))


# ---------------------------------------------------------- translation length

@dataclass
class TranslationLength:
    delta: int
    certificate: tuple
    per_cycle: list = field(default_factory=list)


def translation_length_1(g: LatticeIsometry, cross_check: bool = True) -> TranslationLength:
    """Exact min over Z^D of d1(x, g x), with a minimising vertex.

    On a cycle i0 -> i1 -> ... of the permutation, g^c acts on x_{i0} as
    x -> S x + T with S the product of signs.  The cycle's minimum is |T|
    when S = +1 and T mod 2 when S = -1.
    """
    x = [0] * g.D
    delta, per = 0, []
    zero = (0,) * g.D
    for cyc in g.cycles():
        c = len(cyc)
        S = math.prod(g.signs[i] for i in cyc)
        T = g.power(c)(zero)[cyc[0]]
        if S == 1:
            best, x0 = abs(T), 0
        else:
            best, x0 = T % 2, T // 2
        # zero out every term but the last by walking the cycle
        x[cyc[0]] = x0
        for j in range(c - 1):
            i = cyc[j]
            x[g.perm[i]] = g.signs[i] * (x[i] - g.t[i])
        delta += best
        per.append((tuple(cyc), S, T, best))
    cert = tuple(x)
    got = displacement(g, cert)
    assert got == delta, f"certificate displacement {got} != closed form {delta}"
    if cross_check:
        R = max([abs(a) for a in g.t] + [1]) + 2
        box = np.array(list(itertools.product(*[range(a - R, a + R + 1) for a in cert])))
        disp = np.abs(g.apply_array(box) - box).sum(axis=1)
        assert disp.min() == delta, "window enumeration found a smaller displacement"
    return TranslationLength(delta, cert, per)


# ------------------------------------------------------------------- windows

@dataclass(frozen=True)
class Window:
    lows: tuple
    highs: tuple

    @classmethod
    def cube(cls, D: int, r: int) -> "Window":
        return cls((-r,) * D, (r,) * D)

    @classmethod
    def around(cls, center, r: int) -> "Window":
        return cls(tuple(c - r for c in center), tuple(c + r for c in center))

    @property
    def D(self) -> int:
        return len(self.lows)

    def sides(self) -> tuple:
        return tuple(h - l + 1 for l, h in zip(self.lows, self.highs))

    def points(self) -> np.ndarray:
        return np.array(list(itertools.product(*[range(l, h + 1) for l, h in zip(self.lows, self.highs)])),
                        dtype=np.int64).reshape(-1, self.D)

    def __contains__(self, x) -> bool:
        return all(l <= a <= h for a, l, h in zip(x, self.lows, self.highs))

    def shifted(self, v) -> "Window":
        return Window(tuple(l + a for l, a in zip(self.lows, v)), tuple(h + a for h, a in zip(self.highs, v)))

    def require(self, extents):
        """Each side must hold the given extent plus a one-cell margin on both ends."""
        for i, (side, e) in enumerate(zip(self.sides(), extents)):
            if side < e + 2:
                raise WindowTooSmall(f"coordinate {i + 1}: side {side} < orbit extent {e} + 2")

    def complex(self):
        from .cubes import grid_window
        return grid_window(self.lows, self.highs)


def min1_set(g: LatticeIsometry, W: Window, delta: int | None = None) -> set:
    if delta is None:
        delta = translation_length_1(g).delta
    P = W.points()
    disp = np.abs(g.apply_array(P) - P).sum(axis=1)
    return {tuple(int(a) for a in p) for p in P[disp == delta]}


# ----------------------------------------------------------------- skewering

class Skew(enum.Enum):
    PLUS = "Skewers+"
    MINUS = "Skewers-"
    PRESERVES = "Preserves"
    NEITHER = "Neither"

    @property
    def skewered(self) -> bool:
        return self in (Skew.PLUS, Skew.MINUS)


@dataclass(frozen=True)
class CoordHyperplane:
    """The hyperplane x_i = k + 1/2; plus side x_i >= k + 1."""
    i: int
    k: int

    def plus(self) -> "HalfSpace":
        return HalfSpace(self.i, self.k + 1, 1)

    def minus(self) -> "HalfSpace":
        return HalfSpace(self.i, self.k, -1)

    def separates(self, x, y) -> bool:
        return (x[self.i] > self.k) != (y[self.i] > self.k)


@dataclass(frozen=True)
class HalfSpace:
    """{x : x_i >= b} if direction = 1, {x : x_i <= b} if direction = -1."""
    i: int
    b: int
    direction: int

    def image(self, g: LatticeIsometry) -> "HalfSpace":
        # x = g^{-1}(y) has x_{perm[m]} = s_m (y_m - t_m); find m with perm[m] = i
        m = g.perm.index(self.i)
        s, t = g.signs[m], g.t[m]
        if s == 1:
            return HalfSpace(m, self.b + t, self.direction)
        return HalfSpace(m, t - self.b, -self.direction)

    def contains(self, other: "HalfSpace") -> bool:
        if other.i != self.i or other.direction != self.direction:
            return False
        return other.b >= self.b if self.direction == 1 else other.b <= self.b


def skewers(g: LatticeIsometry, H: CoordHyperplane) -> Skew:
    P, M = H.plus(), H.minus()
    gP, gM = P.image(g), M.image(g)
    if gP == P or gP == M:
        return Skew.PRESERVES
    if P.contains(gP):
        return Skew.PLUS
    if M.contains(gM):
        return Skew.MINUS
    return Skew.NEITHER


def separating_hyperplanes(x, y) -> list[CoordHyperplane]:
    out = []
    for i, (a, b) in enumerate(zip(x, y)):
        lo, hi = min(a, b), max(a, b)
        out.extend(CoordHyperplane(i, k) for k in range(lo, hi))
    return out


# -------------------------------------------------------------- hyperbolicity

@dataclass
class Hyperbolicity:
    kind: str                 # "Hyperbolic", "Elliptic" or "Undecided"
    delta: int
    witness: tuple | None = None
    lattice: str = "lattice"

    @property
    def hyperbolic(self) -> bool:
        return self.kind == "Hyperbolic"


def additive_witness(g: LatticeIsometry, N: int, radius: int | None = None) -> tuple | None:
    """A vertex x with d1(x, g^n x) = n * delta_g for all 1 <= n <= N, if one is near the minimiser."""
    tl = translation_length_1(g, cross_check=False)
    if radius is None:
        radius = max([abs(a) for a in g.t] + [1]) + 1
    W = Window.around(tl.certificate, radius)
    P = W.points()
    ok = np.ones(len(P), dtype=bool)
    for n in range(1, N + 1):
        gn = g.power(n)
        ok &= np.abs(gn.apply_array(P) - P).sum(axis=1) == n * tl.delta
        if not ok.any():
            return None
    hits = P[ok]
    order = np.lexsort(np.abs(hits - np.array(tl.certificate)).T[::-1])
    return tuple(int(a) for a in hits[order[0]])


def is_hyperbolic_on_lattice(g: LatticeIsometry, N: int | None = None) -> Hyperbolicity:
    """delta_g > 0 and some vertex on which the displacement of g^n is additive."""
    if N is None:
        N = 2 * math.factorial(g.D)
    delta = translation_length_1(g).delta
    if delta == 0:
        return Hyperbolicity("Elliptic", 0, translation_length_1(g).certificate)
    w = additive_witness(g, N)
    return Hyperbolicity("Hyperbolic" if w is not None else "Undecided", delta, w)


def check_hyperbolic_on_subdivision(g: LatticeIsometry, N: int = 6) -> Hyperbolicity:
    """Fixed vertex of the subdivision, or a combinatorial axis there (doubled coordinates)."""
    gs = g.subdivided()
    tl = translation_length_1(gs)
    if tl.delta == 0:
        return Hyperbolicity("Elliptic", 0, tl.certificate, "subdivision")
    w = additive_witness(gs, N)
    return Hyperbolicity("Hyperbolic" if w is not None else "Undecided", tl.delta, w, "subdivision")


# ------------------------------------------------------------------ harnesses

@dataclass
class HarnessReport:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def _require_hyperbolic(g: LatticeIsometry) -> Hyperbolicity:
    hb = is_hyperbolic_on_lattice(g)
    if not hb.hyperbolic:
        raise NotHyperbolic(f"{g} is not combinatorially hyperbolic on the lattice ({hb.kind})")
    return hb


def stable_power(g: LatticeIsometry) -> LatticeIsometry:
    return g.power(math.factorial(g.D))


def orbit_extent(g: LatticeIsometry) -> tuple:
    h = stable_power(g)
    cert = translation_length_1(h, cross_check=False).certificate
    return tuple(abs(a - b) for a, b in zip(h(cert), cert))


def check_skewering(g: LatticeIsometry, W: Window) -> HarnessReport:
    """Every hyperplane separating x from h x is skewered by h = g^{D!}.

    x ranges over Min1(h) and Min1(g) inside the window.
    """
    _require_hyperbolic(g)
    h = stable_power(g)
    W.require(orbit_extent(g))
    rep = HarnessReport("skewering")
    for label, S in (("Min1(g^D!)", min1_set(h, W)), ("Min1(g)", min1_set(g, W))):
        rep.details[label] = len(S)
        if not S:
            continue
        X = np.array(sorted(S), dtype=np.int64)
        HX = h.apply_array(X)
        lo, hi = np.minimum(X, HX), np.maximum(X, HX)
        for i in range(g.D):
            base = int(lo[:, i].min())
            ks = range(base, int(hi[:, i].max()))
            bad = np.array([not skewers(h, CoordHyperplane(i, k)).skewered for k in ks], dtype=np.int64)
            prefix = np.concatenate([[0], np.cumsum(bad)])
            nbad = prefix[hi[:, i] - base] - prefix[lo[:, i] - base]
            rep.checked += int((hi[:, i] - lo[:, i]).sum())
            for r in np.flatnonzero(nbad)[:10]:
                x = tuple(int(a) for a in X[r])
                k = next(k for k in range(lo[r, i], hi[r, i]) if bad[k - base])
                H = CoordHyperplane(i, int(k))
                rep.violations.append((label, x, H, skewers(h, H).value))
    return rep


def skewered_orbit_count(h: LatticeIsometry, span: int = 8) -> int:
    """Number of <h>-orbits of coordinate hyperplanes skewered by h.

    h must act on each coordinate as x -> +x + tau or as a reflection;
    a translating coordinate contributes |tau| orbits, one per residue.
    """
    count = 0
    for i in range(h.D):
        if h.perm[i] != i:
            raise ValueError("power does not fix the coordinate directions")
        tau = h.t[i]
        if h.signs[i] == 1 and tau:
            reps = [CoordHyperplane(i, k) for k in range(abs(tau))]
            assert all(skewers(h, H).skewered for H in reps)
            count += abs(tau)
        else:
            # no skewered hyperplanes in this direction
            assert not any(skewers(h, CoordHyperplane(i, k)).skewered for k in range(-span, span))
    return count


def check_orbit_count(g: LatticeIsometry) -> HarnessReport:
    """Skewered hyperplane orbits of g^{D!} number D! * delta_g."""
    hb = _require_hyperbolic(g)
    h = stable_power(g)
    count = skewered_orbit_count(h)
    cert = translation_length_1(h).certificate
    sep = len(separating_hyperplanes(cert, h(cert)))
    expected = math.factorial(g.D) * hb.delta
    rep = HarnessReport("orbit count", checked=1,
                        details={"orbits": count, "expected": expected, "separating": sep,
                                 "delta": hb.delta})
    if count != expected or sep != count:
        rep.violations.append((count, expected, sep))
    return rep


def median_closure_violations(S: set, triples) -> list:
    bad = []
    for a, b, c in triples:
        m = coordinatewise_median(a, b, c)
        if m not in S:
            bad.append(((a, b, c), m))
    return bad


def _triples(S: set, cap: int, rng: random.Random):
    pts = sorted(S)
    n = len(pts)
    if n < 3:
        return []
    if math.comb(n, 3) <= cap:
        return list(itertools.combinations(pts, 3))
    return [tuple(rng.sample(pts, 3)) for _ in range(cap)]


def check_median_closure(g: LatticeIsometry, W: Window, cap: int = 20000,
                         rng: random.Random | None = None) -> HarnessReport:
    """Min1(g^{D!}) inside a box window is closed under the coordinatewise median."""
    _require_hyperbolic(g)
    rng = rng or random.Random(0)
    h = stable_power(g)
    W.require(orbit_extent(g))
    S = min1_set(h, W)
    triples = _triples(S, cap, rng)
    rep = HarnessReport("median closure", checked=len(triples),
                        details={"points": len(S), "exhaustive": len(triples) == math.comb(len(S), 3)})
    rep.violations = median_closure_violations(S, triples)[:10]
    return rep


def negative_control(W: Window, trials: int = 50, size: int = 5,
                     rng: random.Random | None = None) -> HarnessReport:
    """Random subsets of the window: the closure check must flag some of them."""
    rng = rng or random.Random(0)
    P = [tuple(int(a) for a in p) for p in W.points()]
    flagged = 0
    for _ in range(trials):
        S = set(rng.sample(P, size))
        if median_closure_violations(S, itertools.combinations(sorted(S), 3)):
            flagged += 1
    rep = HarnessReport("negative control", checked=trials, details={"flagged": flagged})
    if flagged == 0:
        rep.violations.append("no random subset was flagged")
    return rep


def sample_hyperbolic(D: int, count: int, rng: random.Random, tmax: int = 3,
                      max_tries: int = 100000) -> list[LatticeIsometry]:
    out = []
    for _ in range(max_tries):
        if len(out) == count:
            break
        g = LatticeIsometry.random(D, rng, tmax)
        if is_hyperbolic_on_lattice(g).hyperbolic:
            out.append(g)
    return out


def harness_window(g: LatticeIsometry, margin: int = 2) -> Window:
    """Smallest centred cube window that passes the sizing rule, plus a margin."""
    ext = orbit_extent(g)
    cert = translation_length_1(stable_power(g), cross_check=False).certificate
    r = (max(ext) + 2) // 2 + margin
    return Window.around(cert, r)
