"""Words in Artin groups and their positive monoids.

Positive words are tuples of generator names.  Group words are tuples of
``(name, sign)`` letters.  Equality in the positive monoid is decided by a
breadth-first search over braid-relation rewrites; these rewrites preserve
length, so the class of a word is finite and exhausting it is exact.
"""
from __future__ import annotations

import enum
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coxeter import INF, CoxeterMatrix, dihedral_matrix, is_odd

DEFAULT_BUDGET = 5_000_000
BUDGET_ENV = "ARTINCUBE_BFS_BUDGET"


def default_budget() -> int:
    value = os.environ.get(BUDGET_ENV)
    if value is None:
        return DEFAULT_BUDGET
    budget = int(value)
    if budget < 1:
        raise ValueError(f"{BUDGET_ENV} must be >= 1")
    return budget


class WordError(ValueError):
    pass


# ----------------------------------------------------------------- builders

def build_w(p: int, a, b) -> tuple:
    """Alternating word a b a ... of length p."""
    if p < 1:
        raise WordError(f"length must be >= 1, got {p}")
    if a == b:
        raise WordError("alternating word needs two distinct letters")
    return tuple(a if i % 2 == 0 else b for i in range(p))


def central_length(p: int) -> int:
    return 2 * p if p % 2 else p


def build_z(M: CoxeterMatrix, a, b) -> tuple:
    """Positive word for the generator of the center of the dihedral subgroup <a, b>."""
    p = M.m(a, b)
    if p == INF or p == 2:
        raise WordError(f"z_{a}{b} needs a finite label other than 2 (got {p})")
    return build_w(central_length(p), a, b)


def power(word: Sequence, n: int) -> tuple:
    return tuple(word) * n


def parse_positive(text: str) -> tuple:
    return tuple(text.split())


def format_positive(word: Sequence) -> str:
    return " ".join(word) if word else "1"


# ------------------------------------------------------------ monoid solver

class Answer(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    BUDGET_EXCEEDED = "BudgetExceeded"

    @property
    def yes(self) -> bool:
        return self is Answer.EQUAL


class _Rewriter:
    """Byte-encoded words and the braid relations of a matrix."""

    def __init__(self, M: CoxeterMatrix):
        self.M = M
        if len(M) > 255:
            raise WordError("too many generators for the byte encoding")
        self.code = {g: i for i, g in enumerate(M.generators)}
        n = len(M)
        self.rel: list[list] = [[None] * n for _ in range(n)]
        for a, b, p in M.finite_pairs():
            i, j = self.code[a], self.code[b]
            self.rel[i][j] = (p, bytes(build_w(p, i, j)), bytes(build_w(p, j, i)))
            self.rel[j][i] = (p, bytes(build_w(p, j, i)), bytes(build_w(p, i, j)))

    def encode(self, word: Sequence) -> bytes:
        try:
            return bytes(self.code[g] for g in word)
        except KeyError as exc:
            raise WordError(f"unknown generator {exc.args[0]!r}") from None

    def decode(self, word: bytes) -> tuple:
        return tuple(self.M.generators[i] for i in word)

    def neighbours(self, w: bytes):
        n = len(w)
        rel = self.rel
        for i in range(n - 1):
            s, t = w[i], w[i + 1]
            if s == t:
                continue
            r = rel[s][t]
            if r is None:
                continue
            p, lhs, rhs = r
            if i + p <= n and w[i:i + p] == lhs:
                yield w[:i] + rhs + w[i + p:]


@dataclass
class SearchStats:
    visited: int = 0
    exhausted: bool = False


def monoid_class(M: CoxeterMatrix, u: Sequence, budget: int | None = None) -> set | None:
    """All positive words equal to ``u`` in the monoid, or None past the budget."""
    budget = default_budget() if budget is None else budget
    rw = _Rewriter(M)
    start = rw.encode(u)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for nxt in rw.neighbours(w):
            if nxt not in seen:
                assert len(nxt) == len(start)
                seen.add(nxt)
                if len(seen) > budget:
                    return None
                queue.append(nxt)
    return {rw.decode(w) for w in seen}


def monoid_equal(u: Sequence, v: Sequence, M: CoxeterMatrix, budget: int | None = None,
                 stats: SearchStats | None = None) -> Answer:
    budget = default_budget() if budget is None else budget
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rw = _Rewriter(M)
    src, dst = rw.encode(u), rw.encode(v)
    if len(src) != len(dst):
        return Answer.NOT_EQUAL
    if sorted(src) != sorted(dst) and not _letter_counts_can_change(M):
        return Answer.NOT_EQUAL
    if src == dst:
        return Answer.EQUAL
    seen = {src}
    queue = deque([src])
    while queue:
        w = queue.popleft()
        for nxt in rw.neighbours(w):
            if nxt in seen:
                continue
            assert len(nxt) == len(src)
            if nxt == dst:
                if stats is not None:
                    stats.visited = len(seen) + 1
                return Answer.EQUAL
            seen.add(nxt)
            if len(seen) >= budget:
                if stats is not None:
                    stats.visited = len(seen)
                return Answer.BUDGET_EXCEEDED
            queue.append(nxt)
    if stats is not None:
        stats.visited = len(seen)
        stats.exhausted = True
    return Answer.NOT_EQUAL


def _letter_counts_can_change(M: CoxeterMatrix) -> bool:
    # an odd relation trades one letter for the other
    return any(is_odd(p) for _, _, p in M.finite_pairs())


def commutes_positive(u: Sequence, v: Sequence, M: CoxeterMatrix,
                      budget: int | None = None) -> Answer:
    """Whether uv = vu in the monoid (hence in the group, positive words inject)."""
    u, v = tuple(u), tuple(v)
    return monoid_equal(u + v, v + u, M, budget)


# ------------------------------------------------------------ harnesses

class HypothesisError(ValueError):
    pass


@dataclass
class CellReport:
    cells: dict = field(default_factory=dict)

    def cells_with(self, answer: Answer) -> list:
        return [k for k, v in self.cells.items() if v is answer]

    @property
    def budget_exceeded(self) -> list:
        return self.cells_with(Answer.BUDGET_EXCEEDED)


def check_center_noncommutation(M: CoxeterMatrix, N: int = 1, roles: Sequence | None = None,
                                budget: int | None = None) -> CellReport:
    """Check that z_ab^n and z_ac^m never commute for 1 <= n, m <= N.

    Hypotheses on the roles (a, b, c): m_ab odd, m_ac finite, m_bc != 2.
    Cells hold ``Answer.NOT_EQUAL`` ("No"), ``EQUAL`` ("Yes") or
    ``BUDGET_EXCEEDED``.
    """
    roles = tuple(roles) if roles is not None else M.generators[:3]
    if len(roles) != 3 or len(set(roles)) != 3 or not set(roles) <= set(M.generators):
        raise HypothesisError(f"need three distinct generators of M as roles, got {roles}")
    a, b, c = roles
    if not is_odd(M.m(a, b)):
        raise HypothesisError(f"m_{a}{b} = {M.m(a, b)} is not odd")
    if M.m(a, c) == INF:
        raise HypothesisError(f"m_{a}{c} must be finite")
    if M.m(b, c) == 2:
        raise HypothesisError(f"m_{b}{c} must differ from 2")
    if N < 1:
        raise HypothesisError("N must be >= 1")
    zab, zac = build_z(M, a, b), build_z(M, a, c)
    rep = CellReport()
    for n in range(1, N + 1):
        for m in range(1, N + 1):
            rep.cells[(n, m)] = commutes_positive(power(zab, n), power(zac, m), M, budget)
    return rep


@dataclass
class Projection:
    keep: tuple
    images: dict
    valid: bool
    offending: list

    def apply(self, word: Sequence) -> tuple:
        return tuple(x for g in word for x in self.images[g])


def even_projection(M: CoxeterMatrix, keep: Sequence) -> Projection:
    """Map kept generators to themselves and kill the rest.

    The map respects every braid relation iff no odd label joins a kept
    generator to a killed one.
    """
    keep = tuple(keep)
    for g in keep:
        if g not in M.index:
            raise WordError(f"unknown generator {g!r}")
    kept = set(keep)
    images = {g: ((g,) if g in kept else ()) for g in M.generators}
    offending = [(a, b, p) for a, b, p in M.finite_pairs()
                 if is_odd(p) and ((a in kept) != (b in kept))]
    return Projection(keep, images, not offending, offending)


def projection_respects_relations(M: CoxeterMatrix, proj: Projection,
                                  budget: int | None = None) -> bool:
    """Independent check: images of both sides of every relation agree in the target."""
    target = M.restrict(proj.keep)
    for a, b, p in M.finite_pairs():
        lhs, rhs = proj.apply(build_w(p, a, b)), proj.apply(build_w(p, b, a))
        if monoid_equal(lhs, rhs, target, budget) is not Answer.EQUAL:
            return False
    return True


def check_center_avoids_product(M: CoxeterMatrix, keep: Sequence | None = None,
                                part_A: Iterable | None = None, part_B: Iterable | None = None,
                                N: int = 2, P: int = 8, Q: int = 8,
                                budget: int | None = None) -> CellReport:
    """Check z_ab^n != u^p v^q in <a, b> for 1 <= n <= N, 0 <= p <= P, 0 <= q <= Q.

    ``u`` ranges over ``part_A`` (default: the word a) and ``v`` over ``part_B``
    (default: b).  Words are first pushed through :func:`even_projection`,
    which must be valid.  Cells are keyed ``(n, p, q, u, v)``.
    """
    keep = tuple(keep) if keep is not None else M.generators[:2]
    if len(keep) != 2 or keep[0] == keep[1]:
        raise HypothesisError(f"need two distinct generators to keep, got {keep}")
    a, b = keep
    proj = even_projection(M, (a, b))
    if not proj.valid:
        raise HypothesisError(f"projection onto <{a}, {b}> is not a homomorphism: {proj.offending}")
    target = dihedral_matrix(M.m(a, b), a, b)
    zab = build_z(target, a, b)
    part_A = [tuple(w) for w in (part_A or [(a,)])]
    part_B = [tuple(w) for w in (part_B or [(b,)])]
    rep = CellReport()
    classes: dict = {}
    for n in range(1, N + 1):
        zn = power(zab, n)
        for u in part_A:
            for v in part_B:
                pu, pv = proj.apply(u), proj.apply(v)
                for p in range(P + 1):
                    for q in range(Q + 1):
                        w = power(pu, p) + power(pv, q)
                        if len(w) != len(zn):
                            rep.cells[(n, p, q, u, v)] = Answer.NOT_EQUAL
                            continue
                        if n not in classes:
                            classes[n] = monoid_class(target, zn, budget or default_budget())
                        cls = classes[n]
                        if cls is None:
                            rep.cells[(n, p, q, u, v)] = Answer.BUDGET_EXCEEDED
                        else:
                            rep.cells[(n, p, q, u, v)] = Answer.EQUAL if w in cls else Answer.NOT_EQUAL
    return rep


# ----------------------------------------------------------- group words

def inv(word: Sequence) -> tuple:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Iterable) -> tuple:
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def cyclic_reduce(word: Sequence) -> tuple:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def conjugate_up_to_inverse(r: Sequence, s: Sequence) -> bool:
    """Whether the relators r and s agree up to cyclic rotation and inversion.

    Such relators have the same normal closure.
    """
    r, s = cyclic_reduce(r), cyclic_reduce(s)
    if len(r) != len(s):
        return False
    if not r:
        return True
    for cand in (s, inv(s)):
        doubled = cand + cand
        for i in range(len(cand)):
            if doubled[i:i + len(cand)] == r:
                return True
    return False


def positive_to_group(word: Sequence) -> tuple:
    return tuple((g, 1) for g in word)


def gword(*letters) -> tuple:
    """Shorthand: gword('a', 'b-') is a b^-1."""
    out = []
    for x in letters:
        if x.endswith("-"):
            out.append((x[:-1], -1))
        else:
            out.append((x, 1))
    return tuple(out)


def parse_group_word(text: str) -> tuple:
    out = []
    for tok in text.split():
        if tok == "1":
            continue
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


def format_group_word(word: Sequence) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in word)


def commutator(u: Sequence, v: Sequence) -> tuple:
    return free_reduce(tuple(u) + tuple(v) + inv(u) + inv(v))


def standard_relator(p: int, a, b) -> tuple:
    """w_p(a, b) w_p(b, a)^-1."""
    return positive_to_group(build_w(p, a, b)) + inv(positive_to_group(build_w(p, b, a)))


def substitute(word: Sequence, images: dict) -> tuple:
    out = []
    for g, e in word:
        if g in images:
            img = images[g]
            out.extend(img if e == 1 else inv(img))
        else:
            out.append((g, e))
    return free_reduce(out)


def support(word: Sequence) -> set:
    return {g for g, _ in word}


# -------------------------------------------------------- presentations

@dataclass
class Presentation:
    generators: tuple
    relators: list

    def to_text(self) -> str:
        lines = ["gens " + " ".join(self.generators)]
        lines += ["rel " + format_group_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        gens, rels = None, []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head == "gens":
                gens = tuple(rest.split())
            elif head == "rel":
                rels.append(parse_group_word(rest))
            else:
                raise WordError(f"unexpected line {line!r}")
        if gens is None:
            raise WordError("missing 'gens' line")
        return cls(gens, rels)


def solve_for(relator: Sequence, gen) -> tuple:
    """Solve relator = 1 for a generator occurring exactly once."""
    hits = [i for i, (g, _) in enumerate(relator) if g == gen]
    if len(hits) != 1:
        raise WordError(f"{gen} occurs {len(hits)} times in relator")
    i = hits[0]
    before, (_, e), after = tuple(relator[:i]), relator[i], tuple(relator[i + 1:])
    # before g^e after = 1
    if e == 1:
        return free_reduce(inv(before) + inv(after))
    return free_reduce(after + before)


def eliminate(pres: Presentation, gen, relator_index: int) -> tuple[Presentation, tuple]:
    """Tietze move: drop ``gen`` using the relator at ``relator_index``."""
    value = solve_for(pres.relators[relator_index], gen)
    rels = [substitute(r, {gen: value})
            for k, r in enumerate(pres.relators) if k != relator_index]
    gens = tuple(g for g in pres.generators if g != gen)
    return Presentation(gens, rels), value


class Equivalence(enum.Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"


def bm_presentation(p: int) -> Presentation:
    """Generators x, a1 .. ap with relators a_i a_{i+1} x^-1 (indices mod p)."""
    if p < 2:
        raise WordError("p must be >= 2")
    gens = ("x",) + tuple(f"a{i}" for i in range(1, p + 1))
    rels = [gword(f"a{i}", f"a{i % p + 1}", "x-") for i in range(1, p + 1)]
    return Presentation(gens, rels)


def eliminate_bm(pres: Presentation, p: int, x="x", names=None) -> tuple[Presentation, dict]:
    """Run the fixed elimination x = a1 a2, a_{i+1} = a_i^-1 x on a cyclic presentation.

    ``pres.relators[i-1]`` must be the relator of a_i a_{i+1} = x.  Returns the
    residual presentation on (a1, a2) and the expressions of eliminated generators.
    """
    names = names or [f"a{i}" for i in range(1, p + 1)]
    exprs: dict = {}
    cur, val = eliminate(pres, x, 0)
    exprs[x] = val
    # after dropping relator 0, relator of a_i sits at index 0 each round
    for i in range(2, p):
        target = names[i]  # a_{i+1}
        cur, val = eliminate(cur, target, 0)
        exprs[target] = val
    return cur, exprs


def verify_bm_presentation(p: int) -> Equivalence:
    """Check the cyclic x, a_i presentation collapses to the dihedral Artin relation."""
    pres = bm_presentation(p)
    residual, _ = eliminate_bm(pres, p)
    ok = (set(residual.generators) == {"a1", "a2"} and len(residual.relators) == 1
          and conjugate_up_to_inverse(residual.relators[0], standard_relator(p, "a1", "a2")))
    return Equivalence.EQUIVALENT if ok else Equivalence.NOT_EQUIVALENT
