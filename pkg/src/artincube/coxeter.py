"""Coxeter matrices and the combinatorial cubulation criteria.

A Coxeter matrix is stored sparsely: only finite labels are kept, every
missing pair is read as infinity.  Generators keep the order in which they
were declared, and every "lexicographic" choice below refers to that order.
"""
from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

INF = math.inf


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DecompositionFailure(RuntimeError):
    pass


def is_odd(m) -> bool:
    return m != INF and m % 2 == 1


def is_even_big(m) -> bool:
    """Even, finite and different from 2."""
    return m != INF and m % 2 == 0 and m != 2


def format_label(m) -> str:
    return "inf" if m == INF else str(m)


class CoxeterMatrix:
    """Symmetric labelling of generator pairs by integers >= 2 or infinity."""

    def __init__(self, generators: Iterable[str], labels: Mapping | None = None):
        gens = tuple(generators)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generator names in {gens}")
        self.generators = gens
        self.index = {g: i for i, g in enumerate(gens)}
        self._labels: dict[frozenset, int] = {}
        for pair, m in (labels or {}).items():
            a, b = tuple(pair)
            self._set(a, b, m)

    def _set(self, a, b, m):
        if a not in self.index or b not in self.index:
            raise ValueError(f"unknown generator in pair ({a}, {b})")
        if a == b:
            raise ValueError(f"diagonal pair ({a}, {a}) has no label")
        if m == INF:
            self._labels.pop(frozenset((a, b)), None)
            return
        if not isinstance(m, int) or isinstance(m, bool) or m < 2:
            raise ValueError(f"label for ({a}, {b}) must be an integer >= 2 or inf, got {m!r}")
        self._labels[frozenset((a, b))] = m

    @classmethod
    def from_pairs(cls, generators, pairs: Iterable[tuple]) -> "CoxeterMatrix":
        return cls(generators, {frozenset((a, b)): m for a, b, m in pairs})

    def m(self, a, b):
        if a == b:
            return 1
        return self._labels.get(frozenset((a, b)), INF)

    def __len__(self):
        return len(self.generators)

    def pairs(self):
        """All unordered pairs in declaration order, with their labels."""
        for a, b in itertools.combinations(self.generators, 2):
            yield a, b, self.m(a, b)

    def finite_pairs(self):
        return [(a, b, m) for a, b, m in self.pairs() if m != INF]

    def restrict(self, subset: Iterable[str]) -> "CoxeterMatrix":
        keep = set(subset)
        gens = [g for g in self.generators if g in keep]
        return CoxeterMatrix(gens, {frozenset((a, b)): m for a, b, m in self.finite_pairs()
                                    if a in keep and b in keep})

    def relabel(self, mapping: Mapping[str, str]) -> "CoxeterMatrix":
        gens = [mapping[g] for g in self.generators]
        return CoxeterMatrix(gens, {frozenset((mapping[a], mapping[b])): m
                                    for a, b, m in self.finite_pairs()})

    def reorder(self, order: Iterable[str]) -> "CoxeterMatrix":
        order = list(order)
        assert sorted(order) == sorted(self.generators)
        return CoxeterMatrix(order, {frozenset((a, b)): m for a, b, m in self.finite_pairs()})

    def is_right_angled(self) -> bool:
        return all(m in (2, INF) for _, _, m in self.pairs())

    def __eq__(self, other):
        return (isinstance(other, CoxeterMatrix) and self.generators == other.generators
                and self._labels == other._labels)

    def __hash__(self):
        return hash((self.generators, frozenset(self._labels.items())))

    def __repr__(self):
        body = ", ".join(f"{a}{b}={format_label(m)}" for a, b, m in self.finite_pairs())
        return f"CoxeterMatrix({' '.join(self.generators)}; {body})"

    def to_text(self) -> str:
        lines = ["gens " + " ".join(self.generators)]
        lines += [f"{a} {b} {format_label(m)}" for a, b, m in self.finite_pairs()]
        return "\n".join(lines) + "\n"


def parse_coxeter(text: str) -> CoxeterMatrix:
    """Parse the ``gens ...`` / ``a b label`` text format."""
    gens = None
    labels: dict[frozenset, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if gens is None:
            if tokens[0] != "gens" or len(tokens) < 2:
                raise ParseError("first line must be 'gens <name> ...'", lineno)
            gens = tokens[1:]
            if len(set(gens)) != len(gens):
                raise ParseError("duplicate generator name", lineno)
            continue
        if tokens[0] == "gens":
            raise ParseError("repeated 'gens' line", lineno)
        if len(tokens) != 3:
            raise ParseError(f"expected '<name> <name> <label>', got {line!r}", lineno)
        a, b, lab = tokens
        for g in (a, b):
            if g not in gens:
                raise ParseError(f"unknown generator {g!r}", lineno)
        if a == b:
            raise ParseError(f"pair ({a}, {b}) is diagonal", lineno)
        if lab.lower() in ("inf", "infinity", "oo"):
            m = INF
        elif re.fullmatch(r"\d+", lab):
            m = int(lab)
            if m < 2:
                raise ParseError(f"label {m} < 2", lineno)
        else:
            raise ParseError(f"malformed label {lab!r}", lineno)
        key = frozenset((a, b))
        if key in labels and labels[key] != m:
            raise ParseError(f"conflicting labels for ({a}, {b})", lineno)
        labels[key] = m
    if gens is None:
        raise ParseError("empty matrix file (no 'gens' line)")
    return CoxeterMatrix(gens, labels)


# ---------------------------------------------------------------- obstructions

class ObstructionKind(enum.Enum):
    ODD_TRIPLE = "OddTriple"
    EVEN_FORK = "EvenFork"
    FOUR_CYCLE = "FourCycle"


@dataclass(frozen=True)
class Obstruction:
    kind: ObstructionKind
    witness: tuple

    def holds_in(self, M: CoxeterMatrix) -> bool:
        """Re-check the defining inequalities on ``M``."""
        w = self.witness
        if len(set(w)) != len(w):
            return False
        if self.kind is ObstructionKind.ODD_TRIPLE:
            a, b, c = w
            return is_odd(M.m(a, b)) and M.m(a, c) != INF and M.m(b, c) != 2
        if self.kind is ObstructionKind.EVEN_FORK:
            a, b, c = w
            return is_even_big(M.m(a, b)) and is_even_big(M.m(a, c)) and M.m(b, c) != INF
        a, b, c, d = w
        return (M.m(a, b) not in (2, INF) and M.m(a, c) != INF and M.m(b, d) != INF
                and M.m(a, d) != 2 and M.m(b, c) != 2)

    def __str__(self):
        return f"{self.kind.value}({', '.join(self.witness)})"


def check_condition_A1(M: CoxeterMatrix) -> list[Obstruction]:
    """Every ordered triple (a, b, c) with m_ab odd, m_ac finite, m_bc != 2."""
    out = []
    for a, b, c in itertools.permutations(M.generators, 3):
        if is_odd(M.m(a, b)) and M.m(a, c) != INF and M.m(b, c) != 2:
            out.append(Obstruction(ObstructionKind.ODD_TRIPLE, (a, b, c)))
    return out


def find_even_forks(M: CoxeterMatrix) -> list[Obstruction]:
    out = []
    for a, b, c in itertools.permutations(M.generators, 3):
        if is_even_big(M.m(a, b)) and is_even_big(M.m(a, c)) and M.m(b, c) != INF:
            out.append(Obstruction(ObstructionKind.EVEN_FORK, (a, b, c)))
    return out


def find_four_cycles(M: CoxeterMatrix) -> list[Obstruction]:
    out = []
    for a, b, c, d in itertools.permutations(M.generators, 4):
        if (M.m(a, b) not in (2, INF) and M.m(a, c) != INF and M.m(b, d) != INF
                and M.m(a, d) != 2 and M.m(b, c) != 2):
            out.append(Obstruction(ObstructionKind.FOUR_CYCLE, (a, b, c, d)))
    return out


def find_obstructions(M: CoxeterMatrix) -> dict[ObstructionKind, list[Obstruction]]:
    """Direct search for all three local obstructions (independent of the ordering logic)."""
    return {
        ObstructionKind.ODD_TRIPLE: check_condition_A1(M),
        ObstructionKind.EVEN_FORK: find_even_forks(M),
        ObstructionKind.FOUR_CYCLE: find_four_cycles(M),
    }


@dataclass(frozen=True)
class EvenOrdering:
    """Orientation ``(small, big)`` for every pair with even label other than 2."""
    orientation: dict = field(hash=False)

    def less(self, a, b) -> bool:
        return self.orientation.get(frozenset((a, b))) == (a, b)

    def center_of(self, a, b):
        return self.orientation[frozenset((a, b))][0]


def _clause_holds(M, less, a, b, c) -> bool:
    mac, mbc = M.m(a, c), M.m(b, c)
    if mac == 2 and mbc == 2:
        return True
    if mac == 2 and mbc == INF:
        return True
    if mac == INF and mbc == INF:
        return True
    return is_even_big(mac) and less(a, c) and mbc == INF


def _violations(M: CoxeterMatrix, less) -> list[tuple]:
    bad = []
    for a, b, m in M.pairs():
        if not is_even_big(m):
            continue
        lo, hi = (a, b) if less(a, b) else (b, a)
        for c in M.generators:
            if c not in (lo, hi) and not _clause_holds(M, less, lo, hi, c):
                bad.append((lo, hi, c))
    return bad


def forced_ordering(M: CoxeterMatrix) -> tuple[dict, list[tuple]]:
    """Orient even pairs by the forcing rule; also return pairs forced both ways.

    a < b is forced by some c with m_ac finite and m_bc infinite, b < a by the
    mirrored witness; unforced pairs fall back to declaration order.
    """
    orientation = {}
    conflicts = []
    for a, b, m in M.pairs():
        if not is_even_big(m):
            continue
        others = [c for c in M.generators if c not in (a, b)]
        cs = [c for c in others if M.m(a, c) != INF and M.m(b, c) == INF]
        ds = [d for d in others if M.m(b, d) != INF and M.m(a, d) == INF]
        if cs and ds:
            conflicts.append((a, b, cs[0], ds[0]))
        orientation[frozenset((a, b))] = (b, a) if ds and not cs else (a, b)
    return orientation, conflicts


def check_condition_B(M: CoxeterMatrix) -> EvenOrdering | Obstruction:
    """Return a valid even ordering, or an obstruction explaining why none exists."""
    orientation, conflicts = forced_ordering(M)
    ordering = EvenOrdering(orientation)
    if not conflicts and not _violations(M, ordering.less):
        return ordering
    if conflicts:
        return Obstruction(ObstructionKind.FOUR_CYCLE, conflicts[0])
    found = find_obstructions(M)
    for kind in (ObstructionKind.EVEN_FORK, ObstructionKind.FOUR_CYCLE, ObstructionKind.ODD_TRIPLE):
        if found[kind]:
            return found[kind][0]
    raise AssertionError(f"ordering fails on {M!r} but no local obstruction exists")


def condition_B_brute_force(M: CoxeterMatrix) -> bool:
    """Existence of a valid ordering, by trying every orientation of every even pair."""
    even = [(a, b) for a, b, m in M.pairs() if is_even_big(m)]
    for bits in itertools.product((0, 1), repeat=len(even)):
        orient = {frozenset(p): (p if bit == 0 else p[::-1]) for p, bit in zip(even, bits)}

        def less(x, y, orient=orient):
            return orient.get(frozenset((x, y))) == (x, y)

        if not _violations(M, less):
            return True
    return False


# -------------------------------------------------------------------- verdicts

class Status(enum.Enum):
    CUBULATED = "Cubulated"
    NOT_VIRTUALLY_CC = "NotVirtuallyCC"


CAVEAT_NEGATIVE = ("negative verdict assumes the centralizer property Z(s^n) = Z(s) for every "
                   "standard generator s and n >= 1; the full classification is conjectural")
CAVEAT_POSITIVE = "positive verdict is unconditional (explicit cubulation)"


@dataclass(frozen=True)
class Verdict:
    status: Status
    obstruction: Obstruction | None = None
    caveat: str = CAVEAT_POSITIVE
    ordering: EvenOrdering | None = None
    counts: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        assert (self.status is Status.NOT_VIRTUALLY_CC) == (self.obstruction is not None)

    @property
    def cubulated(self) -> bool:
        return self.status is Status.CUBULATED


def classify(M: CoxeterMatrix) -> Verdict:
    counts = {k.value: len(v) for k, v in find_obstructions(M).items()}
    odd = check_condition_A1(M)
    if odd:
        return Verdict(Status.NOT_VIRTUALLY_CC, odd[0], CAVEAT_NEGATIVE, counts=counts)
    res = check_condition_B(M)
    if isinstance(res, Obstruction):
        return Verdict(Status.NOT_VIRTUALLY_CC, res, CAVEAT_NEGATIVE, counts=counts)
    return Verdict(Status.CUBULATED, None, CAVEAT_POSITIVE, ordering=res, counts=counts)


# ---------------------------------------------------------------- equivalence

def all_matrices(n: int, labels: Iterable) -> Iterable[CoxeterMatrix]:
    gens = [chr(ord("a") + i) for i in range(n)]
    pairs = list(itertools.combinations(gens, 2))
    labels = list(labels)
    for choice in itertools.product(labels, repeat=len(pairs)):
        yield CoxeterMatrix(gens, {frozenset(p): m for p, m in zip(pairs, choice)})


@dataclass
class EquivalenceReport:
    checked: int = 0
    cubulated: int = 0
    counterexamples: list = field(default_factory=list)
    by_size: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_obstruction_equivalence(bound: int, labels: Iterable) -> EquivalenceReport:
    """Exhaustively compare the two-condition criterion with the obstruction search.

    Three independent readings are compared on every matrix: the ordering
    conditions with the existential quantifier brute-forced, the forced-ordering
    check used by :func:`classify`, and the absence of all local obstructions.
    """
    labels = list(labels)
    rep = EquivalenceReport()
    for n in range(0, bound + 1):
        count = 0
        for M in all_matrices(n, labels):
            count += 1
            conditions = not check_condition_A1(M) and condition_B_brute_force(M)
            forced = classify(M).cubulated
            no_obstruction = not any(find_obstructions(M).values())
            if not (conditions == forced == no_obstruction):
                rep.counterexamples.append((M, conditions, forced, no_obstruction))
            rep.cubulated += conditions
        rep.by_size[n] = count
        rep.checked += count
    return rep


# --------------------------------------------------------------- decomposition

@dataclass(frozen=True)
class Decomposition:
    free_part: tuple                  # generators with every incident label in {2, inf}
    odd_pairs: tuple                  # ((a, b, m), ...)
    stars: tuple                      # ((center, (leaf, ...)), ...)

    def parts(self) -> list[tuple]:
        out = [self.free_part]
        out += [(a, b) for a, b, _ in self.odd_pairs]
        out += [(c, *leaves) for c, leaves in self.stars]
        return out


def decompose(M: CoxeterMatrix, ordering: EvenOrdering | None = None) -> Decomposition:
    if ordering is None:
        verdict = classify(M)
        if not verdict.cubulated:
            raise DecompositionFailure(f"matrix is not cubulable: {verdict.obstruction}")
        ordering = verdict.ordering
    free = tuple(a for a in M.generators
                 if all(M.m(a, b) in (2, INF) for b in M.generators if b != a))
    odd = tuple((a, b, m) for a, b, m in M.pairs() if is_odd(m))
    stars: dict = {}
    for a, b, m in M.pairs():
        if is_even_big(m):
            center = ordering.center_of(a, b)
            leaf = b if center == a else a
            stars.setdefault(center, []).append(leaf)
    star_parts = tuple((c, tuple(sorted(ls, key=M.index.get)))
                       for c, ls in sorted(stars.items(), key=lambda kv: M.index[kv[0]]))

    seen: dict = {}
    for i, part in enumerate([free] + [(a, b) for a, b, _ in odd] + [(c, *ls) for c, ls in star_parts]):
        for g in part:
            if g in seen:
                raise DecompositionFailure(f"generator {g} lies in two parts ({seen[g]} and {i})")
            seen[g] = i
    missing = [g for g in M.generators if g not in seen]
    if missing:
        raise DecompositionFailure(f"generators left unassigned: {missing}")
    for c, leaves in star_parts:
        for x, y in itertools.combinations(leaves, 2):
            if M.m(x, y) != INF:
                raise DecompositionFailure(f"star at {c} has joined leaves {x}, {y}")
    for a, b, m in M.pairs():
        if m not in (2, INF) and seen[a] != seen[b]:
            raise DecompositionFailure(f"label {m} on ({a}, {b}) crosses parts")
    return Decomposition(free, odd, star_parts)


# -------------------------------------------------------------- sample families

def braid_matrix(n: int) -> CoxeterMatrix:
    """Coxeter matrix of the n-strand braid group (generators s1 .. s{n-1})."""
    gens = [f"s{i}" for i in range(1, n)]
    labels = {}
    for i, j in itertools.combinations(range(len(gens)), 2):
        labels[frozenset((gens[i], gens[j]))] = 3 if j == i + 1 else 2
    return CoxeterMatrix(gens, labels)


def dihedral_matrix(p, a="a", b="b") -> CoxeterMatrix:
    return CoxeterMatrix([a, b], {frozenset((a, b)): p})


def even_star_matrix(labels: Iterable[int], center="a", leaf_prefix="b") -> CoxeterMatrix:
    labels = list(labels)
    leaves = [f"{leaf_prefix}{i}" for i in range(1, len(labels) + 1)]
    return CoxeterMatrix([center] + leaves,
                         {frozenset((center, leaf)): m for leaf, m in zip(leaves, labels)})


def random_matrix(n: int, rng, labels=(2, 3, 4, 5, 6, INF)) -> CoxeterMatrix:
    gens = [f"s{i}" for i in range(1, n + 1)]
    return CoxeterMatrix(gens, {frozenset(p): rng.choice(labels) for p in itertools.combinations(gens, 2)})


def random_block_matrix(n: int, rng, max_label: int = 8) -> CoxeterMatrix:
    """Random matrix built from odd pairs, even stars and right-angled generators.

    Labels between two blocks are 2 or infinity, usually one value per pair
    of blocks, so the result is often (not always) cubulable.
    """
    gens = [f"s{i}" for i in range(1, n + 1)]
    rest = gens[:]
    rng.shuffle(rest)
    labels: dict = {}
    blocks = []
    while rest:
        kind = rng.choice(("free", "odd", "star"))
        if kind == "odd" and len(rest) >= 2:
            a, b = rest.pop(), rest.pop()
            labels[frozenset((a, b))] = rng.choice(range(3, max_label + 1, 2))
            blocks.append((a, b))
        elif kind == "star" and len(rest) >= 2:
            k = rng.randint(1, min(3, len(rest) - 1))
            c = rest.pop()
            leaves = [rest.pop() for _ in range(k)]
            for leaf in leaves:
                labels[frozenset((c, leaf))] = rng.choice(range(4, max_label + 1, 2))
            blocks.append((c, *leaves))
        else:
            blocks.append((rest.pop(),))
    for B1, B2 in itertools.combinations(blocks, 2):
        uniform = rng.choice((2, INF)) if rng.random() < 0.7 else None
        for a in B1:
            for b in B2:
                labels[frozenset((a, b))] = uniform or rng.choice((2, INF))
    for a, b in itertools.combinations(gens, 2):
        labels.setdefault(frozenset((a, b)), INF)
    return CoxeterMatrix(gens, labels)
