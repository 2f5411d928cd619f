import itertools
import math

from hypothesis import settings, strategies as st

from artincube.coxeter import CoxeterMatrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

LABELS = (2, 3, 4, 5, 6, math.inf)


@st.composite
def matrices(draw, min_size=1, max_size=4, labels=LABELS):
    n = draw(st.integers(min_size, max_size))
    gens = [chr(ord("a") + i) for i in range(n)]
    pairs = list(itertools.combinations(gens, 2))
    values = draw(st.lists(st.sampled_from(labels), min_size=len(pairs), max_size=len(pairs)))
    return CoxeterMatrix(gens, {frozenset(p): m for p, m in zip(pairs, values)})


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
