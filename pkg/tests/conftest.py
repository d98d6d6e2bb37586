import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cubeterm.algebra import FiniteAlgebra, Signature, Subset

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def idempotent_algebras(draw, max_size=4, max_arity=3, max_ops=2, min_size=1):
    k = draw(st.integers(min_size, max_size))
    n_ops = draw(st.integers(1, max_ops))
    arities = [draw(st.integers(2, max_arity)) for _ in range(n_ops)]
    tables = []
    for a in arities:
        table = draw(st.lists(st.integers(0, k - 1), min_size=k ** a, max_size=k ** a))
        diag = sum(k ** j for j in range(a))
        for e in range(k):
            table[e * diag] = e
        tables.append(table)
    sig = Signature.of(*((f"f{i}", a) for i, a in enumerate(arities)))
    return FiniteAlgebra(k, sig, tables)


@st.composite
def proper_subsets(draw, size):
    bits = draw(st.integers(1, (1 << size) - 2))
    return Subset(size, bits)


def naive_closure(algebra, generators):
    """Apply every operation to every argument tuple until nothing new appears."""
    current = {tuple(int(v) for v in g) for g in generators}
    while True:
        elems = sorted(current)
        new = set(current)
        for s, n in enumerate(algebra.arities):
            for args in itertools.product(elems, repeat=n):
                new.add(tuple(int(algebra.apply(s, *col)) for col in zip(*args)))
        if new == current:
            return current
        current = new


def brute_subuniverses(algebra):
    out = []
    for bits in range(1, 1 << algebra.size):
        S = Subset(algebra.size, bits)
        if algebra.is_closed(S):
            out.append(S)
    return sorted(out, key=lambda S: S.sort_key())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
