import os

import hypothesis
import pytest
from hypothesis import strategies as st

from faithbn.graph import Dag

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def chain():
    return Dag("XYZ", [("X", "Y"), ("Y", "Z")])


@pytest.fixture
def collider():
    return Dag("XYZ", [("X", "Z"), ("Y", "Z")])


@pytest.fixture
def double_collider():
    return Dag(["A", "C1", "D", "C2", "B"], [("A", "C1"), ("D", "C1"), ("D", "C2"), ("B", "C2")])


@st.composite
def dags(draw, min_vertices=1, max_vertices=5):
    n = draw(st.integers(min_vertices, max_vertices))
    names = [chr(ord("A") + i) for i in range(n)]
    order = draw(st.permutations(names))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                edges.append((order[i], order[j]))
    return Dag(names, edges)


@st.composite
def dag_and_triple(draw, min_vertices=2, max_vertices=5):
    g = draw(dags(max(min_vertices, 2), max_vertices))
    labels = draw(st.lists(st.integers(0, 3), min_size=len(g.vertices), max_size=len(g.vertices)))
    vs = list(g.vertices)
    a = {v for v, l in zip(vs, labels) if l == 1} or {vs[0]}
    if len(a) == len(vs):
        a.discard(vs[-1])
    b = {v for v, l in zip(vs, labels) if l == 2 and v not in a}
    if not b:
        b = {next(v for v in vs if v not in a)}
    c = {v for v, l in zip(vs, labels) if l == 3 and v not in a | b}
    return g, a, b, c


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
