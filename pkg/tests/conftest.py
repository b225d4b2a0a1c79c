import numpy as np
import pytest
from hypothesis import strategies as st

from zbdepol.channel import cp_check


def random_density(rng, dim=2):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_bloch(rng, inside=True):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * rng.random() ** (1 / 3) if inside else v


def random_cp_lambda(rng):
    while True:
        lam = rng.uniform(-1, 1, 3)
        if cp_check(lam)[0]:
            return lam


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


unit = st.floats(-1, 1, allow_nan=False)


@st.composite
def bloch_vectors(draw):
    v = np.array([draw(unit), draw(unit), draw(unit)])
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


@st.composite
def cp_lambdas(draw):
    # convex combinations of the tetrahedron vertices are exactly the CP set
    w = np.array([draw(st.floats(0, 1)) for _ in range(4)]) + 1e-9
    w /= w.sum()
    verts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return w @ verts


# one "PASS/FAIL criterion N: ..." line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
