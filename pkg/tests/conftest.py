from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
IONOSPHERE = ROOT / "data" / "ionosphere.data"

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def ionosphere_path():
    return IONOSPHERE


def random_half_sphere(rng, n, m, spread=1.2):
    """m unit vectors within ``spread`` radians of a random pole."""
    pole = rng.normal(size=n)
    pole /= np.linalg.norm(pole)
    T = rng.normal(size=(n, m))
    T -= np.outer(pole, pole @ T)
    T /= np.linalg.norm(T, axis=0)
    ang = rng.uniform(0, spread, size=m)
    return np.cos(ang) * pole[:, None] + np.sin(ang) * T


def two_template_problem(seed, n=5, m=40, spread=0.9):
    """X = W* H* with two unit templates ``spread`` radians apart, H* > 0."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    c /= np.linalg.norm(c)
    u = rng.normal(size=n)
    u -= c * (c @ u)
    u /= np.linalg.norm(u)
    h = spread / 2
    W = np.column_stack([np.cos(h) * c + np.sin(h) * u, np.cos(h) * c - np.sin(h) * u])
    H = rng.uniform(0.2, 1.0, size=(2, m))
    return W @ H, W, H


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
