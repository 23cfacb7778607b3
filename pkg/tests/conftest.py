import numpy as np
import pytest
from hypothesis import strategies as st

from sfgsynth.sfg_gates import is_valid_pair


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@st.composite
def valid_specs(draw, max_n: int = 400):
    """(M, N, branch) with a real f."""
    n = draw(st.integers(4, max_n))  # smallest valid pair is (3, 4)
    lo = int(np.ceil(n / np.sqrt(2)))
    m = draw(st.integers(lo, n - 1))
    if draw(st.booleans()):
        m, n = n, m
    branch = draw(st.sampled_from(["plus", "minus"]))
    assert is_valid_pair(m, n)
    return m, n, branch


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
