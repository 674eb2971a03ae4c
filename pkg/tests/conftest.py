import numpy as np
import pytest
from sympy import GF, Poly, symbols
from sympy.polys.matrices import DomainMatrix

from cartanlie.field import field_make
from cartanlie.dpalgebra import Shape

t = symbols("t")


def sympy_matrix(M, p):
    K = GF(p)
    rows = [[K(int(x)) for x in row] for row in np.asarray(M)]
    return DomainMatrix(rows, (len(rows), len(rows[0]) if rows else 0), K)


def sympy_rank(M, p) -> int:
    return sympy_matrix(M, p).rank()


def sympy_charpoly(M, p) -> tuple[int, ...]:
    """Coefficients low degree first, as residues 0..p-1."""
    cs = [int(c) % p for c in sympy_matrix(M, p).charpoly()]
    return tuple(reversed(cs))


def sympy_irreducible(coeffs_low_first, p) -> bool:
    return Poly(list(reversed(coeffs_low_first)), t, modulus=p).is_irreducible


@pytest.fixture
def F5():
    return field_make(5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def shape(n, p=5):
    return Shape.make(p, tuple(n), field_make(p))


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

CRITERIA: dict[int, tuple[str, str]] = {}
SOFT: dict[int, str] = {}  # non-gating criteria record their own verdict


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    verdict = SOFT.get(n) or ("PASS" if rep.passed else "FAIL")
    CRITERIA[n] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, verdict = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {verdict:24s} {title}")
