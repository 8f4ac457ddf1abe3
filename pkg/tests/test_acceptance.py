"""Acceptance criteria on the reference grid (levels 8, 16 nodes per level,
128 angles) with the default seed.

Each test prints one ``CRITERION n: PASS|FAIL`` line, with the failing rows
listed, and the lines are repeated in the terminal summary. Thresholds live
in the suites (experiments.py) and are the ones listed in the docstring of
each test here; none is relaxed to make a row pass.
"""

import pytest

import conftest
from wentelab import experiments as ex

TITLES = {
    1: "solver exactness, oracle equivalence, convergence order",
    2: "classical sup constant <= 1/(2 pi) + 0.02",
    3: "weighted constants bounded, no growth in annulus level",
    4: "logarithmic loss visible with r^2 on both sides",
    5: "divergence of R(alpha, beta) along the glued family",
    6: "counterexample closed forms and solve",
    7: "dyadic decomposition contract",
    8: "Lorentz engine closed forms",
    9: "CRIT <= 1.1 DGR pointwise",
}


@pytest.fixture(scope="module")
def report():
    return ex.run_all(ex.ExperimentConfig())


def _check(report, n):
    rows = [r for r in report.rows if r.id.startswith(f"C{n}.")]
    failed = [r for r in rows if not r.passed]
    verdict = "PASS" if rows and not failed else "FAIL"
    line = f"CRITERION {n}: {verdict}  {TITLES[n]}  ({len(rows) - len(failed)}/{len(rows)} rows)"
    lines = [line] + [f"    {r.line()}" for r in failed]
    conftest.ACCEPTANCE_LINES.extend(lines)
    print("\n".join(lines))
    assert rows, f"no rows for criterion {n}"
    assert not failed, "\n".join(r.line() for r in failed)


def test_criterion_1_solver(report):
    """rhs 1 to 1e-8 max; oracle 1e-3 relative L2; order >= 1.9."""
    _check(report, 1)


def test_criterion_2_sup_constant(report):
    """max ratio over 100 random pairs and (x, y) <= 1/(2 pi) + 0.02."""
    _check(report, 2)


def test_criterion_3_weighted_bounded(report):
    """finite constants, annulus log-slope within +-0.05 for alpha 1/4, 1/2, 3/4, and CRIT at 1."""
    _check(report, 3)


def test_criterion_4_log_loss(report):
    """r^2 both sides: slope > 0, linear fit r^2 >= 0.99; CRIT on b: log-slope <= 0.05."""
    _check(report, 4)


def test_criterion_5_divergence(report):
    """monotone, slope (1 - beta)/2 +- 0.1 for beta 0, 1/2; beta 1 within factor 2."""
    _check(report, 5)


def test_criterion_6_counterexample(report):
    """quadrature 0.5%; solve vs h_alpha 1%, error halves under refinement; residuals 1e-10."""
    _check(report, 6)


def test_criterion_7_dyadic(report):
    """reconstruction 1e-6; support leak 1e-12 |grad b|; C_dec <= locked cap at every level."""
    _check(report, 7)


def test_criterion_8_lorentz(report):
    """2 sqrt(pi), sqrt(pi), 1/r weak norm, L22 = L2 to 1e-8, nesting, CLMS ratio <= locked cap."""
    _check(report, 8)


def test_criterion_9_weights(report):
    """CRIT / DGR <= 1.1 on a log-spaced sample of (0, 1/2]."""
    _check(report, 9)
