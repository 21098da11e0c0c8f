"""Self-check machinery: generator feasibility, grid oracle, report text."""

import numpy as np

from mixrelay.gp import GeometricProgram, Posynomial, monomial
from mixrelay.validate import (CheckResult, check_dual_form, format_report,
                               grid_search_gp, random_gp)


def test_random_gp_anchor_is_strictly_feasible():
    rng = np.random.default_rng(3)
    for _ in range(10):
        gp, lo, hi = random_gp(rng)
        anchor = np.sqrt(lo * hi)
        for con in gp.constraints:
            assert con.value(anchor) < 1.0
        assert gp.n_vars == len(lo) == len(hi)


def test_grid_search_finds_analytic_minimum():
    # min x + y with x y >= 1 over a box containing (1, 1): optimum is 2
    gp = GeometricProgram(
        Posynomial(np.array([1.0, 1.0]), np.array([[1.0, 0.0], [0.0, 1.0]])),
        [monomial(1.0, [-1.0, -1.0])])
    lo = np.array([0.2, 0.2])
    hi = np.array([5.0, 5.0])
    got = grid_search_gp(gp, lo, hi)
    assert abs(got - 2.0) / 2.0 < 1e-3


def test_grid_search_respects_constraints():
    # minimize x subject to x >= 2 (written as 2/x <= 1) inside [0.5, 8]
    gp = GeometricProgram(monomial(1.0, [1.0]),
                          [Posynomial(np.array([2.0]), np.array([[-1.0]]))])
    got = grid_search_gp(gp, np.array([0.5]), np.array([8.0]))
    assert abs(got - 2.0) / 2.0 < 1e-3


def test_dual_form_check_passes():
    result = check_dual_form(seed=11, configs=5)
    assert result.passed, result.detail


def test_format_report_layout():
    results = [CheckResult("alpha", True, "fine"),
               CheckResult("beta-longer", False, "off by 7%")]
    text = format_report(results)
    lines = text.splitlines()
    assert lines[0].startswith("alpha")
    assert "PASS" in lines[0] and "FAIL" in lines[1]
    assert lines[-1] == "1/2 checks passed"
