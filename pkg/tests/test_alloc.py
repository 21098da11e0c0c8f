"""Successive-GP power allocation over the power-explicit rate form."""

import numpy as np
import pytest

from mixrelay import rate
from mixrelay.alloc import (NonMonotoneError, _interior_start, allocate,
                            build_cgp, trace_to_csv, uniform_allocation)
from mixrelay.channel import LargeScaleProfile
from mixrelay.config import SystemConfig

PROF1 = LargeScaleProfile.from_gains([0.42], [0.77])
CFG1 = SystemConfig.from_kappa(M=128, kappa=0.5, K=1, bits=2,
                               p_s=1.0, p_r=1.0)

PROF3 = LargeScaleProfile.from_gains([0.9, 0.35, 0.12], [0.45, 0.8, 0.2])
CFG3 = SystemConfig.from_kappa(M=64, kappa=0.5, K=3, bits=2,
                               p_s=1.0, p_r=1.0)


def test_nonmonotone_error_is_runtime_error():
    assert issubclass(NonMonotoneError, RuntimeError)


class TestModelAssembly:
    def test_build_rejects_nonpositive_budget(self):
        with pytest.raises(ValueError):
            build_cgp(PROF3, CFG3, 0.0)

    def test_coupling_posynomial_term_count(self):
        model = build_cgp(PROF3, CFG3, 10.0)
        for k in range(3):
            poly = model.coupling_posynomial(k)
            assert poly.n_terms == 2 * 3 + 2
            assert poly.n_vars == 2 * 3 + 1

    def test_coupling_posynomial_encodes_sinr_identity(self):
        # at any positive point, s * xi / p equals the constraint value
        model = build_cgp(PROF3, CFG3, 10.0)
        rng = np.random.default_rng(5)
        p_s = rng.uniform(0.5, 2.0, size=3)
        p_r = 1.7
        s = rng.uniform(0.1, 1.0, size=3)
        x = np.concatenate([p_s, [p_r], s])
        co = model.coeffs
        xi = co.a @ p_s + (co.b @ p_s + co.c) / p_r + co.d
        for k in range(3):
            got = model.coupling_posynomial(k).value(x)
            np.testing.assert_allclose(got, s[k] * xi[k] / p_s[k], rtol=1e-12)

    def test_budget_posynomial_is_power_fraction(self):
        model = build_cgp(PROF3, CFG3, 8.0)
        p_s = np.array([1.0, 2.0, 0.5])
        x = np.concatenate([p_s, [3.0], np.ones(3)])
        got = model.budget_posynomial().value(x)
        np.testing.assert_allclose(got, (p_s.sum() + 3.0) / 8.0, rtol=1e-14)

    def test_iteration_gp_constraint_names(self):
        model = build_cgp(PROF3, CFG3, 10.0)
        gp = model.iteration_gp(np.array([0.5, 0.4, 0.3]), theta=1.1)
        names = [gp.constraint_name(i) for i in range(len(gp.constraints))]
        assert names[:4] == ["sinr-definition[0]", "sinr-definition[1]",
                             "sinr-definition[2]", "power-budget"]
        assert "trust-upper[0]" in names and "trust-lower[2]" in names
        assert len(names) == 3 + 1 + 2 * 3

    def test_model_sum_rate_matches_exact_form(self):
        p_total = 10.0
        p_s, p_r, achieved = uniform_allocation(PROF3, CFG3, p_total)
        np.testing.assert_allclose(p_s, np.full(3, p_total / 6.0), rtol=1e-15)
        assert p_r == pytest.approx(p_total / 2.0)
        cfg = SystemConfig.from_kappa(M=64, kappa=0.5, K=3, bits=2,
                                      p_s=p_s, p_r=p_r)
        expected = rate.exact_rate(PROF3, cfg).sum_rate
        assert achieved == pytest.approx(expected, rel=1e-9)


class TestInteriorStart:
    def test_start_is_strictly_feasible(self):
        model = build_cgp(PROF3, CFG3, 10.0)
        p_s = np.full(3, 10.0 / 6.0)
        p_r = 5.0
        point = model.sinr(p_s, p_r)
        x0 = _interior_start(model, p_s, p_r, point, theta=1.1)
        assert x0 is not None
        gp = model.iteration_gp(point, theta=1.1)
        values = np.array([c.value(x0) for c in gp.constraints])
        assert np.all(values < 1.0)

    def test_start_rejected_when_point_out_of_reach(self):
        model = build_cgp(PROF3, CFG3, 10.0)
        p_s = np.full(3, 10.0 / 6.0)
        p_r = 5.0
        far_point = model.sinr(p_s, p_r) * 100.0
        assert _interior_start(model, p_s, p_r, far_point, theta=1.1) is None


class TestAllocate:
    def test_rejects_bad_trust_region(self):
        with pytest.raises(ValueError):
            allocate(PROF1, CFG1, 10.0, theta=1.0)

    def test_rejects_initial_point_outside_budget(self):
        with pytest.raises(ValueError):
            allocate(PROF1, CFG1, 10.0, init_p_s=np.array([8.0]), init_p_r=4.0)
        with pytest.raises(ValueError):
            allocate(PROF1, CFG1, 10.0, init_p_s=np.array([-1.0]), init_p_r=2.0)

    def test_trace_monotone_and_budget_feasible(self):
        result = allocate(PROF3, CFG3, 10.0, max_iter=8)
        rates = [rec.sum_rate for rec in result.trace]
        assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))
        assert result.p_s.sum() + result.p_r <= 10.0 * (1 + 1e-9)
        _, _, uniform = uniform_allocation(PROF3, CFG3, 10.0)
        assert result.sum_rate >= uniform - 1e-9

    def test_budget_binds_at_optimum(self):
        result = allocate(PROF1, CFG1, 10.0)
        assert result.converged
        spent = result.p_s.sum() + result.p_r
        assert spent == pytest.approx(10.0, rel=1e-5)

    def test_fixed_point_restart_converges_immediately(self):
        first = allocate(PROF1, CFG1, 10.0)
        again = allocate(PROF1, CFG1, 10.0, init_p_s=first.p_s,
                         init_p_r=first.p_r)
        assert again.converged
        assert again.iterations == 1
        assert again.sum_rate == pytest.approx(first.sum_rate, rel=1e-6)

    def test_result_sinr_consistent_with_powers(self):
        result = allocate(PROF1, CFG1, 10.0)
        model = build_cgp(PROF1, CFG1, 10.0)
        np.testing.assert_allclose(result.sinr,
                                   model.sinr(result.p_s, result.p_r),
                                   rtol=1e-12)


def test_trace_to_csv_round_trip(tmp_path):
    result = allocate(PROF1, CFG1, 10.0, max_iter=3)
    out = tmp_path / "trace.csv"
    trace_to_csv(result, out, extra={"budget": 10.0, "bits": 2})
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == len(result.trace) + 1
    header = lines[0].split(",")
    assert header[:2] == ["budget", "bits"]
    assert "sum_rate" in header and "p_s_0" in header and "sinr_0" in header
    first_row = lines[1].split(",")
    assert first_row[0] == "10.0"
    assert int(first_row[2]) == 0
