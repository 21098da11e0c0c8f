"""Release gates: end-to-end checks of the whole stack at fixed tolerances.

Each test is one gate with its own pass/fail line.  Statistical gates fix
their seeds so a pass is reproducible, with tolerances sized to ~3 sigma
of the frozen run.  The slow allocation campaign (gates 6a and 6c) runs
once in a shared fixture.
"""

import numpy as np
import pytest

from mixrelay import mcsim, rate
from mixrelay.alloc import NonMonotoneError, allocate, uniform_allocation
from mixrelay.channel import LargeScaleProfile, drop_users
from mixrelay.config import INFINITE_BITS, SystemConfig
from mixrelay.energy import (PowerModel, energy_efficiency, p_adc, p_dac,
                             power_breakdown)
from mixrelay.gp import solve_gp
from mixrelay.validate import grid_search_gp, random_gp


def test_01_relay_transmit_power_closed_form_vs_monte_carlo():
    """Mean squared relay output over 1e5 draws matches the closed form
    within 1% for every mix ratio and resolution on a 64-pair array."""
    prof = LargeScaleProfile.from_gains([0.7, 0.25], [0.4, 0.9])
    worst = 0.0
    for kappa in (0.0, 0.5, 1.0):
        for bits in (1, 2, INFINITE_BITS):
            cfg = SystemConfig.from_kappa(M=64, kappa=kappa, K=2, bits=bits,
                                          p_s=10.0, p_r=10.0)
            mu = rate.mu_per_antenna(prof, cfg)
            combine = cfg.M0 + cfg.alpha_q * cfg.M1
            est = mcsim.estimate_tx_power(prof, cfg, trials=100_000, seed=31)
            worst = max(worst, abs(est.mean / combine - mu) / mu)
    assert worst <= 1e-2, f"worst relative deviation {worst:.3e}"


def test_02_rate_terms_within_three_standard_errors():
    """Every closed-form SINR term sits within 3 standard errors of its
    1e4-trial estimator; the assembled SINR lands within 5% relative."""
    prof = LargeScaleProfile.from_gains([0.9, 0.35, 0.12], [0.45, 0.8, 0.2])
    worst_sig = 0.0
    worst_sinr = 0.0
    for bits in (1, 2, 3):
        cfg = SystemConfig.from_kappa(M=64, kappa=0.5, K=3, bits=bits,
                                      p_s=10.0, p_r=10.0)
        analytic = rate.exact_rate(prof, cfg)
        result = mcsim.simulated_rate(prof, cfg, trials=10_000, seed=202)
        for name, est in result.terms.items():
            ref = getattr(analytic.components, name)
            sig = float(np.max(np.abs(est.mean - ref)
                               / np.maximum(est.std_error, 1e-300)))
            worst_sig = max(worst_sig, sig)
        worst_sinr = max(worst_sinr, float(np.max(
            np.abs(result.sinr - analytic.sinr) / analytic.sinr)))
    assert worst_sig <= 3.0, f"worst term at {worst_sig:.2f} standard errors"
    assert worst_sinr <= 5e-2, f"worst SINR deviation {worst_sinr:.3e}"


def test_03_component_and_table_rate_forms_agree():
    """The component-sum rate and the power-coefficient-table rate agree to
    1e-9 relative on 100 randomized configurations, and the hardening
    approximation collapses onto the exact rate (1e-12) without
    quantization."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    worst_ideal = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 5))
        prof = LargeScaleProfile.from_gains(10 ** rng.uniform(-1.5, 0.5, k),
                                            10 ** rng.uniform(-1.5, 0.5, k))
        m = int(rng.integers(2, 65))
        m0 = int(rng.integers(0, m + 1))
        bits = float(rng.choice([1, 2, 3, 5, 8, INFINITE_BITS]))
        p_s = 10 ** rng.uniform(-1, 1.5, k)
        p_r = float(10 ** rng.uniform(-1, 1.5))
        cfg = SystemConfig(M=m, M0=m0, K=k, bits=bits, p_s=p_s, p_r=p_r,
                           tau_c=20 * k, tau_p=k)
        a = rate.exact_rate(prof, cfg).rates
        b = rate.compact_rate(prof, cfg).rates
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        cfg_i = SystemConfig(M=m, M0=m0, K=k, bits=INFINITE_BITS, p_s=p_s,
                             p_r=p_r, tau_c=20 * k, tau_p=k)
        ai = rate.exact_rate(prof, cfg_i).rates
        pi = rate.approx_rate(prof, cfg_i).rates
        worst_ideal = max(worst_ideal,
                          float(np.max(np.abs(ai - pi) / np.abs(ai))))
    assert worst <= 1e-9, f"exact vs table {worst:.3e}"
    assert worst_ideal <= 1e-12, f"approx vs exact without quantization {worst_ideal:.3e}"


def test_04_power_scaling_rate_converges_to_limit():
    """With per-node power E/M at fixed E, the exact rate closes on the
    scaling limit monotonically and lands within 5% by M = 2^14."""
    prof = LargeScaleProfile.from_gains([1.0, 0.3], [0.6, 0.15])
    gaps = []
    for expo in range(8, 15):
        m = 2 ** expo
        cfg = SystemConfig.from_kappa(M=m, kappa=0.5, K=2, bits=1,
                                      p_s=10.0 / m, p_r=10.0 / m,
                                      e_s=10.0, e_r=10.0)
        r = rate.exact_rate(prof, cfg).sum_rate
        lim = float(np.sum(rate.scaling_limit(prof, cfg)))
        gaps.append(abs(r - lim) / lim)
    assert all(b < a for a, b in zip(gaps, gaps[1:])), f"gaps not shrinking: {gaps}"
    assert gaps[-1] <= 5e-2, f"final gap {gaps[-1]:.3e}"


def test_05_vanishing_budget_rate_ratio_matches_gap_factor():
    """As one side's energy budget vanishes, the quantized-to-ideal ratio
    of limit rates reproduces the closed-form penalty factor to 1e-3 on
    20 random setups; with ideal converters the factor is exactly one."""
    rng = np.random.default_rng(9)
    worst_src = 0.0
    worst_rel = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 5))
        bits = int(rng.integers(1, 6))
        kappa = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        prof = LargeScaleProfile.from_gains(10 ** rng.uniform(-1.0, 0.3, k),
                                            10 ** rng.uniform(-1.0, 0.3, k))
        other = float(10 ** rng.uniform(-0.5, 0.5))
        cfg_q = SystemConfig.from_kappa(M=256, kappa=kappa, K=k, bits=bits,
                                        p_s=1.0, p_r=1.0, e_s=1e-6, e_r=other)
        cfg_i = SystemConfig.from_kappa(M=256, kappa=kappa, K=k,
                                        bits=INFINITE_BITS, p_s=1.0, p_r=1.0,
                                        e_s=1e-6, e_r=other)
        ratio = rate.scaling_limit(prof, cfg_q) / rate.scaling_limit(prof, cfg_i)
        pred = rate.gap_factor_low_es(prof, cfg_q)
        worst_src = max(worst_src, float(np.max(np.abs(ratio - pred) / pred)))
        cfg_q = SystemConfig.from_kappa(M=256, kappa=kappa, K=k, bits=bits,
                                        p_s=1.0, p_r=1.0, e_s=other, e_r=1e-6)
        cfg_i = SystemConfig.from_kappa(M=256, kappa=kappa, K=k,
                                        bits=INFINITE_BITS, p_s=1.0, p_r=1.0,
                                        e_s=other, e_r=1e-6)
        ratio = rate.scaling_limit(prof, cfg_q) / rate.scaling_limit(prof, cfg_i)
        pred = rate.gap_factor_low_er(prof, cfg_q)
        worst_rel = max(worst_rel, float(np.max(np.abs(ratio - pred) / pred)))
    assert worst_src <= 1e-3, f"source-side factor off by {worst_src:.3e}"
    assert worst_rel <= 1e-3, f"relay-side factor off by {worst_rel:.3e}"

    cfg_one = SystemConfig.from_kappa(M=64, kappa=0.5, K=2, bits=INFINITE_BITS,
                                      p_s=1.0, p_r=1.0, e_s=1.0, e_r=1.0)
    prof_one = LargeScaleProfile.from_gains([0.5, 0.2], [0.3, 0.7])
    np.testing.assert_array_equal(rate.gap_factor_low_es(prof_one, cfg_one), 1.0)
    np.testing.assert_array_equal(rate.gap_factor_low_er(prof_one, cfg_one), 1.0)


@pytest.fixture(scope="module")
def allocation_campaign():
    """Optimize 50 seeded user drops (128 pairs, 10 user pairs, 2-bit
    converters, total budget 10) against the uniform benchmark split."""
    cfg = SystemConfig.from_kappa(M=128, kappa=0.5, K=10, bits=2,
                                  p_s=1.0, p_r=1.0)
    margins = []
    fires = []
    for seed in range(50):
        prof = drop_users(seed, 10)
        _, _, uniform = uniform_allocation(prof, cfg, 10.0)
        try:
            result = allocate(prof, cfg, 10.0)
        except NonMonotoneError as exc:
            fires.append((seed, str(exc)))
            continue
        margins.append((seed, result.sum_rate - uniform))
    return {"margins": margins, "fires": fires}


def test_06a_optimized_allocation_beats_uniform_on_all_seeds(allocation_campaign):
    """Optimized powers never lose to the uniform split on any of the 50
    seeded instances."""
    losses = [(s, m) for s, m in allocation_campaign["margins"] if m < 0.0]
    ran = len(allocation_campaign["margins"]) + len(allocation_campaign["fires"])
    assert ran == 50
    assert not losses, f"uniform beat the optimizer on {losses}"


def test_06b_single_pair_allocation_matches_grid_search():
    """With one user pair the optimizer lands within 1e-2 bit/s/Hz of a
    dense 2-D brute-force grid over the two powers."""
    prof = LargeScaleProfile.from_gains([0.42], [0.77])
    cfg = SystemConfig.from_kappa(M=128, kappa=0.5, K=1, bits=2,
                                  p_s=1.0, p_r=1.0)
    result = allocate(prof, cfg, 10.0)
    co = rate.compact_coefficients(prof, cfg)
    a, b = co.a[0, 0], co.b[0, 0]
    c, d = co.c[0], co.d[0]
    axis = np.linspace(10.0 / 2001, 10.0, 2001)
    ps, pr = np.meshgrid(axis, axis, indexing="ij")
    sinr = ps / (a * ps + (b * ps + c) / pr + d)
    value = np.where(ps + pr <= 10.0, 0.45 * np.log2(1.0 + sinr), -np.inf)
    best_grid = float(value.max())
    assert abs(result.sum_rate - best_grid) <= 1e-2, \
        f"optimizer {result.sum_rate:.9f} vs grid {best_grid:.9f}"


def test_06c_monotone_ascent_assertion_never_fires(allocation_campaign):
    """No instance of the campaign tripped the non-decreasing-objective
    guard inside the successive approximation loop."""
    assert allocation_campaign["fires"] == []


def test_07_gp_solver_matches_grid_oracle():
    """On 20 random bounded programs the interior-point objective agrees
    with a zooming grid-search oracle within 1%."""
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(20):
        gp, lo, hi = random_gp(rng)
        oracle = grid_search_gp(gp, lo, hi)
        sol = solve_gp(gp, tol=1e-9)
        worst = max(worst, abs(sol.objective - oracle) / oracle)
    assert worst <= 1e-2, f"worst objective deviation {worst:.3e}"


def test_08a_all_low_res_energy_efficiency_dominates():
    """An all-low-resolution array is at least as energy efficient as an
    all-high-resolution one at every low-side width from 1 to 12 bits."""
    prof = LargeScaleProfile.from_gains([0.8, 0.5, 0.3, 0.15, 0.09],
                                        [0.6, 0.9, 0.2, 0.4, 0.12])
    bad = []
    for bits in range(1, 13):
        cfg0 = SystemConfig.from_kappa(M=128, kappa=0.0, K=5, bits=bits,
                                       p_s=10.0, p_r=10.0)
        cfg1 = SystemConfig.from_kappa(M=128, kappa=1.0, K=5, bits=bits,
                                       p_s=10.0, p_r=10.0)
        margin = energy_efficiency(prof, cfg0) - energy_efficiency(prof, cfg1)
        if margin < 0.0:
            bad.append((bits, margin))
    assert not bad, f"all-low-res lost at (bits, efficiency margin): {bad}"


def test_08b_power_breakdown_audit_exact():
    """The reported component groups reproduce an independent hand count
    of every front-end block, and their sum is the reported total."""
    model = PowerModel()
    cfg = SystemConfig.from_kappa(M=128, kappa=0.25, K=5, bits=3,
                                  p_s=10.0, p_r=10.0)
    bd = power_breakdown(cfg, model)
    m, m0, m1 = 128, 32, 96
    assert bd.rf_chain == m * (model.p_mix + model.p_filt) \
        + m * (model.p_lna + model.p_mix + model.p_ifa + model.p_filr)
    assert bd.synthesizers == 2.0 * model.p_syn
    assert bd.agc == (m0 * model.p_agc + m1 * 1 * model.p_agc) * 2.0
    assert bd.adc == m0 * p_adc(12, model) + m1 * p_adc(3, model)
    assert bd.dac == m0 * p_dac(12, model) + m1 * p_dac(3, model)
    one_bit = power_breakdown(cfg, model, bits_low=1)
    assert one_bit.agc == (m0 * model.p_agc + 0) * 2.0
    assert bd.total == bd.rf_chain + bd.synthesizers + bd.agc + bd.adc + bd.dac


def test_08c_adc_power_ratio_twelve_to_one_bit():
    """The converter power law prices twelve bits against one bit at
    exactly 10**1.6775."""
    assert p_adc(12) / p_adc(1) == pytest.approx(10.0 ** 1.6775, rel=1e-9)


def test_09_rate_monotone_in_resolution_and_near_ideal_at_three_bits():
    """More converter bits never hurt the rate, and three bits recover at
    least 90% of the unquantized rate on a 128-pair, 10-pair-user system."""
    prof = LargeScaleProfile.from_gains(10 ** np.linspace(-1.0, 0.2, 10),
                                        10 ** np.linspace(0.1, -0.9, 10))
    for kappa in (0.0, 0.5, 1.0):
        rates = []
        for bits in [1, 2, 3, 4, 5, 6, 7, 8, INFINITE_BITS]:
            cfg = SystemConfig.from_kappa(M=128, kappa=kappa, K=10, bits=bits,
                                          p_s=10.0, p_r=10.0)
            rates.append(rate.exact_rate(prof, cfg).sum_rate)
        assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:])), \
            f"rate decreased in bits at kappa={kappa}: {rates}"
        assert rates[2] / rates[-1] >= 0.90, \
            f"3-bit rate only {rates[2] / rates[-1]:.4f} of ideal at kappa={kappa}"
