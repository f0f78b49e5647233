"""Closed-form BER, reference-length optimization, harvest moments, planning."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from chaoswipt.analytics import (
    EhCircuitParams,
    ber_awgn,
    ber_fading_semi_analytic,
    chip_sum_moment2,
    chip_sum_moment4,
    compositions,
    conditional_ber,
    gamma0,
    h_moment2,
    h_moment4,
    k_min,
    mu_coefficients,
    p_harv_analytic,
    p_harv_flat,
    phi_feasible,
    phi_min,
    plan_partition,
    psi,
    sr_pharv_region,
    upsilon,
)
from chaoswipt.channel import (
    ChannelProfile,
    LinkGeometry,
    nakagami_moment,
    sample_nakagami,
)
from chaoswipt.chaos import TransmitConfig, WaveformParams, generate_reference_batch
from chaoswipt.config import parse_config

GAMMA0_4DB = 10.0**0.4

_REGION_TEXT = """
channel.mode=fading
channel.m=4.0
waveform.beta=40
waveform.phi=20
ris.N=20
ris.M=16
noise.gamma0_db=4.0
"""


def _psi_hand(phi, beta, g0, lam):
    """Independent Psi evaluation straight from the two-term definition."""
    zeta = beta / phi
    return (1.0 + zeta) ** 2 / (g0 * zeta * lam) + (beta + phi) ** 2 / (
        2.0 * beta * g0**2 * lam**2
    )


# --- Psi and the conditional BER ---


def test_psi_hand_value():
    expected = _psi_hand(20.0, 40.0, GAMMA0_4DB, 4.0)
    assert psi(20.0, 40.0, GAMMA0_4DB, 4.0) == pytest.approx(expected, rel=1e-12)


def test_psi_validation():
    for args in [(0, 40, 1, 1), (20, 0, 1, 1), (20, 40, 0, 1), (20, 40, 1, 0)]:
        with pytest.raises(ValueError):
            psi(*args)


@pytest.mark.parametrize("lam", [1.0, 4.0, 9.0, 16.0])
@pytest.mark.parametrize("phi", [1, 8, 20, 40])
def test_conditional_ber_math_erfc_oracle(lam, phi):
    # independent oracle: stdlib erfc on the hand-built Psi
    params = WaveformParams.from_beta_phi(40, phi)
    expected = 0.5 * math.erfc(_psi_hand(phi, 40, GAMMA0_4DB, lam) ** -0.5)
    assert conditional_ber(lam, params, GAMMA0_4DB) == pytest.approx(
        expected, rel=1e-12
    )


def test_conditional_ber_no_signal_is_coin_flip():
    params = WaveformParams.from_beta_phi(40, 20)
    assert conditional_ber(0.0, params, GAMMA0_4DB) == 0.5
    assert conditional_ber(-3.0, params, GAMMA0_4DB) == 0.5


def test_conditional_ber_rejects_bad_gamma0():
    params = WaveformParams.from_beta_phi(40, 20)
    with pytest.raises(ValueError):
        conditional_ber(4.0, params, 0.0)


def test_ber_awgn_matches_conditional_ber():
    params = WaveformParams.from_beta_phi(40, 20)
    # aligned phases: Lambda = M^2; orthogonal pair: Lambda = 2
    assert ber_awgn(params, GAMMA0_4DB, [0.0, 0.0, 0.0]) == pytest.approx(
        conditional_ber(9.0, params, GAMMA0_4DB), rel=1e-12
    )
    assert ber_awgn(params, GAMMA0_4DB, [0.0, math.pi / 2]) == pytest.approx(
        conditional_ber(2.0, params, GAMMA0_4DB), rel=1e-12
    )


def test_ber_awgn_decreasing_in_snr():
    params = WaveformParams.from_beta_phi(40, 20)
    bers = [ber_awgn(params, g, [0.0, 0.0]) for g in np.linspace(0.5, 20.0, 12)]
    assert all(a > b for a, b in zip(bers, bers[1:]))


# --- reference-length optimization ---


@pytest.mark.parametrize(
    "beta,g0,lam",
    [
        (40.0, GAMMA0_4DB, 1.0),
        (40.0, GAMMA0_4DB, 4.0),
        (40.0, GAMMA0_4DB, 9.0),
        (40.0, GAMMA0_4DB, 16.0),
        (100.0, 10.0**1.6, 25.0),
        (17.0, 2.0, 3.0),
    ],
)
def test_phi_min_matches_numeric_minimizer(beta, g0, lam):
    # oracle: bounded scalar minimization of Psi over continuous phi
    numeric = minimize_scalar(
        lambda p: psi(p, beta, g0, lam),
        bounds=(1e-3, 10.0 * beta),
        method="bounded",
        options={"xatol": 1e-10},
    )
    assert phi_min(beta, g0, lam) == pytest.approx(numeric.x, rel=1e-6)


def test_phi_min_is_stationary_point():
    beta, g0, lam = 40.0, GAMMA0_4DB, 4.0
    opt = phi_min(beta, g0, lam)
    h = 1e-5 * opt
    d1 = (psi(opt + h, beta, g0, lam) - psi(opt - h, beta, g0, lam)) / (2 * h)
    d2 = (
        psi(opt + h, beta, g0, lam)
        - 2 * psi(opt, beta, g0, lam)
        + psi(opt - h, beta, g0, lam)
    ) / h**2
    assert abs(d1) < 1e-8 * psi(opt, beta, g0, lam) / opt
    assert d2 > 0


def test_phi_min_high_snr_gap_bound():
    # relative gap to beta shrinks like beta / (gamma0 Lambda) at high SNR
    beta = 40.0
    for gl in (100.0 * beta, 1000.0 * beta):
        opt = phi_min(beta, gl, 1.0)
        gap = (beta - opt) / beta
        assert 0.0 < gap <= 1.1 * beta / gl


@given(
    beta=st.integers(min_value=1, max_value=200),
    g0=st.floats(min_value=0.05, max_value=100.0),
    lam=st.floats(min_value=0.1, max_value=400.0),
)
def test_phi_min_below_beta_and_increasing_in_snr(beta, g0, lam):
    opt = phi_min(float(beta), g0, lam)
    assert 0.0 < opt < beta
    assert opt < phi_min(float(beta), 1.5 * g0, lam)


def test_phi_min_validation():
    for args in [(0.0, 1.0, 1.0), (40.0, 0.0, 1.0), (40.0, 1.0, 0.0)]:
        with pytest.raises(ValueError):
            phi_min(*args)


def test_phi_feasible_rounding():
    assert phi_feasible(40, 8.846) == 8
    assert phi_feasible(40, 15.644) == 20
    assert phi_feasible(40, 20.822) == 20
    assert phi_feasible(40, 24.753) == 20
    assert phi_feasible(40, 10.0) == 10
    assert phi_feasible(7, 6.9) == 7


def test_phi_feasible_tie_goes_to_smaller_divisor():
    # divisors of 12 around 2.5: |2.5-2| == |2.5-3|
    assert phi_feasible(12, 2.5) == 2


def test_phi_feasible_validation():
    with pytest.raises(ValueError):
        phi_feasible(0, 5.0)
    with pytest.raises(ValueError):
        phi_feasible(40, 0.0)


# --- SNR bookkeeping ---


def test_gamma0_hand_value():
    tx = TransmitConfig(p_t=2.0, t_c=1.0)
    geometry = LinkGeometry(c0=0.1, d_sr=2.0, d_rd=5.0, alpha_sr=1.0, alpha_rd=1.0)
    params = WaveformParams.from_beta_phi(40, 20)
    # E_b = 2 * 60 * 0.5 = 60; gains 0.05 and 0.02; N0 = 1e-3
    assert gamma0(tx, geometry, params, 1e-3) == pytest.approx(60.0, rel=1e-12)


def test_gamma0_rejects_bad_n0():
    tx = TransmitConfig(p_t=1.0)
    geometry = LinkGeometry(c0=0.1, d_sr=2.0, d_rd=5.0)
    with pytest.raises(ValueError):
        gamma0(tx, geometry, WaveformParams.from_beta_phi(40, 20), 0.0)


def test_mu_coefficients_hand_value():
    eh = EhCircuitParams(nu1=10.0, nu2=100.0, r_load=50.0)
    tx = TransmitConfig(p_t=2.0)
    geometry = LinkGeometry(c0=0.1, d_sr=2.0, d_rd=5.0, alpha_sr=1.0, alpha_rd=1.0)
    mu1, mu2 = mu_coefficients(eh, tx, geometry)
    # g = 2 * 0.1 / 2 = 0.1
    assert mu1 == pytest.approx(1.0, rel=1e-12)
    assert mu2 == pytest.approx(1.0, rel=1e-12)


# --- harvest moments ---


def test_chip_sum_moment_hand_values():
    params = WaveformParams.from_beta_phi(40, 10)
    assert chip_sum_moment2(params) == pytest.approx(85.0, rel=1e-12)
    assert chip_sum_moment4(params) == pytest.approx(25151.25, rel=1e-12)
    dcsk = WaveformParams.from_beta_phi(40, 40)
    assert chip_sum_moment2(dcsk) == pytest.approx(40.0, rel=1e-12)
    assert chip_sum_moment4(dcsk) == pytest.approx(9480.0, rel=1e-12)


def test_chip_sum_moments_match_sampling():
    # oracle: frame sums S = (1 + zeta d) sum(x) with chips drawn i.i.d.
    # from the arcsine invariant density, the ensemble the closed form uses
    params = WaveformParams.from_beta_phi(40, 10)
    rng = np.random.default_rng(7)
    refs = np.cos(np.pi * rng.random((400_000, params.phi)))
    bits = rng.choice([-1.0, 1.0], size=400_000)
    s = (1.0 + params.zeta * bits) * refs.sum(axis=1)
    assert np.mean(s**2) == pytest.approx(chip_sum_moment2(params), rel=0.02)
    assert np.mean(s**4) == pytest.approx(chip_sum_moment4(params), rel=0.03)


def test_chip_sum_moment4_orbit_excess():
    # a true map orbit adds (phi-1)/2 to E{(sum x)^4} through the adjacent
    # cubic correlation E{x^3 T(x)} = 1/8; the second moment is unchanged
    params = WaveformParams.from_beta_phi(40, 10)
    rng = np.random.default_rng(7)
    refs = generate_reference_batch(params.phi, 400_000, rng)
    bits = rng.choice([-1.0, 1.0], size=400_000)
    s = (1.0 + params.zeta * bits) * refs.sum(axis=1)
    z2 = params.zeta**2
    orbit_r4 = 0.375 * params.phi * (2 * params.phi - 1) + 0.5 * (params.phi - 1)
    expected = (1.0 + 6.0 * z2 + z2 * z2) * orbit_r4
    assert np.mean(s**2) == pytest.approx(chip_sum_moment2(params), rel=0.02)
    assert np.mean(s**4) == pytest.approx(expected, rel=0.03)


def test_compositions_counts():
    assert compositions(1) == [(4,)]
    assert len(compositions(2)) == 5
    assert len(compositions(3)) == 15
    for comp in compositions(3):
        assert sum(comp) == 4
        assert min(comp) >= 0
    with pytest.raises(ValueError):
        compositions(0)


def test_h_moment2_gamma_function_golden():
    # independent evaluation with plain math.gamma
    ratio = math.gamma(4.5) / math.gamma(4.0)
    for omegas in [(0.8, 0.2), (0.6, 0.4)]:
        profile = ChannelProfile.two_tap(4.0, omegas)
        expected = 1.0 + 0.5 * ratio**2 * math.sqrt(omegas[0] * omegas[1])
        assert h_moment2(profile) == pytest.approx(expected, rel=1e-12)
    assert h_moment2(ChannelProfile.flat(4.0)) == 1.0


def test_h_moment2_matches_sampling():
    profile = ChannelProfile.two_tap(4.0, (0.8, 0.2))
    rng = np.random.default_rng(11)
    h = sample_nakagami(4.0, 0.8, rng, 2_000_000) + sample_nakagami(
        4.0, 0.2, rng, 2_000_000
    )
    assert np.mean(h**2) == pytest.approx(h_moment2(profile), rel=5e-3)


def test_h_moment4_flat_is_single_tap_moment():
    for m in (1.0, 2.5, 4.0):
        assert h_moment4(ChannelProfile.flat(m)) == pytest.approx(
            nakagami_moment(m, 1.0, 4), rel=1e-12
        )


def test_h_moment4_matches_sampling():
    profile = ChannelProfile.two_tap(4.0, (0.8, 0.2))
    rng = np.random.default_rng(13)
    h = sample_nakagami(4.0, 0.8, rng, 2_000_000) + sample_nakagami(
        4.0, 0.2, rng, 2_000_000
    )
    assert np.mean(h**4) == pytest.approx(h_moment4(profile), rel=0.01)


def test_upsilon_is_squared_moment_combination():
    params = WaveformParams.from_beta_phi(40, 10)
    profile = ChannelProfile.two_tap(4.0, (0.8, 0.2))
    eh = EhCircuitParams(nu1=920.7, nu2=5.2e6, r_load=5000.0)
    tx = TransmitConfig(p_t=1.0)
    geometry = LinkGeometry(c0=10.0**-3.53, d_sr=8.0, d_rd=10.0)
    mu1, mu2 = mu_coefficients(eh, tx, geometry)
    v_out = mu1 * chip_sum_moment2(params) * h_moment2(profile) + mu2 * (
        chip_sum_moment4(params) * h_moment4(profile)
    )
    assert upsilon(params, profile, eh, geometry, tx) == pytest.approx(
        v_out**2, rel=1e-12
    )


def test_p_harv_flat_equals_kernel_form():
    # the specialized flat closed form is the kernel form at one tap
    rng = np.random.default_rng(17)
    for _ in range(20):
        phi = int(rng.choice([1, 2, 4, 5, 8, 10, 20, 40]))
        params = WaveformParams.from_beta_phi(40, phi)
        m_s = float(rng.uniform(0.5, 8.0))
        eh = EhCircuitParams(
            nu1=float(rng.uniform(1.0, 1e3)),
            nu2=float(rng.uniform(1.0, 1e7)),
            r_load=float(rng.uniform(10.0, 1e4)),
        )
        tx = TransmitConfig(p_t=float(rng.uniform(0.1, 2.0)))
        geometry = LinkGeometry(
            c0=float(rng.uniform(1e-4, 1e-2)),
            d_sr=float(rng.uniform(1.0, 20.0)),
            d_rd=float(rng.uniform(1.0, 20.0)),
        )
        k_eh = int(rng.integers(0, 50))
        kernel = upsilon(params, ChannelProfile.flat(m_s), eh, geometry, tx)
        assert p_harv_flat(k_eh, params, eh, m_s, geometry, tx) == pytest.approx(
            p_harv_analytic(k_eh, kernel, eh.r_load), rel=1e-12, abs=0.0
        )


def test_p_harv_analytic_arithmetic_and_validation():
    assert p_harv_analytic(10, 2.5, 5.0) == pytest.approx(5.0, rel=1e-12)
    assert p_harv_analytic(0, 2.5, 5.0) == 0.0
    with pytest.raises(ValueError):
        p_harv_analytic(-1, 2.5, 5.0)
    with pytest.raises(ValueError):
        p_harv_analytic(10, 2.5, 0.0)


def test_k_min_rounding():
    # ratio 50.14 -> 51; exact integer ratio stays put
    assert k_min(0.05014, 5.0, 5000.0) == 51
    assert k_min(0.05, 5.0, 5000.0) == 50
    assert k_min(0.0, 5.0, 5000.0) == 0
    with pytest.raises(ValueError):
        k_min(-1.0, 5.0, 5000.0)
    with pytest.raises(ValueError):
        k_min(1.0, 0.0, 5000.0)


# --- fading BER and planning ---


def test_ber_fading_semi_analytic_concentrates_at_large_shape():
    # m -> inf collapses every amplitude to 1, so the average equals the
    # deterministic aligned-phase BER
    config = parse_config(
        text=_REGION_TEXT,
        overrides=["channel.m=500000.0", "ris.M=3"],
    )
    params = config.waveform
    expected = conditional_ber(9.0, params, config.gamma0_value(params))
    result = ber_fading_semi_analytic(config, 400, 3)
    assert result == pytest.approx(expected, rel=1e-3)


def test_ber_fading_semi_analytic_validation():
    config = parse_config(text=_REGION_TEXT)
    with pytest.raises(ValueError):
        ber_fading_semi_analytic(config, 0, 1)
    awgn = parse_config(
        text="channel.mode=awgn\nnoise.gamma0_db=4.0\nwaveform.beta=40\nwaveform.phi=20\n"
    )
    with pytest.raises(ValueError):
        ber_fading_semi_analytic(awgn, 10, 1)


def test_region_default_grid_stops_at_phi_min():
    config = parse_config(text=_REGION_TEXT)
    report = sr_pharv_region(config, 0.4)
    # Lambda = 256 at M = 16, so phi_min ~ 37.8: every divisor but 40
    assert [p.phi for p in report.points] == [1, 2, 4, 5, 8, 10, 20]
    assert report.phi_min_real == pytest.approx(
        phi_min(40.0, config.gamma0_value(config.waveform), 256.0), rel=1e-12
    )
    assert report.phi_a == 1
    assert report.phi_b == 40


def test_region_points_are_consistent():
    config = parse_config(text=_REGION_TEXT)
    report = sr_pharv_region(config, 0.4)
    floor = config.ris.m_it * config.budget.p_inf + config.budget.p_cont
    for point in report.points:
        assert point.zeta * point.phi == 40
        params = WaveformParams.from_beta_phi(40, point.phi)
        expected_sr = 1.0 - conditional_ber(
            256.0, params, config.gamma0_value(params)
        )
        assert point.sr == pytest.approx(expected_sr, rel=1e-12)
        kernel = upsilon(params, config.profile, config.eh, config.geometry, config.tx)
        assert point.p_harv_watts == pytest.approx(
            p_harv_analytic(config.ris.k_eh, kernel, config.eh.r_load), rel=1e-12
        )
        assert point.feasible == (point.sr >= 0.6 and point.p_harv_watts >= floor)


def test_region_tradeoff_monotone_below_phi_min():
    # larger phi helps the BER up to phi_min and always costs harvest
    config = parse_config(text=_REGION_TEXT)
    report = sr_pharv_region(config, 0.4)
    srs = [p.sr for p in report.points]
    harvests = [p.p_harv_watts for p in report.points]
    assert all(a <= b for a, b in zip(srs, srs[1:]))
    assert all(a >= b for a, b in zip(harvests, harvests[1:]))


def test_region_validation():
    config = parse_config(text=_REGION_TEXT)
    with pytest.raises(ValueError):
        sr_pharv_region(config, 0.0)
    with pytest.raises(ValueError):
        sr_pharv_region(config, 0.5)
    with pytest.raises(ValueError):
        sr_pharv_region(config, 0.1, phi_grid=[3])
    awgn = parse_config(
        text="channel.mode=awgn\nnoise.gamma0_db=4.0\nwaveform.beta=40\nwaveform.phi=20\n"
    )
    with pytest.raises(ValueError):
        sr_pharv_region(awgn, 0.1)


def test_region_explicit_grid():
    config = parse_config(text=_REGION_TEXT)
    report = sr_pharv_region(config, 0.4, phi_grid=[40, 5, 1])
    assert [p.phi for p in report.points] == [1, 5, 40]


def test_plan_partition_zero_budget_feasible_set():
    # with no power draw, feasibility reduces to the BER constraint alone
    config = parse_config(
        text=_REGION_TEXT, overrides=["budget.p_inf=0.0", "budget.p_cont=0.0"]
    )
    entries = plan_partition(config, 0.1)
    assert len(entries) == config.ris.n_total + 1
    assert [e.m_it for e in entries] == list(range(config.ris.n_total + 1))
    assert entries[0].ber == 0.5 and not entries[0].feasible
    for entry in entries:
        assert entry.k_available == config.ris.n_total - entry.m_it
        assert entry.k_min == 0
        assert entry.feasible == (entry.m_it >= 2)


def test_plan_partition_default_budget_is_infeasible():
    # the default harvest kernel is far below 50 mW of continuous draw
    config = parse_config(text=_REGION_TEXT)
    entries = plan_partition(config, 0.1)
    assert all(not e.feasible for e in entries)
    assert all(
        a.k_min <= b.k_min for a, b in zip(entries, entries[1:])
    )  # E_req grows with M
    with pytest.raises(ValueError):
        plan_partition(config, 0.0)
