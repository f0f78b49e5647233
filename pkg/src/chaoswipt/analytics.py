"""Closed-form performance results: BER, optimal reference length, harvest.

Everything here is deterministic given its inputs except
ber_fading_semi_analytic, which averages the conditional BER over sampled
channel gains because the density of the effective array gain Lambda has
no tractable closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np
from scipy.special import erfc

from .chaos import TransmitConfig, WaveformParams, bit_energy
from .channel import ChannelProfile, LinkGeometry, nakagami_moment, path_loss, sample_link_realization
from .ris import lambda_awgn, lambda_fading, phase_error_sample

if TYPE_CHECKING:  # structural dependency only; no runtime import cycle
    from .config import SystemConfig


@dataclass(frozen=True)
class EhCircuitParams:
    """Nonlinear rectifier constants of one energy-harvesting unit.

    nu1: linear rectifier coefficient.
    nu2: quartic rectifier coefficient.
    r_load: load resistance in ohms.
    """

    nu1: float
    nu2: float
    r_load: float

    def __post_init__(self) -> None:
        if min(self.nu1, self.nu2, self.r_load) <= 0:
            raise ValueError("nu1, nu2, r_load must be positive")


@dataclass(frozen=True)
class RegionPoint:
    """One evaluated waveform point of the SR-P_harv region."""

    phi: int
    zeta: int
    sr: float
    p_harv_watts: float
    feasible: bool


@dataclass(frozen=True)
class RegionReport:
    """Region sweep output: per-phi points plus interval endpoints.

    phi_a: smallest grid phi meeting sr >= 1 - ber0 (None if none does).
    phi_b: largest divisor of beta meeting sr >= 1 - ber0 (None likewise).
    phi_min_real: real-valued BER minimizer at the largest grid phi's SNR.
    """

    points: tuple[RegionPoint, ...]
    phi_a: int | None
    phi_b: int | None
    phi_min_real: float

    @property
    def feasible_points(self) -> tuple[RegionPoint, ...]:
        return tuple(p for p in self.points if p.feasible)


@dataclass(frozen=True)
class PlanEntry:
    """Feasibility of one (M, K) split in the partition plan."""

    m_it: int
    k_min: int
    k_available: int
    ber: float
    feasible: bool


def mu_coefficients(
    eh: EhCircuitParams, tx: TransmitConfig, geometry: LinkGeometry
) -> tuple[float, float]:
    """Per-link rectifier coefficients mu1, mu2.

    mu1 = nu1 * P_t * C0 * d_sr^(-alpha_sr); mu2 = nu2 * (same factor)^2.
    Only the Tx-RIS hop enters: the EH section absorbs at the surface.
    """
    g = tx.p_t * path_loss(geometry.c0, geometry.d_sr, geometry.alpha_sr)
    return eh.nu1 * g, eh.nu2 * g * g


def gamma0(
    tx: TransmitConfig,
    geometry: LinkGeometry,
    params: WaveformParams,
    n0: float,
) -> float:
    """Average SNR per bit: E_b * C0^2 * d_sr^-a_sr * d_rd^-a_rd / N0."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    e_b = bit_energy(tx, params)
    g_sr = path_loss(geometry.c0, geometry.d_sr, geometry.alpha_sr)
    g_rd = path_loss(geometry.c0, geometry.d_rd, geometry.alpha_rd)
    return e_b * g_sr * g_rd / n0


def psi(phi: float, beta: float, gamma0_val: float, lam: float) -> float:
    """BER argument Psi(phi) = (1+z)^2/(g z L) + (b+phi)^2/(2 b g^2 L^2), z = b/phi.

    Continuous in phi; the conditional BER is erfc(Psi^-1/2)/2.
    """
    if phi <= 0 or beta <= 0 or gamma0_val <= 0 or lam <= 0:
        raise ValueError("phi, beta, gamma0, lambda must be positive")
    zeta = beta / phi
    t1 = (1.0 + zeta) ** 2 / (gamma0_val * zeta * lam)
    t2 = (beta + phi) ** 2 / (2.0 * beta * gamma0_val**2 * lam**2)
    return t1 + t2


def conditional_ber(lam: float, params: WaveformParams, gamma0_val: float) -> float:
    """BER conditioned on the effective array gain Lambda.

    Args:
        lam: effective array gain; nonpositive values mean no signal
            and return 1/2.
        params: waveform parameters.
        gamma0_val: average SNR per bit (linear).

    Returns:
        BER in (0, 1/2], via erfc of the inverse square root of Psi.
    """
    if gamma0_val <= 0:
        raise ValueError("gamma0 must be positive")
    if lam <= 0:
        return 0.5
    value = psi(float(params.phi), float(params.beta), gamma0_val, lam)
    return 0.5 * float(erfc(value**-0.5))


def ber_awgn(
    params: WaveformParams, gamma0_val: float, theta_e: Sequence[float]
) -> float:
    """AWGN BER for a given phase-error vector (Lambda = |sum e^{j theta}|^2)."""
    return conditional_ber(lambda_awgn(np.asarray(theta_e)), params, gamma0_val)


def phi_min(beta: float, gamma0_val: float, lam: float) -> float:
    """Real-valued BER-optimal reference length.

    phi_min = (gamma0 Lambda / 2) (sqrt(1 + 4 beta / (gamma0 Lambda)) - 1),
    the unique minimizer of Psi over phi > 0.
    """
    if beta <= 0 or gamma0_val <= 0 or lam <= 0:
        raise ValueError("beta, gamma0, lambda must be positive")
    gl = gamma0_val * lam
    return 0.5 * gl * (math.sqrt(1.0 + 4.0 * beta / gl) - 1.0)


def phi_feasible(beta: int, phi_real: float) -> int:
    """Divisor of beta nearest to phi_real; ties go to the smaller divisor."""
    if beta < 1 or phi_real <= 0:
        raise ValueError("beta must be >= 1 and phi_real positive")
    divisors = [d for d in range(1, beta + 1) if beta % d == 0]
    return min(divisors, key=lambda d: (abs(d - phi_real), d))


def chip_sum_moment2(params: WaveformParams) -> float:
    """E{S^2} of the frame chip sum S = (1 + zeta d) sum x: phi(1+zeta^2)/2."""
    return params.phi * (1.0 + params.zeta**2) / 2.0


def chip_sum_moment4(params: WaveformParams) -> float:
    """E{S^4}: (3 phi / 8)(1 + 6 zeta^2 + zeta^4)(2 phi - 1)."""
    z2 = params.zeta**2
    return 0.375 * params.phi * (1.0 + 6.0 * z2 + z2 * z2) * (2.0 * params.phi - 1.0)


def h_moment2(profile: ChannelProfile) -> float:
    """E{H^2} of the amplitude sum H = sum_p alpha_p over Tx-RIS taps.

    Equals 1 + 2 sum_{p1<p2} E{alpha_p1} E{alpha_p2} since tap powers sum
    to one and taps fade independently.
    """
    cross = 0.0
    for p1 in range(profile.l_sr):
        for p2 in range(p1 + 1, profile.l_sr):
            cross += math.sqrt(profile.omega_sr[p1] * profile.omega_sr[p2])
    ratio = math.exp(math.lgamma(profile.m_s + 0.5) - math.lgamma(profile.m_s))
    return 1.0 + (2.0 / profile.m_s) * ratio**2 * cross


def compositions(l: int, total: int = 4) -> list[tuple[int, ...]]:
    """All length-l tuples of nonnegative integers summing to total."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if l == 1:
        return [(total,)]
    out: list[tuple[int, ...]] = []
    for head in range(total, -1, -1):
        for tail in compositions(l - 1, total - head):
            out.append((head,) + tail)
    return out


def h_moment4(profile: ChannelProfile) -> float:
    """E{H^4} via the multinomial expansion over tap-moment products."""
    total = 0.0
    for comp in compositions(profile.l_sr, 4):
        coeff = math.factorial(4)
        prod = 1.0
        for k_p, omega in zip(comp, profile.omega_sr):
            coeff //= math.factorial(k_p)
            prod *= nakagami_moment(profile.m_s, omega, k_p)
        total += coeff * prod
    return total


def upsilon(
    params: WaveformParams,
    profile: ChannelProfile,
    eh: EhCircuitParams,
    geometry: LinkGeometry,
    tx: TransmitConfig,
) -> float:
    """Harvest kernel Upsilon = (mu1 E{S^2} E{H^2} + mu2 E{S^4} E{H^4})^2."""
    mu1, mu2 = mu_coefficients(eh, tx, geometry)
    v_out = mu1 * chip_sum_moment2(params) * h_moment2(profile) + mu2 * chip_sum_moment4(
        params
    ) * h_moment4(profile)
    return v_out * v_out


def p_harv_analytic(k_eh: int, upsilon_val: float, r_load: float) -> float:
    """Harvested DC power K * Upsilon / R_L in watts."""
    if k_eh < 0:
        raise ValueError("k_eh must be nonnegative")
    if r_load <= 0:
        raise ValueError("r_load must be positive")
    return k_eh * upsilon_val / r_load


def p_harv_flat(
    k_eh: int,
    params: WaveformParams,
    eh: EhCircuitParams,
    m_s: float,
    geometry: LinkGeometry,
    tx: TransmitConfig,
) -> float:
    """Flat-fading harvested power closed form.

    P_harv = (K / R_L) [mu1 phi (1+zeta^2)/2
             + (3/8) mu2 phi (1+6 zeta^2+zeta^4)(2 phi - 1)(m_s+1)/m_s]^2.
    """
    if k_eh < 0:
        raise ValueError("k_eh must be nonnegative")
    mu1, mu2 = mu_coefficients(eh, tx, geometry)
    z2 = params.zeta**2
    linear = 0.5 * mu1 * params.phi * (1.0 + z2)
    quartic = (
        0.375
        * mu2
        * params.phi
        * (1.0 + 6.0 * z2 + z2 * z2)
        * (2.0 * params.phi - 1.0)
        * (m_s + 1.0)
        / m_s
    )
    return k_eh * (linear + quartic) ** 2 / eh.r_load


def k_min(e_req: float, upsilon_val: float, r_load: float) -> int:
    """Smallest integer K with K * Upsilon / R_L >= E_req / T-normalized need.

    Args:
        e_req: required energy in joules (power form when t_horizon = 1).
        upsilon_val: harvest kernel, must be positive for a finite answer.
        r_load: load resistance in ohms.

    Returns:
        ceil(R_L * E_req / Upsilon); 0 when e_req is 0.
    """
    if e_req < 0:
        raise ValueError("e_req must be nonnegative")
    if e_req == 0:
        return 0
    if upsilon_val <= 0:
        raise ValueError("upsilon must be positive for a finite K_min")
    return math.ceil(r_load * e_req / upsilon_val)


def ber_fading_semi_analytic(
    config: "SystemConfig",
    channel_draws: int,
    rng: np.random.Generator | int,
) -> float:
    """Channel-averaged BER: mean of conditional_ber over sampled Lambda.

    Evaluates the fading BER integral empirically; the Lambda density is
    never formed. Phase errors are redrawn per channel draw.

    Args:
        config: full system description (profile must be set).
        channel_draws: number of independent channel realizations.
        rng: numpy Generator, or an integer seed.

    Returns:
        Estimated BER in (0, 1/2].
    """
    if channel_draws < 1:
        raise ValueError("channel_draws must be >= 1")
    if config.profile is None:
        raise ValueError("semi-analytic BER needs a fading profile")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(rng))))
    params = config.waveform
    g0 = config.gamma0_value(params)
    m_it = config.ris.m_it
    total = 0.0
    for _ in range(channel_draws):
        theta_e = phase_error_sample(config.ris.phase_error_model, m_it, rng)
        realization = sample_link_realization(config.profile, m_it, rng)
        lam = lambda_fading(theta_e, realization, m_it)
        total += conditional_ber(lam, params, g0)
    return total / channel_draws


def _divisors(beta: int) -> list[int]:
    return [d for d in range(1, beta + 1) if beta % d == 0]


def _region_lambda(config: "SystemConfig") -> float:
    """Deterministic Lambda of the config's phase model (no fading)."""
    theta_e = phase_error_sample(
        config.ris.phase_error_model,
        config.ris.m_it,
        np.random.Generator(np.random.PCG64(0)),
    )
    return lambda_awgn(theta_e)


def _region_ber(
    config: "SystemConfig",
    params: WaveformParams,
    lam: float,
    mode: str,
    channel_draws: int,
) -> float:
    if mode == "awgn":
        return conditional_ber(lam, params, config.gamma0_value(params))
    if mode == "fading":
        sub = config.with_waveform(params)
        return ber_fading_semi_analytic(sub, channel_draws, config.seed)
    raise ValueError(f"unknown region mode {mode!r}")


def sr_pharv_region(
    config: "SystemConfig",
    ber0: float,
    phi_grid: Iterable[int] | None = None,
    mode: str = "awgn",
    channel_draws: int = 10_000,
) -> RegionReport:
    """Evaluate the SR-P_harv trade-off over a reference-length grid.

    For each grid phi: sr = 1 - BER(phi), p_harv from the harvest closed
    form with K EH elements, and feasibility per sr >= 1 - ber0 together
    with p_harv >= M P_inf + P_cont. The default grid is the divisors of
    beta not exceeding the BER-optimal phi_min (evaluated at each point's
    own SNR).

    Args:
        config: full system description (profile required for harvest).
        ber0: acceptable BER, in (0, 1/2).
        phi_grid: explicit divisor grid; None selects the default.
        mode: "awgn" uses the deterministic phase-model Lambda;
            "fading" averages conditional BER over channel draws.
        channel_draws: draw count for mode="fading".

    Returns:
        RegionReport with one RegionPoint per grid phi.
    """
    if not 0.0 < ber0 < 0.5:
        raise ValueError("ber0 must lie in (0, 1/2)")
    if config.profile is None:
        raise ValueError("region evaluation needs a fading profile for harvest")
    beta = config.waveform.beta
    lam = _region_lambda(config)
    power_floor = config.ris.m_it * config.budget.p_inf + config.budget.p_cont

    def phi_min_at(phi: int) -> float:
        params = WaveformParams.from_beta_phi(beta, phi)
        return phi_min(beta, config.gamma0_value(params), lam)

    if phi_grid is None:
        grid = [d for d in _divisors(beta) if d <= phi_min_at(d)]
    else:
        grid = sorted(set(int(p) for p in phi_grid))
        bad = [p for p in grid if p < 1 or beta % p != 0]
        if bad:
            raise ValueError(f"phi grid entries must divide beta={beta}: {bad}")

    sr_floor = 1.0 - ber0
    points = []
    for phi in grid:
        params = WaveformParams.from_beta_phi(beta, phi)
        ber = _region_ber(config, params, lam, mode, channel_draws)
        sr = 1.0 - ber
        p_harv = p_harv_analytic(
            config.ris.k_eh,
            upsilon(params, config.profile, config.eh, config.geometry, config.tx),
            config.eh.r_load,
        )
        feasible = sr >= sr_floor and p_harv >= power_floor
        points.append(
            RegionPoint(
                phi=phi, zeta=params.zeta, sr=sr, p_harv_watts=p_harv, feasible=feasible
            )
        )

    meeting = [p.phi for p in points if p.sr >= sr_floor]
    phi_a = min(meeting) if meeting else None
    # phi_b scans every divisor (the upper BER0 crossing sits beyond phi_min)
    phi_b = None
    for d in _divisors(beta):
        params = WaveformParams.from_beta_phi(beta, d)
        if 1.0 - _region_ber(config, params, lam, mode, channel_draws) >= sr_floor:
            phi_b = d
    phi_min_real = phi_min_at(max(grid)) if grid else phi_min_at(1)
    return RegionReport(
        points=tuple(points), phi_a=phi_a, phi_b=phi_b, phi_min_real=phi_min_real
    )


def plan_partition(config: "SystemConfig", ber0: float) -> list[PlanEntry]:
    """Feasibility report over every IT/EH split M in [0, N].

    For each M: K_min from the harvest bound with E_req = T(M P_inf +
    P_cont), BER at the phase model's Lambda (CommonPhase(0), the perfect
    CSI case, unless the config says otherwise); feasible iff K_min <=
    N - M and BER <= ber0.

    Args:
        config: full system description (profile required for harvest).
        ber0: acceptable BER, in (0, 1/2].

    Returns:
        One PlanEntry per M, ascending.
    """
    if not 0.0 < ber0 <= 0.5:
        raise ValueError("ber0 must lie in (0, 1/2]")
    if config.profile is None:
        raise ValueError("partition planning needs a fading profile for harvest")
    params = config.waveform
    ups = upsilon(params, config.profile, config.eh, config.geometry, config.tx)
    n = config.ris.n_total
    g0 = config.gamma0_value(params)
    entries = []
    for m_it in range(n + 1):
        e_req = config.budget.t_horizon * (
            m_it * config.budget.p_inf + config.budget.p_cont
        )
        need = k_min(e_req, ups, config.eh.r_load)
        if m_it == 0:
            ber = 0.5  # no IT elements, no signal
        else:
            rng = np.random.Generator(np.random.PCG64(0))
            theta_e = phase_error_sample(config.ris.phase_error_model, m_it, rng)
            ber = conditional_ber(lambda_awgn(theta_e), params, g0)
        feasible = need <= n - m_it and ber <= ber0
        entries.append(
            PlanEntry(
                m_it=m_it,
                k_min=need,
                k_available=n - m_it,
                ber=ber,
                feasible=feasible,
            )
        )
    return entries
