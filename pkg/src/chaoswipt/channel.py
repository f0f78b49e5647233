"""Nakagami-m frequency-selective channel sampling and exact moments.

Both hops (Tx-RIS and RIS-Rx) fade independently per tap and per RIS
element, with identical statistics across elements. Amplitudes are
Nakagami-m (sampled as the square root of a Gamma variate), phases are
i.i.d. uniform on [0, 2pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

POWER_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ChannelProfile:
    """Statistical description of both fading hops.

    l_sr / l_rd: tap counts of the Tx-RIS / RIS-Rx links.
    m_s / m_r: Nakagami shape parameters (>= 0.5; the model of record
        uses m >= 1, smaller values are for robustness testing).
    omega_sr / omega_rd: per-tap mean powers, each summing to one.
    """

    l_sr: int
    l_rd: int
    m_s: float
    m_r: float
    omega_sr: tuple[float, ...]
    omega_rd: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.l_sr < 1 or self.l_rd < 1:
            raise ValueError("tap counts must be >= 1")
        if self.m_s < 0.5 or self.m_r < 0.5:
            raise ValueError("Nakagami shape must be >= 0.5")
        if len(self.omega_sr) != self.l_sr or len(self.omega_rd) != self.l_rd:
            raise ValueError("tap-power vector length must match tap count")
        if any(w <= 0 for w in self.omega_sr) or any(w <= 0 for w in self.omega_rd):
            raise ValueError("tap powers must be positive")
        if abs(sum(self.omega_sr) - 1.0) > POWER_SUM_TOL:
            raise ValueError(f"omega_sr must sum to 1, got {sum(self.omega_sr)}")
        if abs(sum(self.omega_rd) - 1.0) > POWER_SUM_TOL:
            raise ValueError(f"omega_rd must sum to 1, got {sum(self.omega_rd)}")

    @classmethod
    def flat(cls, m: float) -> "ChannelProfile":
        """Single-tap (flat fading) profile with equal shape on both hops."""
        return cls(l_sr=1, l_rd=1, m_s=m, m_r=m, omega_sr=(1.0,), omega_rd=(1.0,))

    @classmethod
    def two_tap(
        cls, m: float, omega: tuple[float, float] = (0.8, 0.2)
    ) -> "ChannelProfile":
        """Two-tap profile with identical power split on both hops."""
        return cls(l_sr=2, l_rd=2, m_s=m, m_r=m, omega_sr=omega, omega_rd=omega)


@dataclass(frozen=True)
class LinkGeometry:
    """Path-loss geometry of the two hops.

    c0: pathloss at one meter (linear).
    d_sr / d_rd: hop distances in meters.
    alpha_sr / alpha_rd: path-loss exponents.
    """

    c0: float
    d_sr: float
    d_rd: float
    alpha_sr: float = 3.0
    alpha_rd: float = 3.0

    def __post_init__(self) -> None:
        if min(self.c0, self.d_sr, self.d_rd, self.alpha_sr, self.alpha_rd) <= 0:
            raise ValueError("all geometry fields must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """One sampled draw of every fading coefficient.

    alpha: Tx-RIS tap amplitudes, shape (l_sr, n_elements).
    theta_h: matching phases in [0, 2pi).
    beta_amp: RIS-Rx tap amplitudes, shape (n_elements, l_rd).
    theta_g: matching phases in [0, 2pi).
    """

    alpha: np.ndarray
    theta_h: np.ndarray
    beta_amp: np.ndarray
    theta_g: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.alpha.shape[1]


def sample_nakagami(
    m: float,
    omega: float,
    rng: np.random.Generator,
    size: int | tuple[int, ...] | None = None,
) -> float | np.ndarray:
    """Draw Nakagami-m amplitudes via sqrt of a Gamma(m, omega/m) variate.

    Args:
        m: shape parameter, >= 0.5.
        omega: mean-square power E{alpha^2}, > 0.
        rng: numpy Generator.
        size: optional output shape (scalar draw if None).

    Returns:
        Amplitude draw(s) with E{alpha^2} = omega.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if m < 0.5:
        raise ValueError("m must be >= 0.5")
    g = rng.gamma(shape=m, scale=omega / m, size=size)
    return np.sqrt(g)


def nakagami_moment(m: float, omega: float, n: int) -> float:
    """Exact n-th Nakagami moment E{alpha^n} = Gamma(m+n/2)/Gamma(m) (omega/m)^(n/2).

    Args:
        m: shape parameter.
        omega: mean-square power.
        n: nonnegative integer moment order.

    Returns:
        The closed-form moment.
    """
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    log_ratio = gammaln(m + n / 2.0) - gammaln(m)
    return float(np.exp(log_ratio) * (omega / m) ** (n / 2.0))


def path_loss(c0: float, d: float, alpha_exp: float) -> float:
    """Distance-power pathloss gain c0 * d^(-alpha_exp)."""
    if d <= 0:
        raise ValueError("distance must be positive")
    return c0 * d ** (-alpha_exp)


def sample_link_realization(
    profile: ChannelProfile, n_elements: int, rng: np.random.Generator
) -> ChannelRealization:
    """Sample all fading coefficients for n_elements RIS elements.

    Amplitudes are i.i.d. across elements with the per-tap powers of the
    profile; phases are i.i.d. uniform on [0, 2pi).

    Args:
        profile: channel statistics.
        n_elements: RIS element count, >= 1.
        rng: numpy Generator.

    Returns:
        A ChannelRealization with matrices sized by (taps, elements).
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    alpha = np.empty((profile.l_sr, n_elements))
    for p, w in enumerate(profile.omega_sr):
        alpha[p] = sample_nakagami(profile.m_s, w, rng, size=n_elements)
    beta_amp = np.empty((n_elements, profile.l_rd))
    for q, w in enumerate(profile.omega_rd):
        beta_amp[:, q] = sample_nakagami(profile.m_r, w, rng, size=n_elements)
    theta_h = rng.uniform(0.0, 2.0 * np.pi, size=(profile.l_sr, n_elements))
    theta_g = rng.uniform(0.0, 2.0 * np.pi, size=(n_elements, profile.l_rd))
    return ChannelRealization(
        alpha=alpha, theta_h=theta_h, beta_amp=beta_amp, theta_g=theta_g
    )
