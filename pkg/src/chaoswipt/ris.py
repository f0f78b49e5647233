"""Partitioned RIS model: IT/EH split, phase errors, array gain, power budget.

The surface has N elements; the first M reflect with unit-magnitude
coefficients (information transfer), the remaining K = N - M absorb fully
(energy harvesting). Imperfect phase control at the IT elements leaves a
residual phase error theta_e per element, which drives the effective array
gain Lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .channel import ChannelRealization


@dataclass(frozen=True)
class CommonPhase:
    """All IT elements share one residual phase (theta=0 is perfect CSI)."""

    theta: float = 0.0


@dataclass(frozen=True)
class OrthogonalPairs:
    """Consecutive elements differ by pi/2, the Lambda = M worst pairing."""


@dataclass(frozen=True)
class UniformRandom:
    """I.i.d. phase errors uniform on [0, 2pi), for stress testing."""


@dataclass(frozen=True)
class ExplicitVector:
    """Caller-supplied phase-error vector, passed through unchanged."""

    theta_e: tuple[float, ...]


PhaseErrorModel = Union[CommonPhase, OrthogonalPairs, UniformRandom, ExplicitVector]


@dataclass(frozen=True)
class RisPartition:
    """Element split of the RIS.

    n_total: element count N.
    m_it: information-transfer elements M (reflecting, |coefficient| = 1).
    k_eh: energy-harvesting elements K = N - M (fully absorbing).
    phase_error_model: how residual IT phase errors are drawn.
    """

    n_total: int
    m_it: int
    k_eh: int
    phase_error_model: PhaseErrorModel = CommonPhase(0.0)

    def __post_init__(self) -> None:
        if self.n_total < 0 or self.m_it < 0 or self.k_eh < 0:
            raise ValueError("element counts must be nonnegative")
        if self.m_it + self.k_eh != self.n_total:
            raise ValueError(
                f"M + K must equal N (got {self.m_it}+{self.k_eh} != {self.n_total})"
            )


@dataclass(frozen=True)
class PowerBudget:
    """RIS operating budget.

    p_inf: per-IT-element power in watts.
    p_cont: controller power in watts.
    t_horizon: accounting duration in seconds (1 by default).
    """

    p_inf: float
    p_cont: float
    t_horizon: float = 1.0

    def __post_init__(self) -> None:
        if min(self.p_inf, self.p_cont) < 0:
            raise ValueError("budget powers must be nonnegative")
        if self.t_horizon <= 0:
            raise ValueError("t_horizon must be positive")


def partition(
    n_total: int,
    m_it: int,
    phase_error_model: PhaseErrorModel = CommonPhase(0.0),
) -> RisPartition:
    """Split N elements into M reflecting and K = N - M absorbing.

    Args:
        n_total: total element count.
        m_it: IT element count, 0 <= m_it <= n_total.
        phase_error_model: phase-error model for the IT section.

    Returns:
        The RisPartition.
    """
    if not 0 <= m_it <= n_total:
        raise ValueError(f"m_it must lie in [0, {n_total}], got {m_it}")
    return RisPartition(
        n_total=n_total,
        m_it=m_it,
        k_eh=n_total - m_it,
        phase_error_model=phase_error_model,
    )


def phase_error_sample(
    model: PhaseErrorModel, m_it: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw the length-M residual phase-error vector for one symbol.

    Args:
        model: phase-error model.
        m_it: IT element count, >= 1.
        rng: numpy Generator (consumed only by UniformRandom).

    Returns:
        Array of M phases.
    """
    if m_it < 1:
        raise ValueError("m_it must be >= 1")
    if isinstance(model, CommonPhase):
        return np.full(m_it, model.theta)
    if isinstance(model, OrthogonalPairs):
        return (np.arange(m_it) % 2) * (np.pi / 2.0)
    if isinstance(model, UniformRandom):
        return rng.uniform(0.0, 2.0 * np.pi, size=m_it)
    if isinstance(model, ExplicitVector):
        theta_e = np.asarray(model.theta_e, dtype=float)
        if theta_e.shape != (m_it,):
            raise ValueError(
                f"explicit phase vector length {theta_e.size} != m_it={m_it}"
            )
        return theta_e
    raise TypeError(f"unknown phase-error model {model!r}")


def lambda_awgn(theta_e: np.ndarray) -> float:
    """Effective array gain |sum_m exp(j theta_e_m)|^2 without fading.

    Equals M + 2 sum_{i<j} cos(theta_e_i - theta_e_j); ranges over [0, M^2]
    with the maximum at equal phases.

    Args:
        theta_e: phase-error vector, nonempty.

    Returns:
        Lambda in [0, M^2].
    """
    theta_e = np.asarray(theta_e, dtype=float)
    if theta_e.size == 0:
        raise ValueError("theta_e must be nonempty")
    return float(np.abs(np.exp(1j * theta_e).sum()) ** 2)


def lambda_fading(
    theta_e: np.ndarray, realization: ChannelRealization, m_it: int
) -> float:
    """Effective array gain under fading.

    Lambda = sum_p sum_q |sum_m exp(j theta_e_m) alpha_{p,m} beta_{m,q}|^2
    over the IT elements 1..M (positional split: the first M columns of the
    realization belong to the IT section).

    Args:
        theta_e: length-M phase-error vector.
        realization: sampled channel covering at least m_it elements.
        m_it: IT element count.

    Returns:
        Lambda >= 0.
    """
    theta_e = np.asarray(theta_e, dtype=float)
    if theta_e.shape != (m_it,):
        raise ValueError(f"theta_e length {theta_e.size} != m_it={m_it}")
    if realization.n_elements < m_it:
        raise ValueError(
            f"realization covers {realization.n_elements} elements, need {m_it}"
        )
    alpha = realization.alpha[:, :m_it]  # (l_sr, M)
    beta_amp = realization.beta_amp[:m_it, :]  # (M, l_rd)
    rot = np.exp(1j * theta_e)  # (M,)
    # composite per tap pair: C[p, q] = sum_m rot_m alpha_{p,m} beta_{m,q}
    composite = np.einsum("m,pm,mq->pq", rot, alpha, beta_amp)
    return float(np.sum(np.abs(composite) ** 2))


def composite_tap_gains(
    theta_e: np.ndarray, realization: ChannelRealization, m_it: int
) -> np.ndarray:
    """Per-tap-pair composite gains C_{p,q} = sum_m e^{j theta_e_m} alpha beta.

    lambda_fading is the squared Frobenius norm of this matrix.

    Args:
        theta_e: length-M phase-error vector.
        realization: sampled channel.
        m_it: IT element count.

    Returns:
        Complex matrix of shape (l_sr, l_rd).
    """
    theta_e = np.asarray(theta_e, dtype=float)
    if theta_e.shape != (m_it,):
        raise ValueError(f"theta_e length {theta_e.size} != m_it={m_it}")
    if realization.n_elements < m_it:
        raise ValueError(
            f"realization covers {realization.n_elements} elements, need {m_it}"
        )
    alpha = realization.alpha[:, :m_it]
    beta_amp = realization.beta_amp[:m_it, :]
    rot = np.exp(1j * theta_e)
    return np.einsum("m,pm,mq->pq", rot, alpha, beta_amp)


def energy_requirement(budget: PowerBudget, m_it: int) -> float:
    """RIS energy need over the horizon: T * (M * P_inf + P_cont) joules."""
    if m_it < 0:
        raise ValueError("m_it must be nonnegative")
    return budget.t_horizon * (m_it * budget.p_inf + budget.p_cont)


def power_requirement(budget: PowerBudget, m_it: int) -> float:
    """RIS power need M * P_inf + P_cont in watts (the region-test form)."""
    if m_it < 0:
        raise ValueError("m_it must be nonnegative")
    return m_it * budget.p_inf + budget.p_cont
