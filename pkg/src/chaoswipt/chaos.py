"""Chebyshev chaotic chip sequences and DCSK / SR-DCSK frame assembly.

One transmit frame spreads a single bit d over phi + beta chips: a reference
segment of phi chaotic chips followed by zeta copies of d times that segment,
with beta = zeta * phi. zeta = 1 recovers classical DCSK.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Second moment of a Chebyshev chip under the invariant (arcsine) PDF.
CHIP_SECOND_MOMENT = 0.5
# Fourth moment under the same PDF.
CHIP_FOURTH_MOMENT = 0.375


@dataclass(frozen=True)
class WaveformParams:
    """Spreading-factor triple (beta, phi, zeta) of one SR-DCSK symbol.

    beta: spreading factor in chips (data portion length).
    phi: reference length in chips.
    zeta: number of data replicas; beta = zeta * phi exactly.
    """

    beta: int
    phi: int
    zeta: int

    def __post_init__(self) -> None:
        if self.beta < 1 or self.phi < 1 or self.zeta < 1:
            raise ValueError("beta, phi, zeta must be positive integers")
        if self.beta != self.zeta * self.phi:
            raise ValueError(
                f"beta must equal zeta*phi (got beta={self.beta}, "
                f"zeta={self.zeta}, phi={self.phi})"
            )

    @classmethod
    def from_beta_phi(cls, beta: int, phi: int) -> "WaveformParams":
        """Build params from (beta, phi); phi must divide beta."""
        if phi < 1 or beta < 1 or beta % phi != 0:
            raise ValueError(f"phi={phi} must be a positive divisor of beta={beta}")
        return cls(beta=beta, phi=phi, zeta=beta // phi)

    @property
    def frame_length(self) -> int:
        """Total chips per symbol: phi + beta = phi(1 + zeta)."""
        return self.phi + self.beta


@dataclass(frozen=True)
class TransmitConfig:
    """Transmit-side constants entering the bit energy.

    p_t: transmit power in watts.
    t_c: chip duration in seconds (1 by default).
    chip_second_moment: E{x_k^2} of the chip ensemble (1/2 for Chebyshev).
    """

    p_t: float
    t_c: float = 1.0
    chip_second_moment: float = CHIP_SECOND_MOMENT

    def __post_init__(self) -> None:
        if self.p_t <= 0:
            raise ValueError("p_t must be positive")
        if self.t_c <= 0:
            raise ValueError("t_c must be positive")
        if self.chip_second_moment <= 0:
            raise ValueError("chip_second_moment must be positive")


@dataclass(frozen=True)
class ChaoticFrame:
    """One assembled SR-DCSK symbol.

    reference: phi chips in (-1, 1).
    data_blocks: zeta blocks, each bit * reference.
    bit: the information symbol, +1 or -1.
    """

    reference: np.ndarray
    data_blocks: np.ndarray  # shape (zeta, phi)
    bit: int

    @property
    def chips(self) -> np.ndarray:
        """Flat chip vector [reference | data blocks], length phi(1+zeta)."""
        return np.concatenate([self.reference, self.data_blocks.ravel()])


def chebyshev_next(x: float) -> float:
    """One Chebyshev-map iteration x -> 4x^3 - 3x.

    Args:
        x: current state, must lie in [-1, 1].

    Returns:
        Next state, again in [-1, 1].
    """
    if abs(x) > 1.0:
        raise ValueError(f"Chebyshev state must lie in [-1, 1], got {x}")
    return 4.0 * x**3 - 3.0 * x


def generate_reference(phi: int, rng: np.random.Generator) -> np.ndarray:
    """Generate phi chaotic chips from a stationary initial condition.

    x0 = cos(pi*u) with u uniform on (0,1) samples the invariant PDF
    directly, so no burn-in is needed and the fixed points {-1, 0, 1}
    have probability zero.

    Args:
        phi: number of chips, >= 1.
        rng: numpy Generator supplying the initial condition.

    Returns:
        Array of phi chips in (-1, 1).
    """
    if phi < 1:
        raise ValueError("phi must be >= 1")
    u = rng.uniform(0.0, 1.0)
    while u == 0.0:  # guard the measure-zero endpoint
        u = rng.uniform(0.0, 1.0)
    x = np.cos(np.pi * u)
    chips = np.empty(phi)
    for k in range(phi):
        chips[k] = x
        x = 4.0 * x**3 - 3.0 * x
        # floating error can push |x| past 1; clamp to the map's domain
        if x > 1.0:
            x = 1.0
        elif x < -1.0:
            x = -1.0
    return chips


def generate_reference_batch(
    phi: int, n_frames: int, rng: np.random.Generator
) -> np.ndarray:
    """Generate n_frames independent reference sequences at once.

    Vectorized across frames: each row starts from its own invariant-PDF
    initial condition and iterates the map phi-1 times.

    Args:
        phi: chips per sequence.
        n_frames: number of independent sequences.
        rng: numpy Generator.

    Returns:
        Array of shape (n_frames, phi).
    """
    if phi < 1 or n_frames < 1:
        raise ValueError("phi and n_frames must be >= 1")
    u = rng.uniform(0.0, 1.0, size=n_frames)
    x = np.cos(np.pi * u)
    chips = np.empty((n_frames, phi))
    for k in range(phi):
        chips[:, k] = x
        x = 4.0 * x**3 - 3.0 * x
        np.clip(x, -1.0, 1.0, out=x)
    return chips


def build_frame(
    params: WaveformParams, bit: int, reference: np.ndarray
) -> ChaoticFrame:
    """Assemble the SR-DCSK frame [reference | bit*reference repeated zeta times].

    Args:
        params: waveform parameters; reference length must equal params.phi.
        bit: information symbol, +1 or -1.
        reference: the phi reference chips.

    Returns:
        The assembled ChaoticFrame.
    """
    reference = np.asarray(reference, dtype=float)
    if reference.shape != (params.phi,):
        raise ValueError(
            f"reference length {reference.shape} does not match phi={params.phi}"
        )
    if bit not in (-1, 1):
        raise ValueError(f"bit must be +1 or -1, got {bit}")
    data_blocks = np.tile(bit * reference, (params.zeta, 1))
    return ChaoticFrame(reference=reference, data_blocks=data_blocks, bit=bit)


def bit_energy(tx: TransmitConfig, params: WaveformParams) -> float:
    """Transmitted energy per bit: P_t * T_c * (beta + phi) * E{x^2}."""
    return tx.p_t * tx.t_c * (params.beta + params.phi) * tx.chip_second_moment
