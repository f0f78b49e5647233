"""Chaotic-waveform link simulator and analytics for RIS-aided SWIPT."""

from .analytics import (
    EhCircuitParams,
    PlanEntry,
    RegionPoint,
    RegionReport,
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
from .channel import (
    ChannelProfile,
    ChannelRealization,
    LinkGeometry,
    nakagami_moment,
    path_loss,
    sample_link_realization,
    sample_nakagami,
)
from .chaos import (
    CHIP_FOURTH_MOMENT,
    CHIP_SECOND_MOMENT,
    ChaoticFrame,
    TransmitConfig,
    WaveformParams,
    bit_energy,
    build_frame,
    chebyshev_next,
    generate_reference,
    generate_reference_batch,
)
from .config import (
    ConfigError,
    SystemConfig,
    config_hash,
    parse_config,
    serialize_config,
)
from .ris import (
    CommonPhase,
    ExplicitVector,
    OrthogonalPairs,
    PowerBudget,
    RisPartition,
    UniformRandom,
    composite_tap_gains,
    energy_requirement,
    lambda_awgn,
    lambda_fading,
    partition,
    phase_error_sample,
    power_requirement,
)
from .simulate import (
    BerEstimate,
    HarvestEstimate,
    analog_correlate,
    decision_statistic,
    detect_bit,
    ehu_dc_voltage,
    received_symbol_at_rx,
    simulate_ber,
    simulate_decision_statistics,
    simulate_harvest,
)

__all__ = [
    "BerEstimate",
    "CHIP_FOURTH_MOMENT",
    "CHIP_SECOND_MOMENT",
    "ChannelProfile",
    "ChannelRealization",
    "ChaoticFrame",
    "CommonPhase",
    "ConfigError",
    "EhCircuitParams",
    "ExplicitVector",
    "HarvestEstimate",
    "LinkGeometry",
    "OrthogonalPairs",
    "PlanEntry",
    "PowerBudget",
    "RegionPoint",
    "RegionReport",
    "RisPartition",
    "SystemConfig",
    "TransmitConfig",
    "UniformRandom",
    "WaveformParams",
    "analog_correlate",
    "ber_awgn",
    "ber_fading_semi_analytic",
    "bit_energy",
    "build_frame",
    "chebyshev_next",
    "chip_sum_moment2",
    "chip_sum_moment4",
    "compositions",
    "composite_tap_gains",
    "conditional_ber",
    "config_hash",
    "decision_statistic",
    "detect_bit",
    "ehu_dc_voltage",
    "energy_requirement",
    "gamma0",
    "generate_reference",
    "generate_reference_batch",
    "h_moment2",
    "h_moment4",
    "k_min",
    "lambda_awgn",
    "lambda_fading",
    "mu_coefficients",
    "p_harv_analytic",
    "p_harv_flat",
    "parse_config",
    "partition",
    "path_loss",
    "phase_error_sample",
    "phi_feasible",
    "phi_min",
    "plan_partition",
    "power_requirement",
    "psi",
    "received_symbol_at_rx",
    "sample_link_realization",
    "sample_nakagami",
    "serialize_config",
    "simulate_ber",
    "simulate_decision_statistics",
    "simulate_harvest",
    "sr_pharv_region",
    "upsilon",
    "__version__",
]

__version__ = "0.1.0"
