"""System configuration: flat dotted-key schema, parsing, canonical text form.

A configuration is a flat ``key=value`` listing (file lines or override
strings).  Missing keys take the defaults below, which reproduce the
reference operating point: P_t = 30 dBm, C0 = 10^-3.53, d_sr = 8 m,
d_rd = 10 m, alpha = 3, two-tap Nakagami fading with m = 4 and powers
(0.8, 0.2), N = 100 elements with M = 70 reflecting, beta = 40, phi = 20,
gamma0 = 4 dB.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .analytics import EhCircuitParams, gamma0
from .channel import ChannelProfile, LinkGeometry, path_loss
from .chaos import TransmitConfig, WaveformParams, bit_energy
from .ris import (
    CommonPhase,
    OrthogonalPairs,
    PhaseErrorModel,
    PowerBudget,
    RisPartition,
    UniformRandom,
)


class ConfigError(ValueError):
    """Invalid configuration.  Carries every violation found, not just one."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("\n".join(violations))
        self.violations = list(violations)


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("may not be NaN")
    return value


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [piece.strip() for piece in text.split(",")]
    values = tuple(_parse_float(piece) for piece in items if piece)
    if not values:
        raise ValueError("expected a comma-separated float list")
    return values


def _parse_opt_float(text: str) -> float | None:
    if text.strip().lower() == "none":
        return None
    return _parse_float(text)


def _parse_choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return value

    return parse


# Schema: key -> (parser, default literal).  Insertion order is the canonical
# serialization order.
_SCHEMA: dict[str, tuple[Callable[[str], object], str]] = {
    "waveform.beta": (_parse_int, "40"),
    "waveform.phi": (_parse_int, "20"),
    "tx.p_t_dbm": (_parse_float, "30.0"),
    "tx.p_t_watts": (_parse_opt_float, "none"),
    "tx.t_c": (_parse_float, "1.0"),
    "geometry.c0": (_parse_float, repr(10.0**-3.53)),
    "geometry.d_sr": (_parse_float, "8.0"),
    "geometry.d_rd": (_parse_float, "10.0"),
    "geometry.alpha_sr": (_parse_float, "3.0"),
    "geometry.alpha_rd": (_parse_float, "3.0"),
    "channel.mode": (_parse_choice(("awgn", "fading")), "fading"),
    "channel.m": (_parse_float, "4.0"),
    "channel.m_s": (_parse_opt_float, "none"),
    "channel.m_r": (_parse_opt_float, "none"),
    "channel.omega_sr": (_parse_float_list, "0.8,0.2"),
    "channel.omega_rd": (_parse_float_list, "0.8,0.2"),
    "ris.N": (_parse_int, "100"),
    "ris.M": (_parse_int, "70"),
    "ris.phase_model": (_parse_choice(("common", "orthogonal", "uniform")), "common"),
    "ris.phase_theta": (_parse_float, "0.0"),
    "eh.nu1": (_parse_float, "920.7"),
    "eh.nu2": (_parse_float, "5200000.0"),
    "eh.r_load": (_parse_float, "5000.0"),
    "budget.p_inf": (_parse_float, "2e-06"),
    "budget.p_cont": (_parse_float, "0.05"),
    "budget.t": (_parse_float, "1.0"),
    "noise.gamma0_db": (_parse_opt_float, "4.0"),
    "noise.n0": (_parse_opt_float, "none"),
    "sim.trials": (_parse_int, "100000"),
    "sim.symbols": (_parse_int, "100000"),
    "sim.seed": (_parse_int, "20260821"),
}


@dataclass(frozen=True)
class SystemConfig:
    """One fully resolved operating point.

    noise is specified either as gamma0_db (average SNR per bit, fixed
    across waveforms: N0 is re-derived per phi) or as n0 (noise PSD in
    watts per hertz, fixed across waveforms: gamma0 then varies with phi).
    gamma0_db wins when both are set.  profile is None in AWGN mode.
    """

    waveform: WaveformParams
    tx: TransmitConfig
    geometry: LinkGeometry
    profile: ChannelProfile | None
    ris: RisPartition
    eh: EhCircuitParams
    budget: PowerBudget
    gamma0_db: float | None
    n0: float | None
    trials: int
    symbols: int
    seed: int

    @property
    def mode(self) -> str:
        return "awgn" if self.profile is None else "fading"

    def cascade_gain(self) -> float:
        """Two-hop power gain C0^2 d_sr^-a_sr d_rd^-a_rd."""
        g_sr = path_loss(self.geometry.c0, self.geometry.d_sr, self.geometry.alpha_sr)
        g_rd = path_loss(self.geometry.c0, self.geometry.d_rd, self.geometry.alpha_rd)
        return g_sr * g_rd

    def delta_value(self) -> float:
        """Cascade amplitude delta = sqrt(P_t C0^2 d_sr^-a_sr d_rd^-a_rd)."""
        return math.sqrt(self.tx.p_t * self.cascade_gain())

    def gamma0_value(self, params: WaveformParams | None = None) -> float:
        """Linear average SNR per bit for the given (default: own) waveform."""
        if self.gamma0_db is not None:
            return 10.0 ** (self.gamma0_db / 10.0)
        if self.n0 == 0.0:
            return math.inf
        return gamma0(self.tx, self.geometry, params or self.waveform, self.n0)

    def n0_value(self, params: WaveformParams | None = None) -> float:
        """Noise PSD consistent with the configured SNR convention."""
        if self.gamma0_db is None:
            return self.n0
        e_b = bit_energy(self.tx, params or self.waveform)
        return e_b * self.cascade_gain() / self.gamma0_value(params)

    def with_waveform(self, params: WaveformParams) -> "SystemConfig":
        return dataclasses.replace(self, waveform=params)

    def with_seed(self, seed: int) -> "SystemConfig":
        return dataclasses.replace(self, seed=seed)


def _parse_lines(text: str, origin: str, errors: list[str]) -> dict[str, str]:
    """Read key=value lines; '#' starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{origin}:{lineno}: expected key=value, got {line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            errors.append(f"{origin}:{lineno}: unknown key {key!r}")
            continue
        values[key] = value.strip()
    return values


def parse_config(
    path: str | Path | None = None,
    overrides: Iterable[str] = (),
    text: str | None = None,
) -> SystemConfig:
    """Build a SystemConfig from an optional file plus override strings.

    Args:
        path: config file of key=value lines, or None for pure defaults.
        overrides: extra "key=value" strings applied after the file.
        text: config body given directly (mutually exclusive with path).

    Returns:
        The resolved SystemConfig.

    Raises:
        ConfigError: listing every unknown key, parse failure, and
            constraint violation found.
    """
    if path is not None and text is not None:
        raise ValueError("pass either path or text, not both")
    errors: list[str] = []
    raw = dict()
    if path is not None:
        body = Path(path).read_text(encoding="utf-8")
        raw.update(_parse_lines(body, str(path), errors))
    elif text is not None:
        raw.update(_parse_lines(text, "<config>", errors))
    for item in overrides:
        if "=" not in item:
            errors.append(f"override: expected key=value, got {item!r}")
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            errors.append(f"override: unknown key {key!r}")
            continue
        raw[key] = value.strip()

    parsed: dict[str, object] = {}
    for key, (parser, default) in _SCHEMA.items():
        literal = raw.get(key, default)
        try:
            parsed[key] = parser(literal)
        except ValueError as exc:
            errors.append(f"{key}: {exc}")
            parsed[key] = None

    config = _assemble(parsed, errors)
    if errors:
        raise ConfigError(errors)
    return config


_OPTIONAL_KEYS = frozenset(
    {"tx.p_t_watts", "channel.m_s", "channel.m_r", "noise.gamma0_db", "noise.n0"}
)


def _assemble(parsed: dict[str, object], errors: list[str]) -> SystemConfig | None:
    """Construct components, translating constructor errors into key blame."""
    if any(parsed[key] is None and key not in _OPTIONAL_KEYS for key in parsed):
        # A required literal already failed to parse; component construction
        # would only cascade confusing errors.
        return None

    def attempt(label: str, build: Callable[[], object]) -> object | None:
        try:
            return build()
        except ValueError as exc:
            errors.append(f"{label}: {exc}")
            return None

    waveform = attempt(
        "waveform",
        lambda: WaveformParams.from_beta_phi(
            parsed["waveform.beta"], parsed["waveform.phi"]
        ),
    )

    p_t_watts = parsed["tx.p_t_watts"]
    if p_t_watts is None:
        p_t_watts = 10.0 ** ((parsed["tx.p_t_dbm"] - 30.0) / 10.0)
    tx = attempt("tx", lambda: TransmitConfig(p_t=p_t_watts, t_c=parsed["tx.t_c"]))

    geometry = attempt(
        "geometry",
        lambda: LinkGeometry(
            c0=parsed["geometry.c0"],
            d_sr=parsed["geometry.d_sr"],
            d_rd=parsed["geometry.d_rd"],
            alpha_sr=parsed["geometry.alpha_sr"],
            alpha_rd=parsed["geometry.alpha_rd"],
        ),
    )

    profile: ChannelProfile | None = None
    if parsed["channel.mode"] == "fading":
        m_s = parsed["channel.m_s"]
        m_r = parsed["channel.m_r"]
        m_s = parsed["channel.m"] if m_s is None else m_s
        m_r = parsed["channel.m"] if m_r is None else m_r
        omega_sr = parsed["channel.omega_sr"]
        omega_rd = parsed["channel.omega_rd"]
        profile = attempt(
            "channel",
            lambda: ChannelProfile(
                l_sr=len(omega_sr),
                l_rd=len(omega_rd),
                m_s=m_s,
                m_r=m_r,
                omega_sr=omega_sr,
                omega_rd=omega_rd,
            ),
        )

    model: PhaseErrorModel
    if parsed["ris.phase_model"] == "common":
        model = CommonPhase(parsed["ris.phase_theta"])
    elif parsed["ris.phase_model"] == "orthogonal":
        model = OrthogonalPairs()
    else:
        model = UniformRandom()
    ris = attempt(
        "ris",
        lambda: RisPartition(
            n_total=parsed["ris.N"],
            m_it=parsed["ris.M"],
            k_eh=parsed["ris.N"] - parsed["ris.M"],
            phase_error_model=model,
        ),
    )

    eh = attempt(
        "eh",
        lambda: EhCircuitParams(
            nu1=parsed["eh.nu1"], nu2=parsed["eh.nu2"], r_load=parsed["eh.r_load"]
        ),
    )
    budget = attempt(
        "budget",
        lambda: PowerBudget(
            p_inf=parsed["budget.p_inf"],
            p_cont=parsed["budget.p_cont"],
            t_horizon=parsed["budget.t"],
        ),
    )

    gamma0_db = parsed["noise.gamma0_db"]
    n0 = parsed["noise.n0"]
    if gamma0_db is None and n0 is None:
        errors.append("noise: one of noise.gamma0_db or noise.n0 is required")
    if n0 is not None and n0 < 0:
        errors.append("noise.n0: must be nonnegative")
        n0 = None

    trials = parsed["sim.trials"]
    symbols = parsed["sim.symbols"]
    seed = parsed["sim.seed"]
    if trials < 1:
        errors.append("sim.trials: must be at least 1")
    if symbols < 1:
        errors.append("sim.symbols: must be at least 1")
    if not 0 <= seed < 2**64:
        errors.append("sim.seed: must fit in an unsigned 64-bit integer")

    if errors:
        return None
    return SystemConfig(
        waveform=waveform,
        tx=tx,
        geometry=geometry,
        profile=profile,
        ris=ris,
        eh=eh,
        budget=budget,
        gamma0_db=gamma0_db,
        n0=n0,
        trials=trials,
        symbols=symbols,
        seed=seed,
    )


def serialize_config(config: SystemConfig) -> str:
    """Canonical key=value text.  parse_config(text=...) round-trips exactly."""
    model = config.ris.phase_error_model
    if isinstance(model, CommonPhase):
        model_name, theta = "common", model.theta
    elif isinstance(model, OrthogonalPairs):
        model_name, theta = "orthogonal", 0.0
    elif isinstance(model, UniformRandom):
        model_name, theta = "uniform", 0.0
    else:
        raise ValueError("explicit phase vectors have no flat-key form")

    lines = [
        f"waveform.beta={config.waveform.beta}",
        f"waveform.phi={config.waveform.phi}",
        f"tx.p_t_watts={config.tx.p_t!r}",
        f"tx.t_c={config.tx.t_c!r}",
        f"geometry.c0={config.geometry.c0!r}",
        f"geometry.d_sr={config.geometry.d_sr!r}",
        f"geometry.d_rd={config.geometry.d_rd!r}",
        f"geometry.alpha_sr={config.geometry.alpha_sr!r}",
        f"geometry.alpha_rd={config.geometry.alpha_rd!r}",
        f"channel.mode={config.mode}",
    ]
    if config.profile is not None:
        lines += [
            f"channel.m_s={config.profile.m_s!r}",
            f"channel.m_r={config.profile.m_r!r}",
            "channel.omega_sr=" + ",".join(repr(w) for w in config.profile.omega_sr),
            "channel.omega_rd=" + ",".join(repr(w) for w in config.profile.omega_rd),
        ]
    lines += [
        f"ris.N={config.ris.n_total}",
        f"ris.M={config.ris.m_it}",
        f"ris.phase_model={model_name}",
        f"ris.phase_theta={theta!r}",
        f"eh.nu1={config.eh.nu1!r}",
        f"eh.nu2={config.eh.nu2!r}",
        f"eh.r_load={config.eh.r_load!r}",
        f"budget.p_inf={config.budget.p_inf!r}",
        f"budget.p_cont={config.budget.p_cont!r}",
        f"budget.t={config.budget.t_horizon!r}",
        "noise.gamma0_db=" + ("none" if config.gamma0_db is None else repr(config.gamma0_db)),
        "noise.n0=" + ("none" if config.n0 is None else repr(config.n0)),
        f"sim.trials={config.trials}",
        f"sim.symbols={config.symbols}",
        f"sim.seed={config.seed}",
    ]
    return "\n".join(lines) + "\n"


def config_hash(config: SystemConfig) -> str:
    """SHA-256 of the canonical text; identifies the operating point."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()
