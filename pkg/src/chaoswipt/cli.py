"""Command line interface: preset sweeps, partition planning, region reports.

Presets reproduce the reference result set: fig2/fig3 (AWGN BER versus phi
across M and gamma0), fig4 (DCSK versus the phi-optimized waveform across
beta), fig5 (phi_min versus M for two phase models), fig6 (harvested power
versus phi across power profiles and d_sr), fig7 (SR / P_harv region
versus phi across beta and d_rd).  CSV bytes are a pure function of
(preset, trials, seed, overrides); wall-clock goes to stderr only.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytics import (
    conditional_ber,
    p_harv_analytic,
    phi_feasible,
    phi_min,
    plan_partition,
    sr_pharv_region,
    upsilon,
)
from .chaos import WaveformParams
from .config import ConfigError, SystemConfig, config_hash, parse_config
from .ris import RisPartition, lambda_awgn, phase_error_sample
from .simulate import simulate_ber, simulate_harvest

FIG7_BER0 = 0.1
FIG7_CHANNEL_DRAWS = 5_000

_COLUMNS = (
    "case",
    "sweep_value",
    "phi",
    "zeta",
    "ber_analytic",
    "ber_mc",
    "ber_mc_stderr",
    "p_harv_analytic",
    "p_harv_mc",
    "sr",
    "feasible",
    "phi_min_real",
    "phi_feasible",
    "seed",
)


@dataclass
class Row:
    """One CSV row; unset fields serialize as empty cells."""

    case: str
    sweep_value: float
    phi: int | None = None
    zeta: int | None = None
    ber_analytic: float | None = None
    ber_mc: float | None = None
    ber_mc_stderr: float | None = None
    p_harv_analytic: float | None = None
    p_harv_mc: float | None = None
    sr: float | None = None
    feasible: bool | None = None
    phi_min_real: float | None = None
    phi_feasible: int | None = None
    seed: int | None = None


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _divisors(beta: int) -> list[int]:
    return [d for d in range(1, beta + 1) if beta % d == 0]


def _model_lambda(config: SystemConfig, m_it: int) -> float:
    theta = phase_error_sample(
        config.ris.phase_error_model, m_it, np.random.Generator(np.random.PCG64(0))
    )
    return lambda_awgn(theta)


def _with_partition(config: SystemConfig, m_it: int) -> SystemConfig:
    ris = RisPartition(
        n_total=config.ris.n_total,
        m_it=m_it,
        k_eh=config.ris.n_total - m_it,
        phase_error_model=config.ris.phase_error_model,
    )
    return dataclasses.replace(config, ris=ris)


def _ber_rows(
    case: str,
    config: SystemConfig,
    sweep_params: list[tuple[float, WaveformParams]],
    workers: int,
) -> list[Row]:
    rows = []
    for sweep_value, params in sweep_params:
        cfg = config.with_waveform(params)
        lam = _model_lambda(cfg, cfg.ris.m_it)
        analytic = conditional_ber(lam, params, cfg.gamma0_value(params))
        estimate = simulate_ber(cfg, workers=workers)
        rows.append(
            Row(
                case=case,
                sweep_value=sweep_value,
                phi=params.phi,
                zeta=params.zeta,
                ber_analytic=analytic,
                ber_mc=estimate.ber,
                ber_mc_stderr=estimate.std_error,
                seed=cfg.seed,
            )
        )
    return rows


_FIG2_BASE = """
channel.mode=awgn
noise.gamma0_db=4.0
waveform.beta=40
waveform.phi=20
ris.phase_model=common
ris.phase_theta=0.0
"""

_FIG5_BASE = """
channel.mode=awgn
noise.gamma0_db=16.0
waveform.beta=40
waveform.phi=20
"""

_FIG6_BASE = """
channel.mode=fading
channel.m=4.0
waveform.beta=40
waveform.phi=20
ris.N=100
ris.M=80
noise.gamma0_db=4.0
"""

_FIG7_BASE = """
channel.mode=fading
channel.m=4.0
channel.omega_sr=0.8,0.2
channel.omega_rd=0.8,0.2
waveform.beta=40
waveform.phi=20
ris.N=100
ris.M=70
geometry.d_sr=8.0
noise.gamma0_db=none
noise.n0=1e-9
"""


def _run_fig2(overrides: list[str], workers: int):
    base = parse_config(text=_FIG2_BASE, overrides=overrides)
    beta = base.waveform.beta
    sweep = [
        (float(phi), WaveformParams.from_beta_phi(beta, phi))
        for phi in _divisors(beta)
    ]
    rows: list[Row] = []
    for m_it in (1, 2, 3, 4):
        rows += _ber_rows(f"M={m_it}", _with_partition(base, m_it), sweep, workers)
    return base, rows, _best_ber_summary(rows)


def _run_fig3(overrides: list[str], workers: int):
    base = parse_config(text=_FIG2_BASE, overrides=["ris.M=2"] + overrides)
    beta = base.waveform.beta
    sweep = [
        (float(phi), WaveformParams.from_beta_phi(beta, phi))
        for phi in _divisors(beta)
    ]
    rows: list[Row] = []
    for g_db in (0.0, 4.0, 8.0):
        cfg = dataclasses.replace(base, gamma0_db=g_db)
        rows += _ber_rows(f"gamma0_db={g_db:g}", cfg, sweep, workers)
    return base, rows, _best_ber_summary(rows)


def _run_fig4(overrides: list[str], workers: int):
    base = parse_config(text=_FIG2_BASE, overrides=overrides)
    rows: list[Row] = []
    for g_db, m_it in ((7.0, 2), (4.0, 5)):
        cfg = dataclasses.replace(_with_partition(base, m_it), gamma0_db=g_db)
        lam = _model_lambda(cfg, m_it)
        tag = f"gamma0_db={g_db:g},M={m_it}"
        for beta in range(10, 151, 10):
            dcsk = [(float(beta), WaveformParams.from_beta_phi(beta, beta))]
            rows += _ber_rows(f"dcsk,{tag}", cfg, dcsk, workers)
            params = WaveformParams.from_beta_phi(beta, beta)
            target = phi_min(beta, cfg.gamma0_value(params), lam)
            best_phi = phi_feasible(beta, target)
            proposed = [(float(beta), WaveformParams.from_beta_phi(beta, best_phi))]
            rows += _ber_rows(f"srdcsk,{tag}", cfg, proposed, workers)
    summary = _best_ber_summary(rows)
    for g_db, m_it in ((7.0, 2), (4.0, 5)):
        tag = f"gamma0_db={g_db:g},M={m_it}"
        by_beta = {
            r.sweep_value: r.ber_mc for r in rows if r.case == f"srdcsk,{tag}"
        }
        crossover = None
        for r in rows:
            if r.case == f"dcsk,{tag}" and by_beta[r.sweep_value] < r.ber_mc:
                crossover = r.sweep_value
                break
        summary[f"crossover_beta[{tag}]"] = crossover
    return base, rows, summary


def _run_fig5(overrides: list[str], workers: int):
    del workers  # closed-form only
    rows: list[Row] = []
    base = None
    for model in ("common", "orthogonal"):
        cfg = parse_config(
            text=_FIG5_BASE, overrides=[f"ris.phase_model={model}"] + overrides
        )
        base = base or cfg
        beta = cfg.waveform.beta
        for m_it in range(1, 9):
            lam = _model_lambda(cfg, m_it)
            params = WaveformParams.from_beta_phi(beta, beta)
            target = phi_min(beta, cfg.gamma0_value(params), lam)
            rows.append(
                Row(
                    case=f"phase={model}",
                    sweep_value=float(m_it),
                    phi_min_real=target,
                    phi_feasible=phi_feasible(beta, target),
                    seed=cfg.seed,
                )
            )
    return base, rows, {}


def _run_fig6(overrides: list[str], workers: int):
    profiles = ("1.0", "0.8,0.2", "0.6,0.4")
    rows: list[Row] = []
    base = None
    best: dict[str, object] = {}
    for omega in profiles:
        for d_sr in (8.0, 9.0):
            case_ov = [
                f"channel.omega_sr={omega}",
                f"channel.omega_rd={omega}",
                f"geometry.d_sr={d_sr!r}",
            ]
            cfg = parse_config(text=_FIG6_BASE, overrides=case_ov + overrides)
            base = base or cfg
            case = f"omega={omega},d_sr={d_sr:g}"
            for phi in _divisors(cfg.waveform.beta):
                params = WaveformParams.from_beta_phi(cfg.waveform.beta, phi)
                sub = cfg.with_waveform(params)
                ups = upsilon(params, sub.profile, sub.eh, sub.geometry, sub.tx)
                analytic = p_harv_analytic(sub.ris.k_eh, ups, sub.eh.r_load)
                estimate = simulate_harvest(sub, workers=workers)
                rows.append(
                    Row(
                        case=case,
                        sweep_value=float(phi),
                        phi=phi,
                        zeta=params.zeta,
                        p_harv_analytic=analytic,
                        p_harv_mc=estimate.p_harv_watts,
                        seed=sub.seed,
                    )
                )
            case_rows = [r for r in rows if r.case == case]
            top = max(case_rows, key=lambda r: r.p_harv_analytic)
            best[f"p_harv_best[{case}]"] = top.p_harv_analytic
            best[f"phi_best[{case}]"] = top.phi
    return base, rows, best


def _run_fig7(overrides: list[str], workers: int):
    del workers  # semi-analytic path is sequential
    rows: list[Row] = []
    base = None
    summary: dict[str, object] = {"ber0": FIG7_BER0}
    for beta in (40, 60):
        for d_rd in (10.0, 14.0):
            case_ov = [f"waveform.beta={beta}", f"geometry.d_rd={d_rd!r}"]
            cfg = parse_config(text=_FIG7_BASE, overrides=case_ov + overrides)
            base = base or cfg
            case = f"beta={beta},d_rd={d_rd:g}"
            report = sr_pharv_region(
                cfg, FIG7_BER0, mode="fading", channel_draws=FIG7_CHANNEL_DRAWS
            )
            for point in report.points:
                rows.append(
                    Row(
                        case=case,
                        sweep_value=float(point.phi),
                        phi=point.phi,
                        zeta=point.zeta,
                        p_harv_analytic=point.p_harv_watts,
                        sr=point.sr,
                        feasible=point.feasible,
                        phi_min_real=report.phi_min_real,
                        seed=cfg.seed,
                    )
                )
            summary[f"phi_a[{case}]"] = report.phi_a
            summary[f"phi_b[{case}]"] = report.phi_b
            summary[f"phi_min_real[{case}]"] = report.phi_min_real
            summary[f"feasible_points[{case}]"] = len(report.feasible_points)
    return base, rows, summary


def _best_ber_summary(rows: list[Row]) -> dict[str, object]:
    best: dict[str, object] = {}
    for case in dict.fromkeys(r.case for r in rows):
        top = min(
            (r for r in rows if r.case == case), key=lambda r: r.ber_analytic
        )
        best[f"ber_best[{case}]"] = top.ber_analytic
        best[f"phi_best[{case}]"] = top.phi
    return best


_PRESETS = {
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
}


def _write_csv(path: Path, rows: list[Row]) -> None:
    lines = [",".join(_COLUMNS)]
    for row in rows:
        cells = [_fmt(getattr(row, column)) for column in _COLUMNS]
        cells = [
            f'"{cell}"' if ("," in cell or '"' in cell) else cell for cell in cells
        ]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_run(args) -> int:
    overrides = list(args.override or [])
    if args.trials is not None:
        overrides.append(f"sim.trials={args.trials}")
    if args.seed is not None:
        overrides.append(f"sim.seed={args.seed}")
    started = time.monotonic()
    base, rows, highlights = _PRESETS[args.preset](overrides, args.workers)
    out = Path(args.out)
    _write_csv(out, rows)
    elapsed = time.monotonic() - started
    print(f"{args.preset}: {len(rows)} rows in {elapsed:.1f}s", file=sys.stderr)
    summary = {
        "preset": args.preset,
        "config_hash": config_hash(base),
        "seed": base.seed,
        "trials": base.trials,
        "rows": len(rows),
        "csv": str(out),
        "highlights": highlights,
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


def _cmd_plan(args) -> int:
    config = parse_config(path=args.config, overrides=args.override or [])
    entries = plan_partition(config, args.ber0)
    print("M     K_min  K_avail  BER           feasible")
    for e in entries:
        print(
            f"{e.m_it:<5d} {e.k_min:<6d} {e.k_available:<8d} "
            f"{e.ber:<13.6e} {'yes' if e.feasible else 'no'}"
        )
    feasible = [e.m_it for e in entries if e.feasible]
    if feasible:
        print(f"feasible M range: {min(feasible)}..{max(feasible)}")
        return 0
    print("no feasible partition")
    return 3


def _cmd_region(args) -> int:
    config = parse_config(path=args.config, overrides=args.override or [])
    phi_grid = None
    if args.phi_grid:
        phi_grid = [int(p) for p in args.phi_grid.split(",") if p.strip()]
    report = sr_pharv_region(
        config,
        args.ber0,
        phi_grid=phi_grid,
        mode="fading",
        channel_draws=args.channel_draws,
    )
    print("phi   zeta  SR         P_harv_W       feasible")
    for p in report.points:
        print(
            f"{p.phi:<5d} {p.zeta:<5d} {p.sr:<10.6f} "
            f"{p.p_harv_watts:<14.6e} {'yes' if p.feasible else 'no'}"
        )
    print(
        f"phi_a={report.phi_a} phi_b={report.phi_b} "
        f"phi_min_real={report.phi_min_real:.4f}"
    )
    if report.feasible_points:
        return 0
    print("region is empty")
    return 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoswipt",
        description="Chaotic-waveform SWIPT link analytics and simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset sweep and write CSV")
    run_p.add_argument("--preset", required=True, choices=sorted(_PRESETS))
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--override", action="append", metavar="KEY=VALUE")
    run_p.add_argument("--workers", type=int, default=1)

    plan_p = sub.add_parser("plan", help="feasibility of every IT/EH split")
    plan_p.add_argument("--config", default=None)
    plan_p.add_argument("--ber0", type=float, required=True)
    plan_p.add_argument("--override", action="append", metavar="KEY=VALUE")

    region_p = sub.add_parser("region", help="SR / P_harv trade-off report")
    region_p.add_argument("--config", default=None)
    region_p.add_argument("--ber0", type=float, required=True)
    region_p.add_argument("--override", action="append", metavar="KEY=VALUE")
    region_p.add_argument("--channel-draws", type=int, default=10_000)
    region_p.add_argument("--phi-grid", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handlers = {"run": _cmd_run, "plan": _cmd_plan, "region": _cmd_region}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
