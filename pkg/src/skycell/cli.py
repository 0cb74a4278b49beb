"""Command-line front end: eigenscore tables, campaigns, swarm-size sweeps.

Exit codes: 0 success, 2 usage/configuration error, 3 numerical failure.
Every invocation writes a manifest with the fully resolved configuration,
seed and output list; results are plot-ready CSV/JSON and existing files
are never overwritten (a ``-2``, ``-3``... suffix is appended instead).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import METRIC_NAMES, ScenarioConfig, config_as_dict, load_config
from .eigenscore import eigenscore_sweep
from .engine import CampaignStats, generate_drop_state, run_campaign, sweep_ccuavs
from .errors import CapacityError, ConfigurationError, SingularChannelError
from .geometry import Scenario, build_scenario

SUMMARY_SCHEMA_VERSION = 1
SPECTRUM_COLUMNS = 8


def versioned_path(path: Path) -> Path:
    """First non-existing of name.ext, name-2.ext, name-3.ext, ..."""
    if not path.exists():
        return path
    n = 2
    while True:
        candidate = path.with_name(f"{path.stem}-{n}{path.suffix}")
        if not candidate.exists():
            return candidate
        n += 1


def _write_manifest(
    out_dir: Path, command: str, config: ScenarioConfig, outputs: list[Path], **extra
) -> Path:
    manifest = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "config": config_as_dict(config),
        "master_seed": config.master_seed,
        "outputs": [p.name for p in outputs],
        **extra,
    }
    path = versioned_path(out_dir / f"{command}_manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _load(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    return config


def _parse_metrics(raw: str) -> list[str]:
    metrics = [m.strip() for m in raw.split(",") if m.strip()]
    if not metrics:
        raise ConfigurationError("no metric given")
    for m in metrics:
        if m not in METRIC_NAMES:
            raise ConfigurationError(f"unknown metric {m!r}; expected one of {METRIC_NAMES}")
    return metrics


def summary_dict(stats: CampaignStats) -> dict:
    return {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "metric": stats.metric,
        "route_rotation_deg": stats.route_rotation_deg,
        "n_ccuav": stats.n_ccuav,
        "n_drops": stats.n_drops,
        "master_seed": stats.master_seed,
        "mean_domain": stats.mean_domain,
        "aerial_mean_sinr_db": stats.aerial_mean_sinr_db,
        "aerial_p5_sinr_db": stats.aerial_p5_sinr_db,
        "gue_mean_sinr_db": stats.gue_mean_sinr_db,
        "per_ccuav_p5_sinr_db": [float(v) for v in stats.per_ccuav_p5_sinr_db],
        "sector_names": list(stats.sector_names),
        "selection_rates": [[float(v) for v in row] for row in stats.selection_rates],
        "placement_digest": stats.placement_digest,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_eigenscore(args) -> int:
    config = _load(args)
    scenario = build_scenario(config)
    table = eigenscore_sweep(
        scenario.routes, scenario.sectors, config.eigen_threshold,
        config.carrier_wavelength_m,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = versioned_path(out_dir / "eigenscore.csv")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["route_rotation_deg", "sector_name", "eigenscore"]
            + [f"lambda_{i + 1}" for i in range(SPECTRUM_COLUMNS)]
        )
        for e in table.entries:
            top = [f"{v:.9g}" for v in e.spectrum[:SPECTRUM_COLUMNS]]
            top += [""] * (SPECTRUM_COLUMNS - len(top))
            writer.writerow([f"{e.rotation_deg:g}", e.sector_name, e.score] + top)
    _write_manifest(out_dir, "eigenscore", config, [path])
    print(f"wrote {path}")
    return 0


def _dump_channels(scenario: Scenario, route, out_dir: Path) -> Path:
    config = scenario.config
    path = versioned_path(out_dir / "channels.csv")
    header = [
        "drop_index", "ue_index", "ue_kind", "sector_name", "x_m", "y_m", "z_m",
        "los", "path_loss_db", "shadow_db", "k_db",
    ] + [f"h_{m}" for m in range(config.n_elements)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(config.n_drops):
            state = generate_drop_state(scenario, route, i, config.master_seed)
            for u, kind in enumerate(state.kinds):
                for s, name in enumerate(sn.name for sn in scenario.sectors):
                    k = state.k_linear[u, s]
                    k_db = 10.0 * np.log10(k) if k > 0 else float("-inf")
                    row = [
                        i, u, kind, name,
                        f"{state.positions[u, 0]:.6f}",
                        f"{state.positions[u, 1]:.6f}",
                        f"{state.positions[u, 2]:.6f}",
                        int(state.los[u, s]),
                        f"{state.path_loss_db[u, s]:.6f}",
                        f"{state.shadow_db[u, s]:.6f}",
                        f"{k_db:.6f}" if np.isfinite(k_db) else "-inf",
                    ]
                    row += [
                        f"{c.real:.9g}{c.imag:+.9g}j" for c in state.h[u, s]
                    ]
                    writer.writerow(row)
    return path


def cmd_run(args) -> int:
    config = _load(args)
    metrics = _parse_metrics(args.metric)
    scenario = build_scenario(config)
    route = scenario.route_by_rotation(args.route_deg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    outputs: list[Path] = []
    for metric in metrics:
        stats = run_campaign(
            scenario, route, metric,
            threads=args.threads, linear_mean=args.linear_mean, collect_drops=True,
        )
        tag = f"{metric}_{route.rotation_deg:g}deg"

        summary_path = versioned_path(out_dir / f"summary_{tag}.json")
        summary_path.write_text(json.dumps(summary_dict(stats), indent=2, sort_keys=True) + "\n")
        outputs.append(summary_path)

        rates_path = versioned_path(out_dir / f"selection_rates_{tag}.csv")
        with rates_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ccuav_index"] + list(stats.sector_names))
            for idx, row in enumerate(stats.selection_rates):
                writer.writerow([idx] + [f"{v:.6f}" for v in row])
        outputs.append(rates_path)

        samples_path = versioned_path(out_dir / f"sinr_samples_{tag}.csv")
        with samples_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["drop_index", "ccuav_index", "sector_name", "sinr_db"])
            for drop in stats.drops or ():
                for idx in range(stats.n_ccuav):
                    writer.writerow([
                        drop.drop_index, idx,
                        stats.sector_names[int(drop.ccuav_sector[idx])],
                        f"{drop.ccuav_sinr_db[idx]:.6f}",
                    ])
        outputs.append(samples_path)

        if args.dump_drops:
            drops_path = versioned_path(out_dir / f"drops_{tag}.csv")
            with drops_path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["drop_index", "ue_kind", "ue_index", "sector_name", "sinr_db"]
                )
                for drop in stats.drops or ():
                    for idx in range(stats.n_ccuav):
                        writer.writerow([
                            drop.drop_index, "ccuav", idx,
                            stats.sector_names[int(drop.ccuav_sector[idx])],
                            f"{drop.ccuav_sinr_db[idx]:.6f}",
                        ])
                    for idx in range(drop.gue_sinr_db.size):
                        writer.writerow([
                            drop.drop_index, "gue", idx,
                            stats.sector_names[int(drop.gue_sector[idx])],
                            f"{drop.gue_sinr_db[idx]:.6f}",
                        ])
            outputs.append(drops_path)

        print(
            f"{metric}: aerial mean {stats.aerial_mean_sinr_db:.2f} dB, "
            f"p5 {stats.aerial_p5_sinr_db:.2f} dB -> {summary_path.name}"
        )

    if args.dump_channels:
        outputs.append(_dump_channels(scenario, route, out_dir))

    _write_manifest(
        out_dir, "run", config, outputs,
        route_deg=route.rotation_deg, metrics=metrics, threads=args.threads,
        linear_mean=args.linear_mean,
    )
    return 0


def cmd_sweep(args) -> int:
    config = _load(args)
    metrics = _parse_metrics(args.metric)
    if args.n_min < 1 or args.n_min > args.n_max:
        raise ConfigurationError("need 1 <= n-min <= n-max")
    scenario = build_scenario(config)
    route = scenario.route_by_rotation(args.route_deg)

    # Validate feasibility up front so no partial output is written.
    dataclasses.replace(config, n_ccuav=args.n_max)

    n_values = list(range(args.n_min, args.n_max + 1))
    results = sweep_ccuavs(
        scenario, route, metrics, n_values,
        threads=args.threads, linear_mean=args.linear_mean,
    )
    rows = sorted(
        (
            (s.metric, s.n_ccuav, s.aerial_mean_sinr_db, s.aerial_p5_sinr_db)
            for s in results
        ),
        key=lambda r: (r[0], r[1]),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = versioned_path(out_dir / f"sweep_{route.rotation_deg:g}deg.csv")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "n_ccuav", "aerial_mean_db", "aerial_p5_db"])
        for metric, n, mean_db, p5_db in rows:
            writer.writerow([metric, n, f"{mean_db:.6f}", f"{p5_db:.6f}"])
    _write_manifest(
        out_dir, "sweep", config, [path],
        route_deg=route.rotation_deg, metrics=metrics,
        n_min=args.n_min, n_max=args.n_max, threads=args.threads,
        linear_mean=args.linear_mean,
    )
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# Parser / entry point
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="scenario config file (key=value or JSON)")
    parser.add_argument("--seed", type=int, help="override the config master seed")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for drops (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skycell",
        description="mMIMO cell-selection simulator for UAV swarms on aerial corridors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eig = sub.add_parser("eigenscore", help="write the per-(route, sector) score table")
    _add_common(p_eig)
    p_eig.set_defaults(func=cmd_eigenscore)

    p_run = sub.add_parser("run", help="run a campaign on one route")
    _add_common(p_run)
    p_run.add_argument("--route-deg", type=float, default=90.0,
                       help="rotation of the route to simulate")
    p_run.add_argument("--metric", default="rsrp",
                       help="comma-separated metrics: rsrp, m1, m2")
    p_run.add_argument("--linear-mean", action="store_true",
                       help="average SINRs in the linear domain instead of dB")
    p_run.add_argument("--dump-channels", action="store_true",
                       help="also write one channel record per link per drop")
    p_run.add_argument("--dump-drops", action="store_true",
                       help="also write a per-drop result CSV including gUEs")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep the swarm size per metric")
    _add_common(p_sweep)
    p_sweep.add_argument("--route-deg", type=float, default=90.0)
    p_sweep.add_argument("--metric", default="rsrp,m1,m2")
    p_sweep.add_argument("--n-min", type=int, default=1)
    p_sweep.add_argument("--n-max", type=int, default=7)
    p_sweep.add_argument("--linear-mean", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, SingularChannelError, FloatingPointError, ValueError) as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
