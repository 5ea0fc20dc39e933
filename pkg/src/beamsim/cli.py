"""Command-line interface: generate / sweep / losses / overhead.

Every command that writes an output directory drops a ``manifest.json``
holding the fully resolved config, seed, tool version and argv; rerunning a
command from its manifest (``--config manifest.json``) reproduces the data
outputs byte-for-byte at any ``--threads`` setting.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .encoding import (EncodingGrid, ZeroEncodingError, bce_loss, decode_predictions,
                       hard_encode, mad_metric, mae_cosines, soft_encode, sscl_loss)
from .evaluation import SweepReport, overhead_report, run_sweep
from .exchange import (aod_list_from_json, dump_json, load_json, predictions_from_json,
                       scenario_from_json, scenario_to_json)
from .plotting import render_sweep_figure
from .presets import (PRESET_NAMES, generate_config_from_dict, sweep_config_from_dict,
                      sweep_config_to_dict)


def _load_config(path: str) -> dict:
    doc = load_json(path)
    if doc.get("kind") == "manifest":
        # rerunning from a manifest: adopt its resolved config
        return doc["config"]
    return doc


def _write_manifest(out_dir: Path, command: str, config: dict, seed: int | None,
                    extras: dict | None = None) -> None:
    manifest = {
        "version": 1,
        "kind": "manifest",
        "tool": "beamsim",
        "tool_version": __version__,
        "command": command,
        "argv": sys.argv[1:],
        "seed": seed,
        "out": str(out_dir),
        "config": config,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extras:
        manifest.update(extras)
    dump_json(manifest, out_dir / "manifest.json")


def cmd_generate(args: argparse.Namespace) -> int:
    doc = _load_config(args.config) if args.config else {}
    if args.preset:
        doc = {**doc, "preset": args.preset}
    scenario_cfg, trials = generate_config_from_dict(doc)
    if args.seed is not None:
        scenario_cfg = dataclasses.replace(scenario_cfg, rng_seed=args.seed)
    if args.trials is not None:
        trials = args.trials

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    from .evaluation import generate_trial_scenario
    for trial in range(trials):
        ues = generate_trial_scenario(scenario_cfg, trial)
        dump_json(scenario_to_json(ues), out_dir / f"scenario_{trial:03d}.json")
    resolved = {"version": 1, "kind": "generate_config",
                "scenario": _scenario_dict(scenario_cfg), "trials": trials}
    _write_manifest(out_dir, "generate", resolved, scenario_cfg.rng_seed)
    print(f"wrote {trials} scenario file(s) to {out_dir}")
    return 0


def _scenario_dict(cfg) -> dict:
    d = dataclasses.asdict(cfg)
    d["cluster_count_range"] = list(cfg.cluster_count_range)
    d["paths_per_cluster_range"] = list(cfg.paths_per_cluster_range)
    return d


def _write_results_csv(report: SweepReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "eirp_dbm", "trial", "cluster_id",
                         "ue_id", "se_bps_hz", "sum_se_bps_hz"])
        for r in report.records:
            writer.writerow([r.strategy, repr(r.eirp_dbm), r.trial, r.cluster_id,
                             r.ue_id, repr(r.se_bps_hz), repr(r.sum_se_bps_hz)])


def _summary_dict(report: SweepReport) -> dict:
    return {
        "version": 1,
        "kind": "sweep_summary",
        "trials": report.trials,
        "rows": [dataclasses.asdict(r) for r in report.rows],
    }


def cmd_sweep(args: argparse.Namespace) -> int:
    doc = _load_config(args.config) if args.config else {}
    if args.preset:
        doc = {**doc, "preset": args.preset}
    if args.strategies:
        doc["strategies"] = args.strategies.split(",")
    if args.estimator:
        doc["estimator"] = args.estimator
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.eirp:
        doc["eirp_dbm"] = [float(v) for v in args.eirp.split(",")]
    if args.seed is not None:
        doc.setdefault("scenario", {})["rng_seed"] = args.seed
    cfg = sweep_config_from_dict(doc)

    scenarios = None
    if args.scenarios:
        scen_path = Path(args.scenarios)
        files = sorted(scen_path.glob("scenario_*.json")) if scen_path.is_dir() else [scen_path]
        if not files:
            raise FileNotFoundError(f"no scenario files under {scen_path}")
        scenarios = [scenario_from_json(load_json(f)) for f in files]

    predictions = None
    if cfg.estimator.startswith("file:"):
        predictions = predictions_from_json(load_json(cfg.estimator.split(":", 1)[1]))
        if scenarios is None:
            raise ValueError("--estimator file:... needs --scenarios with the matching scenes")

    report = run_sweep(cfg, scenarios=scenarios, predictions=predictions,
                       threads=args.threads)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_results_csv(report, out_dir / "results.csv")
    dump_json(_summary_dict(report), out_dir / "summary.json")
    render_sweep_figure(report, out_dir / "sum_se_vs_eirp.png")
    _write_manifest(out_dir, "sweep", sweep_config_to_dict(cfg), cfg.scenario.rng_seed,
                    extras={"scenarios": args.scenarios})
    print(f"wrote results.csv, summary.json, sum_se_vs_eirp.png to {out_dir}")
    return 0


def _parse_grid(text: str) -> EncodingGrid:
    try:
        theta, phi = text.lower().split("x")
        return EncodingGrid(int(theta), int(phi))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"--grid expects THETAxPHI (e.g. 90x45), got {text!r}") from exc


def _load_samples(doc: dict, kind: str) -> list:
    if doc.get("kind") == kind:
        return doc["samples"]
    return [doc]  # single bare sample


def cmd_losses(args: argparse.Namespace) -> int:
    grid = _parse_grid(args.grid)
    truth_doc = load_json(args.truth)
    pred_doc = load_json(args.pred)
    truths = [aod_list_from_json(s) for s in _load_samples(truth_doc, "aod_truth")]
    pred_samples = _load_samples(pred_doc, "prediction_grids")
    if len(truths) != len(pred_samples):
        raise ValueError(f"batch mismatch: {len(truths)} truth vs {len(pred_samples)} predictions")

    grids = []
    features = []
    for sample in pred_samples:
        probs = np.asarray(sample["probabilities"], dtype=float)
        if probs.shape != (grid.theta_bins, grid.phi_bins):
            raise ValueError(f"prediction grid shape {probs.shape} does not match "
                             f"{grid.theta_bins}x{grid.phi_bins}")
        grids.append(probs)
        features.append(sample.get("features"))

    hard = [hard_encode(t, grid) for t in truths]
    report: dict = {"bce": bce_loss(grids, hard), "sscl": None,
                    "mad_deg": None, "mae_cos": None, "samples": len(truths)}

    if all(f is not None for f in features):
        softs = [soft_encode(t, grid, args.delta) for t in truths]
        try:
            report["sscl"] = sscl_loss([np.asarray(f, dtype=float) for f in features], softs)
        except ZeroEncodingError as exc:
            raise ValueError(f"cannot compute SSCL: {exc}") from exc

    mads, maes, skipped = [], [], 0
    for probs, truth in zip(grids, truths):
        decoded = decode_predictions(probs, grid)
        if decoded.num_paths == 0 or truth.num_paths == 0:
            skipped += 1
            continue
        mads.append(mad_metric(decoded, truth))
        maes.append(mae_cosines(decoded, truth))
    if mads:
        report["mad_deg"] = float(np.mean(mads))
        report["mae_cos"] = float(np.mean(maes))
    report["skipped_empty"] = skipped

    _emit(report, args.out)
    return 0


def cmd_overhead(args: argparse.Namespace) -> int:
    report = overhead_report(args.n_rf, args.scs_khz * 1e3)
    _emit({"version": 1, "kind": "overhead_report", **report}, args.out)
    return 0


def _emit(doc: dict, out: str | None) -> None:
    import json
    text = json.dumps(doc, sort_keys=True, indent=2)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")
    print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsim",
        description="Beamspace-based MU beamforming simulator")
    parser.add_argument("--version", action="version", version=f"beamsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write per-trial scenario JSON files")
    p_gen.add_argument("--config", help="generate_config JSON (or a manifest)")
    p_gen.add_argument("--preset", choices=PRESET_NAMES)
    p_gen.add_argument("--seed", type=int, help="override the scenario root seed")
    p_gen.add_argument("--trials", type=int)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_generate)

    p_sweep = sub.add_parser("sweep", help="run an EIRP sum-SE sweep")
    p_sweep.add_argument("--config", help="sweep_config JSON (or a manifest)")
    p_sweep.add_argument("--preset", choices=PRESET_NAMES)
    p_sweep.add_argument("--strategies", help="comma list, e.g. full_csi,algorithm1")
    p_sweep.add_argument("--estimator",
                         help="ground_truth | perturbed:<std_deg> | file:<path>")
    p_sweep.add_argument("--eirp", help="comma list of EIRP points in dBm")
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--seed", type=int, help="override the root seed")
    p_sweep.add_argument("--scenarios", help="scenario file or directory from `generate`")
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_loss = sub.add_parser("losses", help="losses/metrics between truth and predictions")
    p_loss.add_argument("--truth", required=True, help="AoD-list truth JSON")
    p_loss.add_argument("--pred", required=True, help="prediction-grid JSON")
    p_loss.add_argument("--grid", default="90x45", help="encoding grid, default 90x45")
    p_loss.add_argument("--delta", type=float, default=10.0,
                        help="soft-encoding perturbation range in degrees")
    p_loss.add_argument("--out", help="also write the report to this file")
    p_loss.set_defaults(func=cmd_losses)

    p_ovh = sub.add_parser("overhead", help="beam-training overhead report")
    p_ovh.add_argument("--n-rf", type=int, required=True)
    p_ovh.add_argument("--scs-khz", type=float, default=120.0)
    p_ovh.add_argument("--out", help="also write the report to this file")
    p_ovh.set_defaults(func=cmd_overhead)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
