"""Command line: train on scenario files, export predictions for Stage II."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .export import losses_documents, predict_grids, predictions_document
from .targets import EncodingSpec
from .train import TrainConfig, build_samples, load_checkpoint, save_checkpoint, train
from .voxel import VoxelSpec


def _load_scenarios(path: str) -> list[dict]:
    p = Path(path)
    files = sorted(p.glob("scenario_*.json")) if p.is_dir() else [p]
    if not files:
        raise FileNotFoundError(f"no scenario files under {path}")
    return [json.loads(f.read_text()) for f in files]


def _parse_grid(text: str) -> EncodingSpec:
    theta, phi = text.lower().split("x")
    return EncodingSpec(int(theta), int(phi))


def _parse_voxel_bins(text: str) -> VoxelSpec:
    bx, by, bz = (int(v) for v in text.split(","))
    return VoxelSpec(bins=(bx, by, bz))


def cmd_train(args: argparse.Namespace) -> int:
    grid = _parse_grid(args.grid)
    voxel_spec = _parse_voxel_bins(args.voxel_bins)
    scenarios = _load_scenarios(args.scenarios)
    samples = build_samples(scenarios, grid, voxel_spec, args.truncation_budget)
    cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                      learning_rate=args.lr, seed=args.seed,
                      truncation_budget=args.truncation_budget)
    from .model import FusionModel
    model = FusionModel(voxel_bins=voxel_spec.bins,
                        image_shape=samples[0].image.shape, grid=grid)
    model, history = train(samples, model, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out / "model.pt", history)
    print(f"trained {cfg.epochs} epochs on {len(samples)} samples; "
          f"loss {history['total'][0]:.3f} -> {history['total'][-1]:.3f}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    model = load_checkpoint(args.model)
    scenarios = _load_scenarios(args.scenarios)
    samples = build_samples(scenarios, model.grid,
                            VoxelSpec(bins=model.voxel_bins), args.truncation_budget)
    probs, features = predict_grids(model, samples)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(predictions_document(samples, probs, model.grid),
                              sort_keys=True, indent=2) + "\n")
    if args.losses_prefix:
        truth, pred = losses_documents(samples, probs, features)
        Path(args.losses_prefix + "_truth.json").write_text(json.dumps(truth) + "\n")
        Path(args.losses_prefix + "_pred.json").write_text(json.dumps(pred) + "\n")
    n_empty = sum(1 for e in json.loads(out.read_text())["predictions"]
                  if not e["aod_list"]["clusters"])
    print(f"wrote {len(samples)} predictions to {out} ({n_empty} below threshold)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamfusion",
                                     description="Toy multimodal fusion trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train on scenario JSON files")
    p_train.add_argument("--scenarios", required=True, help="scenario file or directory")
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--epochs", type=int, default=50)
    p_train.add_argument("--batch-size", type=int, default=32)
    p_train.add_argument("--lr", type=float, default=1e-4)
    p_train.add_argument("--grid", default="32x16", help="encoding grid THETAxPHI")
    p_train.add_argument("--voxel-bins", default="20,200,10")
    p_train.add_argument("--truncation-budget", type=int, default=25)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_exp = sub.add_parser("export", help="export predictions for beamsim")
    p_exp.add_argument("--model", required=True, help="checkpoint path (model.pt)")
    p_exp.add_argument("--scenarios", required=True)
    p_exp.add_argument("--out", required=True, help="predictions JSON path")
    p_exp.add_argument("--losses-prefix",
                       help="also write <prefix>_truth.json / <prefix>_pred.json")
    p_exp.add_argument("--truncation-budget", type=int, default=25)
    p_exp.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
