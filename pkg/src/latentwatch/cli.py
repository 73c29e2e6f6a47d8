"""Command-line entry points: generate, pretrain, replay, sweep, metrics, serve.

A manifest file (--manifest, JSON) overrides individual flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import predictor, scenario, seqio
from .extractor import read_trigger_log
from .runner import (ALL_METHODS, RunManifest, alpha_sweep, run_replay,
                     write_metrics_csv)


def _manifest_from_args(args) -> RunManifest:
    data = {}
    if args.manifest:
        data = json.loads(Path(args.manifest).read_text())
    names = {f.name for f in fields(RunManifest)}
    for name in names:
        value = getattr(args, name, None)
        if value is not None and name not in data:
            data[name] = value
    if "alphas" in data:
        data["alphas"] = tuple(data["alphas"])
    return RunManifest(**data)


def _add_manifest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", help="JSON manifest file; file values win")
    p.add_argument("--latents", help="LSEQ1 input file")
    p.add_argument("--labels", help="event label file")
    p.add_argument("--checkpoint", help="predictor checkpoint")
    p.add_argument("--method", choices=ALL_METHODS)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--hidden-dim", dest="hidden_dim", type=int)
    p.add_argument("--num-layers", dest="num_layers", type=int)
    p.add_argument("--lookback", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--pretrain-epochs", dest="pretrain_epochs", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--window-s", dest="window_s", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau-min", dest="tau_min", type=float)
    p.add_argument("--warmup", type=int)
    p.add_argument("--refractory-s", dest="refractory_s", type=float)
    p.add_argument("--tolerance-s", dest="tolerance_s", type=float)
    p.add_argument("--ler-context", dest="ler_context", type=int)
    p.add_argument("--uniform-dt-s", dest="uniform_dt_s", type=float)
    p.add_argument("--alphas", type=float, nargs="+")


def cmd_generate(args) -> int:
    cfg = scenario.read_config(args.config)
    if args.event_free:
        cfg = scenario.event_free(cfg)
    seq, labels = scenario.generate(cfg)
    seqio.write_sequence(seq, args.out)
    if args.labels_out:
        seqio.write_labels(labels, args.labels_out)
    print(f"wrote {len(seq)} frames (D={seq.dim}, fps={seq.fps}) to {args.out}")
    return 0


def cmd_pretrain(args) -> int:
    seq = seqio.read_sequence(args.latents)
    if args.method == "compensated":
        cfg = predictor.PredictorConfig.compensated(
            seq.dim, hidden_dim=args.hidden_dim, num_layers=args.num_layers,
            lookback=args.lookback, lam=args.lam,
            learning_rate=args.learning_rate, seed=args.seed)
    else:
        cfg = predictor.PredictorConfig.naive(
            seq.dim, hidden_dim=args.hidden_dim, num_layers=args.num_layers,
            lookback=args.lookback, lam=args.lam,
            learning_rate=args.learning_rate, seed=args.seed)
    params = predictor.GRUParams.init(cfg)
    predictor.pretrain(params, seq, args.epochs)
    predictor.save_checkpoint(params, args.out)
    print(f"wrote checkpoint to {args.out}")
    return 0


def cmd_replay(args) -> int:
    manifest = _manifest_from_args(args)
    result = run_replay(manifest)
    print(f"{manifest.method}: {len(result.triggers)} triggers; "
          f"report in {manifest.out_dir}")
    return 0


def cmd_sweep(args) -> int:
    manifest = _manifest_from_args(args)
    methods = args.methods or list(ALL_METHODS)
    results = alpha_sweep(manifest, methods)
    print(f"{len(results)} sweep rows in {manifest.out_dir}")
    return 0


def cmd_metrics(args) -> int:
    manifest = _manifest_from_args(args)
    from .runner import evaluate_triggers
    seq = seqio.read_sequence(manifest.latents)
    labels = seqio.read_labels(manifest.labels) if manifest.labels else None
    triggers = read_trigger_log(args.triggers)
    result = evaluate_triggers(manifest, seq, triggers,
                               triggers[0].source if triggers else "unknown",
                               manifest.alpha, labels)
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(manifest, [result.row], out / "metrics.csv")
    print(f"metrics row in {out / 'metrics.csv'}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .review import ReviewStore, create_app
    store = ReviewStore(args.store_dir)
    if args.triggers:
        store.load_stream(args.stream_id, read_trigger_log(args.triggers),
                          labels=seqio.read_labels(args.labels) if args.labels else None)
    app = create_app(store, console_dir=args.console_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentwatch")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic latent world")
    p.add_argument("config", help="scenario config file (key=value lines)")
    p.add_argument("--out", required=True, help="LSEQ1 output path")
    p.add_argument("--labels-out", help="ground-truth label output path")
    p.add_argument("--event-free", action="store_true",
                   help="drop events (pretraining footage)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pretrain", help="pretrain a predictor on a sequence")
    p.add_argument("--latents", required=True)
    p.add_argument("--method", choices=("compensated", "naive"),
                   default="compensated")
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden-dim", dest="hidden_dim", type=int, default=256)
    p.add_argument("--num-layers", dest="num_layers", type=int, default=2)
    p.add_argument("--lookback", type=int, default=50)
    p.add_argument("--lam", type=float, default=0.5)
    p.add_argument("--learning-rate", dest="learning_rate", type=float,
                   default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("replay", help="replay one method through the extractor")
    _add_manifest_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("sweep", help="alpha sweep with frontier report")
    _add_manifest_flags(p)
    p.add_argument("--methods", nargs="+", choices=ALL_METHODS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="metrics for an existing trigger log")
    _add_manifest_flags(p)
    p.add_argument("--triggers", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="run the review adjudication service")
    p.add_argument("--store-dir", required=True)
    p.add_argument("--triggers", help="trigger log to load as proposals")
    p.add_argument("--labels", help="Phase-1 label file")
    p.add_argument("--stream-id", default="stream0")
    p.add_argument("--console-dir", help="static console bundle to mount")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, seqio.SequenceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
