"""Command-line interface: ``uwbmotion {simulate,extract,train,classify,benchmark}``.

Exit status is 0 on success, 1 on data or I/O errors and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hmm
from .core import NOMINAL_FPS, FrameSet, ValidationError
from .evaluation import EvalOptions, Method, benchmark, features_for
from .features import DECIMATION, ENVELOPE_WINDOW, extract_feature
from .io import read_frame_csv, format_row, read_dataset, write_dataset
from .synth import SimConfig, default_template, generate_dataset


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _non_negative(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {text}")
    return value


def _methods(text):
    try:
        return [Method.from_cli(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_feature_flags(p):
    p.add_argument("--window", type=_positive_int, default=ENVELOPE_WINDOW, help="RMS window length (samples)")
    p.add_argument("--decimation", type=_positive_int, default=DECIMATION, help="envelope decimation factor")


def _add_clean_flags(p):
    p.add_argument("--template-length", type=_positive_int, default=31, help="pulse template taps (odd)")
    p.add_argument("--short-fraction", type=_fraction, default=0.25, help="short-template fraction")


def _add_hmm_flags(p):
    p.add_argument("--states", type=_positive_int, default=5)
    p.add_argument("--max-iters", type=_positive_int, default=100)
    p.add_argument("--tol", type=_positive, default=1e-6, help="relative log-likelihood tolerance")
    p.add_argument("--variance-floor", type=_positive, default=1e-6)


def build_parser():
    parser = argparse.ArgumentParser(prog="uwbmotion", description="Rest/Move motion classification from IR-UWB radar frame sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic labeled dataset")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--per-state", type=_positive_int, default=20)
    p.add_argument("--fps", type=_positive, default=NOMINAL_FPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=_non_negative, default=3.0, help="noise standard deviation")
    p.add_argument("--duration", type=_positive, default=2.0, help="nominal recording length (s)")
    p.add_argument("--jitter", type=_non_negative, default=1.0, help="+/- spread of recording length (s)")
    p.add_argument("--target-amp", type=_positive, default=30.0)
    p.add_argument("--participant", default="synthetic")

    p = sub.add_parser("extract", help="export per-frame-set feature CSVs")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--method", default="proposed", choices=[m.value for m in Method])
    _add_feature_flags(p)
    _add_clean_flags(p)

    p = sub.add_parser("train", help="fit the Rest/Move HMM pair and save it as JSON")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--model", required=True, type=Path)
    _add_feature_flags(p)
    _add_hmm_flags(p)

    p = sub.add_parser("classify", help="label frame sets with a trained model")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--data", type=Path, help="dataset directory")
    p.add_argument("files", nargs="*", type=Path, help="individual frame-set CSV files")
    p.add_argument("--fps", type=_positive, default=NOMINAL_FPS)
    _add_feature_flags(p)

    p = sub.add_parser("benchmark", help="leave-one-out accuracy of each method")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--methods", type=_methods, default=list(Method),
                   help="comma-separated subset of: " + ", ".join(m.value for m in Method))
    p.add_argument("--json", type=Path, help="also write the report as JSON")
    _add_feature_flags(p)
    _add_clean_flags(p)
    _add_hmm_flags(p)
    return parser


def _train_config(args):
    return hmm.TrainConfig(max_iters=args.max_iters, ll_tol=args.tol, variance_floor=args.variance_floor)


def cmd_simulate(args):
    n_frames = max(1, int(round(args.duration * args.fps)))
    spread = int(round(args.jitter * args.fps))
    if n_frames - spread < 4:
        raise ValidationError("duration minus jitter must leave at least 4 frames per set")
    cfg = SimConfig(
        T=n_frames, fps=args.fps, noise_sigma=args.noise, target_amp=args.target_amp, seed=args.seed,
        move_window=(int(round(0.3 * n_frames)), max(int(round(0.7 * n_frames)), int(round(0.3 * n_frames)) + 1)),
    )
    ds = generate_dataset(cfg, args.per_state, (-spread, spread), participant=args.participant)
    write_dataset(ds, args.out)
    lengths = [fs.n_frames for fs in ds]
    print(f"wrote {len(ds)} frame sets ({args.per_state} Rest + {args.per_state} Move) to {args.out}")
    print(f"participant={ds.participant} seed={ds.seed} fps={args.fps:g} frames={min(lengths)}..{max(lengths)}")


def _eval_options(args):
    kw = {"window": args.window, "decimation": args.decimation}
    if hasattr(args, "template_length"):
        kw.update(template=default_template(args.template_length), short_fraction=args.short_fraction)
    if hasattr(args, "states"):
        kw.update(n_states=args.states, train=_train_config(args))
    return EvalOptions(**kw)


def cmd_extract(args):
    ds = read_dataset(args.data)
    method = Method.from_cli(args.method)
    feats = features_for(ds, method, _eval_options(args))
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        for fs, feat in zip(ds, feats):
            with open(args.out / f"{fs.id}.csv", "w", encoding="ascii") as fh:
                for row in feat:
                    fh.write(format_row(row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write features to {args.out}: {exc.strerror or exc}") from exc
    print(f"wrote {len(feats)} {method.value} feature files to {args.out}")


def cmd_train(args):
    ds = read_dataset(args.data)
    extractor = lambda fs: extract_feature(fs, args.window, args.decimation)  # noqa: E731
    models = hmm.train_classifier(ds, extractor, _train_config(args), args.states)
    hmm.save_models(models, args.model)
    print(f"trained Rest/Move models on {len(ds)} frame sets -> {args.model}")


def cmd_classify(args):
    models = hmm.load_models(args.model)
    items = []
    if args.data is not None:
        items.extend(read_dataset(args.data))
    for path in args.files:
        items.append(FrameSet(read_frame_csv(path), fps=args.fps, id=path.stem))
    if not items:
        raise ValidationError("nothing to classify: give --data or frame-set CSV files")
    for fs in items:
        label = hmm.classify(models, extract_feature(fs, args.window, args.decimation))
        print(f"{fs.id}\t{label.value}")


def cmd_benchmark(args):
    ds = read_dataset(args.data)
    report = benchmark(ds, args.methods, _eval_options(args))
    print(report.render())
    if args.json is not None:
        args.json.write_text(report.to_json() + "\n", encoding="utf-8")


COMMANDS = {
    "simulate": cmd_simulate,
    "extract": cmd_extract,
    "train": cmd_train,
    "classify": cmd_classify,
    "benchmark": cmd_benchmark,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
