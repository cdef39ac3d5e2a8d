"""Command-line front end: simulate -> denoise -> bench, and
extract-features -> train -> eval -> predict.

Exit codes: 0 success, 1 usage error, 2 data/runtime error. Every run writes
a JSON report embedding the fully resolved configuration, so a run can be
reproduced from its report alone. The seed comes from --seed, falling back to
the EEGSCRUB_SEED environment variable, then 0.
"""

import argparse
import csv
import os
import sys
from dataclasses import asdict, replace

import numpy as np

from .bench import leaderboard_csv_rows, make_blink_template, make_clean, run_bench
from .core import Recording
from .denoise import (
    METHOD_IDS,
    KalmanConfig,
    adaptive_kalman_denoise,
    cascade_lms,
    denoise_dwt,
    denoise_emd_maf,
    identity,
    remove_blink_template,
    remove_motion_ssa,
    remove_muscle_ssa_cca,
)
from .dataset import (
    CLASS_NAMES,
    LabeledDataset,
    load_feature_csv,
    load_raw_csv,
    save_feature_csv,
    save_raw_csv,
    write_report,
)
from .errors import EegScrubError
from .features import build_feature_matrix
from .gru import (
    ModelConfig,
    TrainConfig,
    evaluate,
    load_model,
    save_model,
    train,
    train_linear_baseline,
)
from .noise import NoiseSpec, gen_noise, mix_at_snr


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("EEGSCRUB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"EEGSCRUB_SEED must be an integer, got {env!r}")
    return 0


def _default_report(primary_output: str) -> str:
    return str(primary_output) + ".report.json"


def _check_no_clobber(inputs, outputs):
    in_paths = {os.path.abspath(p) for p in inputs if p}
    for out in outputs:
        if out and os.path.abspath(out) in in_paths:
            raise UsageError(
                f"refusing to overwrite input file {out!r}; "
                "choose a different output path"
            )


def _parse_label(text: str) -> int:
    name = text.strip().upper()
    if name in CLASS_NAMES:
        return CLASS_NAMES.index(name)
    try:
        value = int(text)
    except ValueError:
        raise UsageError(
            f"label must be one of {CLASS_NAMES} or 0..{len(CLASS_NAMES)-1}, "
            f"got {text!r}"
        )
    if not 0 <= value < len(CLASS_NAMES):
        raise UsageError(f"label {value} outside 0..{len(CLASS_NAMES)-1}")
    return value


def _add_seed(p) -> None:
    # SUPPRESS keeps a subcommand-level default from clobbering a root value
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="master seed (fallback: EEGSCRUB_SEED, then 0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="eegscrub",
                     description="EEG artifact removal and emotion "
                                 "classification toolkit")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (fallback: EEGSCRUB_SEED, then 0)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("simulate", help="write a surrogate recording")
    _add_seed(p)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--duration", type=float, default=8.0)
    p.add_argument("--fs", type=float, default=256.0)
    p.add_argument("--channels", type=int, default=4)
    p.add_argument("--noise", default=None,
                   help="noise spec text, e.g. kind=emg_burst,duty=0.5,seed=7")
    p.add_argument("--snr", type=float, default=0.0)

    p = sub.add_parser("denoise", help="apply one artifact-removal method")
    _add_seed(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", required=True, choices=sorted(METHOD_IDS))
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--fs", type=float, default=256.0)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--mode", choices=("soft", "hard"), default="soft")
    p.add_argument("--ma-width", type=int, default=5)
    p.add_argument("--window-len", type=int, default=None)
    p.add_argument("--var-thresh", type=float, default=0.1)
    p.add_argument("--autocorr-thresh", type=float, default=0.9)
    p.add_argument("--q", type=float, default=1e-5)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--adapt-window", type=int, default=64)
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--taps", type=int, default=16)
    p.add_argument("--ref-noise", action="append", default=None,
                   help="reference noise spec for cascade_lms (repeatable)")
    p.add_argument("--template-width", type=float, default=0.3,
                   help="blink template width in seconds")
    p.add_argument("--frontal", default=None,
                   help="comma-separated frontal channel names for "
                        "blink_template (default: first two channels)")
    p.add_argument("--peak-thresh", type=float, default=0.7)

    p = sub.add_parser("bench", help="run the Monte-Carlo benchmark grid")
    _add_seed(p)
    p.add_argument("--methods", default="identity,dwt,emd_maf,ssa_motion,"
                                        "ssa_cca,akf,cascade_lms")
    p.add_argument("--noises",
                   default="kind=awgn;kind=powerline;kind=baseline_wander;"
                           "kind=emg_burst,duty=1",
                   help="semicolon-separated noise spec texts")
    p.add_argument("--snrs", default="-5,0,5")
    p.add_argument("--seeds", type=int, default=20,
                   help="number of Monte-Carlo seeds")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--fs", type=float, default=256.0)
    p.add_argument("--out", required=True, help="leaderboard CSV path")
    p.add_argument("--report", default=None)

    p = sub.add_parser("extract-features", help="epoch features from raw CSV")
    _add_seed(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--fs", type=float, default=256.0)
    p.add_argument("--window-s", type=float, default=2.0)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--label", default=None)

    p = sub.add_parser("train", help="train the GRU or the linear baseline")
    _add_seed(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--history", default=None, help="per-epoch CSV path")
    p.add_argument("--report", default=None)
    p.add_argument("--model-kind", choices=("gru", "linear"), default="gru")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--val-fraction", type=float, default=0.15)
    p.add_argument("--grad-clip", type=float, default=5.0)

    p = sub.add_parser("eval", help="evaluate a trained model")
    _add_seed(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report", default=None)

    p = sub.add_parser("predict", help="write per-row class predictions")
    _add_seed(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    return parser


def _cmd_simulate(args, seed: int) -> int:
    report_path = args.report or _default_report(args.out)
    n = int(round(args.duration * args.fs))
    channels, names = [], []
    spec = NoiseSpec.from_text(args.noise) if args.noise else None
    mix_info = []
    for c in range(args.channels):
        clean = make_clean(seed, n, args.fs, channel=c)
        if spec is not None:
            noise = gen_noise(replace(spec, seed=spec.seed + seed + c), n,
                              args.fs)
            mixed, mrep = mix_at_snr(clean, noise, args.snr, spec=spec)
            mix_info.append({"channel": c,
                             "achieved_snr_db": mrep.achieved_snr_db,
                             "noise_scale": mrep.noise_scale})
            channels.append(mixed)
        else:
            channels.append(clean)
        names.append(f"ch{c}")
    rec = Recording(channels=tuple(channels), channel_names=tuple(names))
    save_raw_csv(rec, args.out)
    write_report({
        "command": "simulate",
        "config": {"out": str(args.out), "duration": args.duration,
                   "fs": args.fs, "channels": args.channels,
                   "noise": spec.to_text() if spec else None,
                   "snr_db": args.snr if spec else None, "seed": seed},
        "results": {"n_samples": n, "mixes": mix_info},
    }, report_path)
    return 0


def _denoise_recording(args, rec: Recording, seed: int):
    method = args.method
    if method == "ssa_cca":
        out, rep = remove_muscle_ssa_cca(rec, args.autocorr_thresh)
        return out, [rep]
    if method == "blink_template":
        frontal = (args.frontal.split(",") if args.frontal
                   else list(rec.channel_names[:2]))
        spec = NoiseSpec("blink", {"width": args.template_width}, seed=seed)
        template = make_blink_template(spec, rec.fs)
        out, rep = remove_blink_template(rec, template, frontal,
                                         args.peak_thresh)
        return out, [rep]
    outs, reps = [], []
    for ch in rec.channels:
        if method == "identity":
            out, rep = identity(ch)
        elif method == "dwt":
            out, rep = denoise_dwt(ch, args.levels, args.mode)
        elif method == "emd_maf":
            out, rep = denoise_emd_maf(ch, args.ma_width)
        elif method == "ssa_motion":
            out, rep = remove_motion_ssa(ch, args.window_len, args.var_thresh)
        elif method == "akf":
            cfg = KalmanConfig(q=args.q, r0=args.r0,
                               adapt_window=args.adapt_window)
            out, rep = adaptive_kalman_denoise(ch, cfg)
        elif method == "cascade_lms":
            specs = [NoiseSpec.from_text(s) for s in
                     (args.ref_noise or ["kind=powerline"])]
            refs = [gen_noise(replace(s, seed=s.seed + seed), len(ch), rec.fs)
                    for s in specs]
            out, rep = cascade_lms(ch, refs, args.mu, args.taps)
        else:
            raise UsageError(f"unknown method {method!r}")
        outs.append(out)
        reps.append(rep)
    return rec.with_channels(outs), reps


def _cmd_denoise(args, seed: int) -> int:
    report_path = args.report or _default_report(args.out)
    _check_no_clobber([args.input], [args.out, report_path])
    rec = load_raw_csv(args.input, fs=args.fs)
    out, reps = _denoise_recording(args, rec, seed)
    save_raw_csv(out, args.out)
    config = {
        "in": str(args.input), "out": str(args.out), "method": args.method,
        "fs": args.fs, "seed": seed, "levels": args.levels,
        "mode": args.mode, "ma_width": args.ma_width,
        "window_len": args.window_len, "var_thresh": args.var_thresh,
        "autocorr_thresh": args.autocorr_thresh, "q": args.q, "r0": args.r0,
        "adapt_window": args.adapt_window, "mu": args.mu, "taps": args.taps,
        "ref_noise": args.ref_noise, "template_width": args.template_width,
        "frontal": args.frontal, "peak_thresh": args.peak_thresh,
    }
    write_report({
        "command": "denoise",
        "config": config,
        "results": {
            "rejected_rows": rec.subject_meta.get("rejected_rows", 0),
            "reports": [asdict(r) for r in reps],
        },
    }, report_path)
    return 0


def _cmd_bench(args, seed: int) -> int:
    report_path = args.report or _default_report(args.out)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    noises = [s.strip() for s in args.noises.split(";") if s.strip()]
    snrs = [float(s) for s in args.snrs.split(",") if s.strip()]
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = [seed + i for i in range(args.seeds)]
    result = run_bench(methods, noises, snrs, seeds, n=args.n, fs=args.fs)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(leaderboard_csv_rows(result))
    write_report({
        "command": "bench",
        "config": {"methods": methods, "noises": noises, "snrs_db": snrs,
                   "n_seeds": args.seeds, "n": args.n, "fs": args.fs,
                   "seed": seed, "out": str(args.out)},
        "results": {"rows": result["rows"]},
    }, report_path)
    return 0


def _cmd_extract(args, seed: int) -> int:
    report_path = args.report or _default_report(args.out)
    _check_no_clobber([args.input], [args.out, report_path])
    rec = load_raw_csv(args.input, fs=args.fs)
    label = _parse_label(args.label) if args.label is not None else None
    matrix = build_feature_matrix(rec, args.window_s, args.overlap,
                                  label=label)
    save_feature_csv(matrix, args.out)
    write_report({
        "command": "extract-features",
        "config": {"in": str(args.input), "out": str(args.out), "fs": args.fs,
                   "window_s": args.window_s, "overlap": args.overlap,
                   "label": label, "seed": seed},
        "results": {"n_rows": matrix.n_rows, "n_features": matrix.n_features,
                    "rejected_rows": rec.subject_meta.get("rejected_rows", 0)},
    }, report_path)
    return 0


def _write_history_csv(history, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "train_acc",
                         "val_loss", "val_acc"])
        for row in history:
            writer.writerow([row["epoch"], repr(row["train_loss"]),
                             repr(row["train_acc"]), repr(row["val_loss"]),
                             repr(row["val_acc"])])


def _cmd_train(args, seed: int) -> int:
    report_path = args.report or _default_report(args.model)
    _check_no_clobber([args.features],
                      [args.model, args.history, report_path])
    dataset = load_feature_csv(args.features)
    tc = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                     learning_rate=args.lr, grad_clip=args.grad_clip,
                     val_fraction=args.val_fraction, seed=seed)
    if args.model_kind == "gru":
        mc = ModelConfig.for_features(dataset.features.n_features,
                                      len(dataset.class_names),
                                      hidden_size=args.hidden, seed=seed)
        model, history = train(dataset.features, mc, tc)
        model_config = {"seq_len": mc.seq_len, "feat_dim": mc.feat_dim,
                        "hidden_size": mc.hidden_size,
                        "n_classes": mc.n_classes, "seed": mc.seed}
    else:
        model, history = train_linear_baseline(
            dataset.features, tc, n_classes=len(dataset.class_names))
        model_config = {"n_classes": len(dataset.class_names)}
    save_model(model, args.model)
    if args.history:
        _write_history_csv(history, args.history)
    write_report({
        "command": "train",
        "config": {"features": str(args.features), "model": str(args.model),
                   "history": args.history, "model_kind": args.model_kind,
                   "model_config": model_config,
                   "train_config": asdict(tc), "seed": seed},
        "results": {"final": history[-1], "n_rows": dataset.features.n_rows},
    }, report_path)
    return 0


def _cmd_eval(args, seed: int) -> int:
    report_path = args.report or _default_report(args.model).replace(
        ".report.json", ".eval-report.json")
    dataset = load_feature_csv(args.features)
    model = load_model(args.model)
    result = evaluate(model, dataset.features,
                      class_names=dataset.class_names)
    print(f"accuracy {result['accuracy']:.4f}")
    for i, name in enumerate(dataset.class_names):
        print(f"{name}: precision {result['precision'][i]:.4f} "
              f"recall {result['recall'][i]:.4f} f1 {result['f1'][i]:.4f}")
    write_report({
        "command": "eval",
        "config": {"features": str(args.features), "model": str(args.model),
                   "seed": seed},
        "results": {
            "accuracy": result["accuracy"],
            "precision": result["precision"],
            "recall": result["recall"],
            "f1": result["f1"],
            "flags": result["flags"],
            "confusion_counts": result["confusion"].counts,
            "class_names": dataset.class_names,
        },
    }, report_path)
    return 0


def _cmd_predict(args, seed: int) -> int:
    report_path = args.report or _default_report(args.out)
    _check_no_clobber([args.features], [args.out, report_path])
    loaded = load_feature_csv(args.features, require_label=False)
    matrix = loaded.features if isinstance(loaded, LabeledDataset) else loaded
    model = load_model(args.model)
    probs = model.predict_proba(matrix.rows)
    predicted = probs.argmax(axis=1)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "label", "class"]
                        + [f"p_{n}" for n in CLASS_NAMES])
        for i, (cls, p) in enumerate(zip(predicted, probs)):
            writer.writerow([i, int(cls), CLASS_NAMES[int(cls)]]
                            + [repr(float(v)) for v in p])
    write_report({
        "command": "predict",
        "config": {"features": str(args.features), "model": str(args.model),
                   "out": str(args.out), "seed": seed},
        "results": {"n_rows": int(len(predicted)),
                    "class_counts": {CLASS_NAMES[c]: int((predicted == c).sum())
                                     for c in range(len(CLASS_NAMES))}},
    }, report_path)
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "denoise": _cmd_denoise,
    "bench": _cmd_bench,
    "extract-features": _cmd_extract,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        seed = _resolve_seed(args.seed)
        return _HANDLERS[args.command](args, seed)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (EegScrubError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
