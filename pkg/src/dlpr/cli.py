"""Command-line pipeline: synth | preprocess | features | train | eval |
sweep | gradcheck | report.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Diagnostics go to standard error; results go to files and standard
output.  ``DLPR_THREADS`` caps worker parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .dataio import (
    Recording,
    SplitSpec,
    build_preproc_dataset,
    load_dir,
    save_recording_set,
    split,
    synth_dataset,
)
from .errors import DataError, DlprError, NumericError
from .features import extract_feature_matrix_samples, feature_header
from .nn import check_all_layers
from .report import render_run_dir
from .trainer import (
    Metrics,
    TrainConfig,
    TrainedModel,
    batch_sweep,
    evaluate,
    train_dlpr,
)


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage failures exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def thread_cap() -> int:
    """Worker count from DLPR_THREADS; 0 or unset means auto."""
    raw = os.environ.get("DLPR_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"DLPR_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise UsageError(f"DLPR_THREADS must be >= 0, got {value}")
    if value == 0:
        return min(8, os.cpu_count() or 1)
    return value


def _add_window_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, help="window length in samples")
    p.add_argument("--shift", type=int, help="window shift in samples")
    p.add_argument("--window-ms", type=float, help="window length in milliseconds")
    p.add_argument("--increment-ms", type=float, help="window shift in milliseconds")


def _resolve_window(args, recordings: list[Recording]) -> tuple[int, int]:
    """Turn the flag pair into (window, shift) samples; ms divides by the
    common sampling rate with floor."""
    samples_mode = args.window is not None or args.shift is not None
    ms_mode = args.window_ms is not None or args.increment_ms is not None
    if samples_mode and ms_mode:
        raise UsageError("--window/--shift and --window-ms/--increment-ms are exclusive")
    if samples_mode:
        if args.window is None or args.shift is None:
            raise UsageError("--window and --shift must be given together")
        return args.window, args.shift
    if ms_mode:
        if args.window_ms is None or args.increment_ms is None:
            raise UsageError("--window-ms and --increment-ms must be given together")
        rates = {rec.sampling_rate for rec in recordings}
        if len(rates) > 1:
            raise DataError(
                f"mixed sampling rates {sorted(rates)}; use sample-based flags"
            )
        rate = rates.pop()
        return int(rate * args.window_ms / 1000.0), int(rate * args.increment_ms / 1000.0)
    raise UsageError("window flags required: --window/--shift or --window-ms/--increment-ms")


def _load_recordings(data_dir: str) -> list[Recording]:
    return load_dir(data_dir, workers=thread_cap())


def _split_spec(args) -> SplitSpec:
    return SplitSpec(
        train_fraction=args.split_frac,
        seed=args.seed if args.split_seed is None else args.split_seed,
        stratified=not args.no_stratify,
        by_repetition=args.by_repetition,
    )


def _add_split_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--split-frac", type=float, default=0.6,
                   help="training fraction (default 0.6)")
    p.add_argument("--split-seed", type=int, default=None,
                   help="split shuffle seed (defaults to --seed)")
    p.add_argument("--no-stratify", action="store_true",
                   help="plain shuffled split instead of per-class balance")
    p.add_argument("--by-repetition", action="store_true",
                   help="split whole repetitions instead of windows")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    recs = synth_dataset(
        classes=args.classes,
        channels=args.channels,
        rate=args.rate,
        seed=args.seed,
        windows_per_class=args.windows_per_class,
        window=args.window,
        shift=args.shift,
        envelope_ratio=args.envelope_ratio,
        repetitions=args.repetitions,
    )
    paths = save_recording_set(recs, args.out)
    print(f"wrote {len(paths)} recordings to {args.out}")
    return 0


def cmd_preprocess(args) -> int:
    recs = _load_recordings(args.data)
    window, shift = _resolve_window(args, recs)
    ds = build_preproc_dataset(recs, window, shift)
    channels = ds.inputs.shape[1] // 2
    header = (
        [f"mpp_{c}" for c in range(1, channels + 1)]
        + [f"mzp_{c}" for c in range(1, channels + 1)]
        + ["label", "subject", "start"]
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row, label, subject, start in zip(
            ds.inputs, ds.labels, ds.subject_ids, ds.provenance
        ):
            cells = [repr(float(v)) for v in row]
            fh.write(",".join(cells + [str(int(label)), str(subject), str(int(start))]) + "\n")
    print(f"wrote {len(ds.labels)} vectors to {out}")
    return 0


def cmd_features(args) -> int:
    recs = _load_recordings(args.data)
    window, shift = _resolve_window(args, recs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    total = 0
    with open(out, "w") as fh:
        header = feature_header(recs[0].num_channels) + ["subject", "start"]
        fh.write(",".join(header) + "\n")
        for rec in recs:
            matrix, labels, starts = extract_feature_matrix_samples(
                rec, window, shift, args.zc_threshold, args.ssc_threshold
            )
            for row, label, start in zip(matrix, labels, starts):
                cells = [repr(float(v)) for v in row]
                fh.write(
                    ",".join(cells + [str(int(label)), str(rec.subject.id), str(int(start))])
                    + "\n"
                )
            total += len(labels)
    print(f"wrote {total} feature rows to {out}")
    return 0


def _train_core(args) -> tuple[TrainedModel, Metrics, "np.ndarray"]:
    recs = _load_recordings(args.data)
    window, shift = _resolve_window(args, recs)
    ds = build_preproc_dataset(recs, window, shift)
    train_ds, test_ds = split(ds, _split_spec(args))
    cfg = TrainConfig(
        batch_size=args.batch, epochs=args.epochs, seed=args.seed, lr=args.lr
    )
    model, metrics = train_dlpr(train_ds, cfg, test_ds)
    return model, metrics, test_ds


def cmd_train(args) -> int:
    model, metrics, _ = _train_core(args)
    out = Path(args.out)
    metrics.write(out)
    model.save(out / "model.dlprm")
    print(
        f"test accuracy {metrics.accuracy:.4f} after {metrics.epochs} epochs "
        f"(batch {metrics.batch_size}, seed {metrics.seed}); results in {out}"
    )
    return 0


def cmd_eval(args) -> int:
    model = TrainedModel.load(args.model)
    recs = _load_recordings(args.data)
    window, shift = _resolve_window(args, recs)
    ds = build_preproc_dataset(recs, window, shift)
    metrics = evaluate(model, ds)
    out = Path(args.out)
    metrics.write(out)
    print(f"accuracy {metrics.accuracy:.4f} on {len(ds.labels)} windows; results in {out}")
    return 0


def cmd_sweep(args) -> int:
    try:
        sizes = [int(s) for s in args.batches.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--batches must be comma-separated integers, got {args.batches!r}")
    if not sizes:
        raise UsageError("--batches is empty")
    recs = _load_recordings(args.data)
    window, shift = _resolve_window(args, recs)
    ds = build_preproc_dataset(recs, window, shift)
    train_ds, test_ds = split(ds, _split_spec(args))
    cfg = TrainConfig(epochs=args.epochs, seed=args.seed, lr=args.lr)
    results = batch_sweep(train_ds, test_ds, cfg, sizes=sizes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w") as fh:
        fh.write("batch_size,accuracy,training_time_sec\n")
        for size, metrics in results:
            fh.write(f"{size},{metrics.accuracy!r},{metrics.training_time_sec!r}\n")
    for size, metrics in results:
        with open(out / f"metrics_b{size}.json", "w") as fh:
            json.dump(metrics.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"batch {size}: accuracy {metrics.accuracy:.4f}")
    print(f"sweep results in {out}")
    return 0


def cmd_gradcheck(args) -> int:
    results = check_all_layers(seed=args.seed)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:18s} max_rel_err={r.max_error:.3e} tol={r.tolerance:g} {status}")
        failed += 0 if r.passed else 1
    if failed:
        print(f"{failed} gradient check(s) failed", file=sys.stderr)
        return 3
    return 0


def cmd_report(args) -> int:
    created = render_run_dir(args.run_dir, args.out_dir)
    for path in created:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dlpr",
        description="Spectral-moment EMG motion classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic separable EMG dataset")
    p.add_argument("--classes", type=int, required=True, help="number of motion classes")
    p.add_argument("--channels", type=int, required=True, help="electrode channels")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--rate", type=float, default=2000.0, help="sampling rate Hz (default 2000)")
    p.add_argument("--windows-per-class", type=int, default=120,
                   help="windows each class should yield (default 120)")
    p.add_argument("--window", type=int, default=300, help="window used for sizing (default 300)")
    p.add_argument("--shift", type=int, default=50, help="shift used for sizing (default 50)")
    p.add_argument("--envelope-ratio", type=float, default=10.0,
                   help="boosted/quiet channel amplitude ratio (default 10)")
    p.add_argument("--repetitions", type=int, default=6,
                   help="repetition blocks per recording (default 6)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="export spectral-moment vectors as CSV")
    p.add_argument("--data", required=True, help="directory of recording CSVs")
    _add_window_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("features", help="export classical TD features as CSV")
    p.add_argument("--data", required=True, help="directory of recording CSVs")
    _add_window_flags(p)
    p.add_argument("--zc-threshold", type=float, default=0.0,
                   help="zero-crossing amplitude threshold (default 0)")
    p.add_argument("--ssc-threshold", type=float, default=0.0,
                   help="slope-sign-change threshold (default 0)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train the network on a recording directory")
    p.add_argument("--data", required=True, help="directory of recording CSVs")
    _add_window_flags(p)
    p.add_argument("--batch", type=int, default=100, help="batch size (default 100)")
    p.add_argument("--epochs", type=int, default=50, help="training epochs (default 50)")
    p.add_argument("--seed", type=int, required=True,
                   help="training seed (required; no silent nondeterminism)")
    p.add_argument("--lr", type=float, default=1e-3, help="learning rate (default 1e-3)")
    _add_split_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a saved model on a recording directory")
    p.add_argument("--model", required=True, help="path to a .dlprm model file")
    p.add_argument("--data", required=True, help="directory of recording CSVs")
    _add_window_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="retrain across batch sizes and compare")
    p.add_argument("--data", required=True, help="directory of recording CSVs")
    _add_window_flags(p)
    p.add_argument("--batches", default="50,100,150",
                   help="comma-separated batch sizes (default 50,100,150)")
    p.add_argument("--epochs", type=int, default=50, help="training epochs (default 50)")
    p.add_argument("--seed", type=int, required=True, help="training seed (required)")
    p.add_argument("--lr", type=float, default=1e-3, help="learning rate (default 1e-3)")
    _add_split_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gradcheck", help="finite-difference checks for every layer")
    p.add_argument("--seed", type=int, default=0, help="check seed (default 0)")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("report", help="render figures for a finished run directory")
    p.add_argument("--run-dir", required=True, help="directory with metrics.json etc.")
    p.add_argument("--out-dir", default=None,
                   help="where to put figures (default: the run directory)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dlpr: error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"dlpr: numeric failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"dlpr: data error: {exc}", file=sys.stderr)
        return 2
    except DlprError as exc:
        print(f"dlpr: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dlpr: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
