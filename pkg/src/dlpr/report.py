"""Static figure rendering for finished runs: accuracy curves, confusion
heatmap, per-class recall, batch-sweep comparison, per-subject chart.

Everything renders headless to PNG files; the delimited outputs written
at training time stay the source of truth for numbers.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ParseError
from .trainer import Metrics, SubjectRow


def load_metrics(path: str | Path) -> Metrics:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return Metrics(
            accuracy=float(raw["accuracy"]),
            confusion=np.asarray(raw["confusion"], dtype=int),
            class_ids=[int(c) for c in raw["class_ids"]],
            training_time_sec=float(raw.get("training_time_sec", 0.0)),
            train_curve=[float(v) for v in raw.get("train_curve", [])],
            test_curve=[float(v) for v in raw.get("test_curve", [])],
            batch_size=raw.get("batch_size"),
            epochs=raw.get("epochs"),
            seed=raw.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed metrics: {exc}") from exc


def render_curves(metrics: Metrics, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    epochs = np.arange(1, len(metrics.train_curve) + 1)
    ax.plot(epochs, metrics.train_curve, label="train", linewidth=1.5)
    if metrics.test_curve:
        ax.plot(
            epochs[: len(metrics.test_curve)],
            metrics.test_curve,
            label="test",
            linewidth=1.5,
        )
    ax.set_xlabel("epoch")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    ax.set_title("Accuracy per epoch")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_confusion(metrics: Metrics, path: str | Path) -> None:
    cm = metrics.confusion
    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(cm, cmap="Blues")
    fig.colorbar(image, ax=ax, label="count")
    ticks = np.arange(len(metrics.class_ids))
    ax.set_xticks(ticks, [str(c) for c in metrics.class_ids])
    ax.set_yticks(ticks, [str(c) for c in metrics.class_ids])
    ax.set_xlabel("predicted class")
    ax.set_ylabel("true class")
    ax.set_title(f"Confusion matrix (accuracy {metrics.accuracy:.3f})")
    if len(metrics.class_ids) <= 12:
        threshold = cm.max() / 2 if cm.max() else 0
        for i in range(cm.shape[0]):
            for j in range(cm.shape[1]):
                ax.text(
                    j, i, str(int(cm[i, j])),
                    ha="center", va="center",
                    color="white" if cm[i, j] > threshold else "black",
                    fontsize=8,
                )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_recall(metrics: Metrics, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [str(c) for c in metrics.class_ids]
    ax.bar(labels, metrics.per_class_recall, color="tab:blue")
    ax.set_xlabel("class")
    ax.set_ylabel("recall")
    ax.set_ylim(0.0, 1.02)
    ax.grid(axis="y", alpha=0.3)
    ax.set_title("Per-class recall")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_sweep(results: Sequence[tuple[int, float, float]], path: str | Path) -> None:
    """Bar chart from (batch_size, accuracy, training_time_sec) triples."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    sizes = [str(s) for s, _, _ in results]
    left.bar(sizes, [a for _, a, _ in results], color="tab:blue")
    left.set_xlabel("batch size")
    left.set_ylabel("test accuracy")
    left.set_ylim(0.0, 1.02)
    left.grid(axis="y", alpha=0.3)
    right.bar(sizes, [t for _, _, t in results], color="tab:orange")
    right.set_xlabel("batch size")
    right.set_ylabel("training time (s)")
    right.grid(axis="y", alpha=0.3)
    fig.suptitle("Batch-size sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_subjects(rows: Sequence[SubjectRow], path: str | Path) -> None:
    """Accuracy bars per subject; when impairment scores exist, a second
    panel scatters accuracy against them."""
    scored = [r for r in rows if r.dash_score is not None]
    panels = 2 if scored else 1
    fig, axes = plt.subplots(1, panels, figsize=(4.5 * panels, 4))
    axes = np.atleast_1d(axes)
    axes[0].bar([r.subject_id for r in rows], [r.accuracy for r in rows], color="tab:blue")
    axes[0].set_xlabel("subject")
    axes[0].set_ylabel("accuracy")
    axes[0].set_ylim(0.0, 1.02)
    axes[0].grid(axis="y", alpha=0.3)
    if scored:
        axes[1].scatter(
            [r.dash_score for r in scored], [r.accuracy for r in scored], color="tab:red"
        )
        for r in scored:
            axes[1].annotate(r.subject_id, (r.dash_score, r.accuracy), fontsize=8)
        axes[1].set_xlabel("impairment score (0-100)")
        axes[1].set_ylabel("accuracy")
        axes[1].grid(alpha=0.3)
    fig.suptitle("Per-subject accuracy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_run_dir(run_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render every figure the artifacts in ``run_dir`` support and write a
    one-row summary.csv next to them; returns the created paths."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    metrics_path = run_dir / "metrics.json"
    if metrics_path.exists():
        metrics = load_metrics(metrics_path)
        target = out_dir / "confusion.png"
        render_confusion(metrics, target)
        created.append(target)
        target = out_dir / "recall.png"
        render_recall(metrics, target)
        created.append(target)
        if metrics.train_curve:
            target = out_dir / "curves.png"
            render_curves(metrics, target)
            created.append(target)
        summary = out_dir / "summary.csv"
        with open(summary, "w") as fh:
            fh.write("accuracy,classes,batch_size,epochs,seed,training_time_sec\n")
            fh.write(
                f"{metrics.accuracy!r},{len(metrics.class_ids)},"
                f"{metrics.batch_size},{metrics.epochs},{metrics.seed},"
                f"{metrics.training_time_sec!r}\n"
            )
        created.append(summary)

    sweep_path = run_dir / "sweep.csv"
    if sweep_path.exists():
        rows = []
        for line in sweep_path.read_text().splitlines()[1:]:
            size, acc, secs = line.split(",")
            rows.append((int(size), float(acc), float(secs)))
        if rows:
            target = out_dir / "sweep.png"
            render_sweep(rows, target)
            created.append(target)

    subjects_path = run_dir / "subjects.csv"
    if subjects_path.exists():
        rows = []
        for line in subjects_path.read_text().splitlines()[1:]:
            sid, dash, acc = line.split(",")
            rows.append(SubjectRow(sid, float(dash) if dash else None, float(acc)))
        if rows:
            target = out_dir / "subjects.png"
            render_subjects(rows, target)
            created.append(target)

    if not created:
        raise ParseError(f"{run_dir}: no renderable artifacts found")
    return created
