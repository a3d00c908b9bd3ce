"""Deterministic training loop, evaluation metrics, batch sweeps, and
per-subject accuracy reporting.

Inputs are z-scored per feature with training-split statistics; the
stats travel inside the model file so evaluation never needs the
training data.  One seed fixes initialization and every epoch's
shuffle, making repeat runs bit-identical apart from wall-clock time.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dataio import SubjectMeta, WindowedDataset
from .errors import ConfigError, DataError, NumericError
from .nn import Adam, ModelSpec, Network, load_network, save_network

DEFAULT_SWEEP_BATCHES = (50, 100, 150)


class Standardizer:
    """Per-feature z-scoring; near-zero spread columns pass through."""

    def __init__(self, mean: np.ndarray | None = None, std: np.ndarray | None = None):
        self.mean = mean
        self.std = std

    def fit(self, x: np.ndarray) -> "Standardizer":
        x = np.asarray(x, dtype=float)
        self.mean = x.mean(axis=0)
        std = x.std(axis=0)
        self.std = np.where(std < 1e-12, 1.0, std)
        return self

    def transform(self, x: np.ndarray) -> np.ndarray:
        if self.mean is None:
            raise ConfigError("standardizer used before fit")
        return (np.asarray(x, dtype=float) - self.mean) / self.std


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 100
    epochs: int = 50
    seed: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class Metrics:
    accuracy: float
    confusion: np.ndarray  # rows = truth, columns = prediction
    class_ids: list[int]
    training_time_sec: float = 0.0
    train_curve: list[float] = field(default_factory=list)
    test_curve: list[float] = field(default_factory=list)
    batch_size: int | None = None
    epochs: int | None = None
    seed: int | None = None

    @property
    def per_class_recall(self) -> np.ndarray:
        totals = self.confusion.sum(axis=1)
        return np.divide(
            np.diag(self.confusion).astype(float),
            totals,
            out=np.zeros(len(self.class_ids)),
            where=totals > 0,
        )

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "accuracy": self.accuracy,
            "class_ids": list(self.class_ids),
            "confusion": self.confusion.tolist(),
            "per_class_recall": self.per_class_recall.tolist(),
            "train_curve": list(self.train_curve),
            "test_curve": list(self.test_curve),
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
        }
        if include_timing:
            out["training_time_sec"] = self.training_time_sec
        return out

    def canonical_bytes(self) -> bytes:
        """Serialized metrics with the wall-clock field removed, for
        byte-level determinism comparisons."""
        return json.dumps(self.to_dict(include_timing=False), sort_keys=True).encode()

    def write(self, out_dir: str | Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "metrics.json", "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(out_dir / "confusion.csv", "w") as fh:
            fh.write("truth_class," + ",".join(f"pred_{c}" for c in self.class_ids) + "\n")
            for cid, row in zip(self.class_ids, self.confusion):
                fh.write(f"{cid}," + ",".join(str(int(v)) for v in row) + "\n")
        with open(out_dir / "curves.csv", "w") as fh:
            fh.write("epoch,train_accuracy,test_accuracy\n")
            for i, train_acc in enumerate(self.train_curve, start=1):
                if i <= len(self.test_curve):
                    fh.write(f"{i},{train_acc!r},{self.test_curve[i - 1]!r}\n")
                else:
                    fh.write(f"{i},{train_acc!r},\n")


def accuracy(preds: np.ndarray, truth: np.ndarray) -> float:
    preds = np.asarray(preds)
    truth = np.asarray(truth)
    if preds.shape != truth.shape:
        raise ConfigError(f"prediction shape {preds.shape} != truth {truth.shape}")
    if preds.size == 0:
        raise DataError("cannot score an empty prediction set")
    return float((preds == truth).mean())


def confusion_matrix(preds: np.ndarray, truth: np.ndarray, class_ids: Sequence[int]) -> np.ndarray:
    index = {c: i for i, c in enumerate(class_ids)}
    out = np.zeros((len(class_ids), len(class_ids)), dtype=int)
    for p, t in zip(np.asarray(preds).ravel(), np.asarray(truth).ravel()):
        out[index[int(t)], index[int(p)]] += 1
    return out


@dataclass
class TrainedModel:
    network: Network
    standardizer: Standardizer
    class_ids: list[int]
    seed: int

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        z = self.standardizer.transform(inputs)
        idx = self.network.predict(z)
        return np.asarray(self.class_ids)[idx]

    def save(self, path: str | Path) -> None:
        save_network(
            path,
            self.network,
            {
                "seed": self.seed,
                "class_ids": list(self.class_ids),
                "norm_mean": self.standardizer.mean.tolist(),
                "norm_std": self.standardizer.std.tolist(),
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> "TrainedModel":
        network, meta = load_network(path)
        std = Standardizer(
            mean=np.asarray(meta["norm_mean"], dtype=float),
            std=np.asarray(meta["norm_std"], dtype=float),
        )
        return cls(
            network=network,
            standardizer=std,
            class_ids=[int(c) for c in meta["class_ids"]],
            seed=int(meta["seed"]),
        )


def _check_dataset(ds: WindowedDataset, what: str) -> None:
    if len(ds.labels) == 0:
        raise DataError(f"{what} dataset is empty")


def train_dlpr(
    train_ds: WindowedDataset,
    config: TrainConfig,
    test_ds: WindowedDataset | None = None,
    spec: ModelSpec | None = None,
) -> tuple[TrainedModel, Metrics]:
    """Fit the network on ``train_ds``; when ``test_ds`` is given the
    final metrics and per-epoch test curve are scored on it, otherwise on
    the training data.  Raises NumericError with epoch/batch coordinates
    the moment the loss stops being finite."""
    _check_dataset(train_ds, "training")
    class_ids = [int(c) for c in np.unique(train_ds.labels)]
    if len(class_ids) < 2:
        raise DataError("training data must contain at least 2 classes")
    label_index = {c: i for i, c in enumerate(class_ids)}
    y = np.array([label_index[int(v)] for v in train_ds.labels])

    std = Standardizer().fit(train_ds.inputs)
    x = std.transform(train_ds.inputs)

    if spec is None:
        spec = ModelSpec.auto(x.shape[1], len(class_ids))
    elif spec.input_length != x.shape[1] or spec.num_classes != len(class_ids):
        raise ConfigError(
            f"spec geometry ({spec.input_length}, {spec.num_classes}) does not match "
            f"data ({x.shape[1]} features, {len(class_ids)} classes)"
        )

    rng = np.random.default_rng(config.seed)
    net = Network(spec, rng)
    opt = Adam(net.params(), lr=config.lr, beta1=config.beta1,
               beta2=config.beta2, eps=config.eps)
    model = TrainedModel(net, std, class_ids, config.seed)

    if test_ds is not None:
        _check_dataset(test_ds, "test")
        _check_label_cover(test_ds, class_ids)

    train_curve: list[float] = []
    test_curve: list[float] = []
    started = time.perf_counter()
    n = x.shape[0]
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for batch_no, start in enumerate(range(0, n, config.batch_size), start=1):
            take = order[start : start + config.batch_size]
            if take.size < 2:
                continue  # a lone trailing sample cannot feed batchnorm
            loss, _ = net.loss_and_grads(x[take], y[take])
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, batch {batch_no}"
                )
            opt.step(net.grads())
        train_curve.append(accuracy(model.predict(train_ds.inputs), train_ds.labels))
        if test_ds is not None:
            test_curve.append(accuracy(model.predict(test_ds.inputs), test_ds.labels))
    elapsed = time.perf_counter() - started

    scored = test_ds if test_ds is not None else train_ds
    preds = model.predict(scored.inputs)
    metrics = Metrics(
        accuracy=accuracy(preds, scored.labels),
        confusion=confusion_matrix(preds, scored.labels, class_ids),
        class_ids=class_ids,
        training_time_sec=elapsed,
        train_curve=train_curve,
        test_curve=test_curve,
        batch_size=config.batch_size,
        epochs=config.epochs,
        seed=config.seed,
    )
    return model, metrics


def _check_label_cover(ds: WindowedDataset, class_ids: Sequence[int]) -> None:
    extra = set(int(v) for v in np.unique(ds.labels)) - set(class_ids)
    if extra:
        raise ConfigError(f"data contains classes {sorted(extra)} unknown to the model")


def evaluate(model: TrainedModel, test_ds: WindowedDataset) -> Metrics:
    """Side-effect-free scoring; an empty test set is an error, not 0.0."""
    _check_dataset(test_ds, "test")
    _check_label_cover(test_ds, model.class_ids)
    preds = model.predict(test_ds.inputs)
    return Metrics(
        accuracy=accuracy(preds, test_ds.labels),
        confusion=confusion_matrix(preds, test_ds.labels, model.class_ids),
        class_ids=list(model.class_ids),
        seed=model.seed,
    )


def batch_sweep(
    train_ds: WindowedDataset,
    test_ds: WindowedDataset,
    config: TrainConfig,
    sizes: Sequence[int] = DEFAULT_SWEEP_BATCHES,
) -> list[tuple[int, Metrics]]:
    """Retrain once per batch size (same seed); results keep input order."""
    results = []
    for size in sizes:
        cfg = TrainConfig(
            batch_size=size, epochs=config.epochs, seed=config.seed,
            lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps,
        )
        _, metrics = train_dlpr(train_ds, cfg, test_ds)
        results.append((size, metrics))
    return results


@dataclass(frozen=True)
class SubjectRow:
    subject_id: str
    dash_score: float | None
    accuracy: float


def per_subject_report(
    entries: Iterable[tuple[SubjectMeta, TrainedModel, WindowedDataset]],
) -> list[SubjectRow]:
    """One row per evaluated subject, pairing accuracy with the clinical
    impairment score when one is on record."""
    rows = []
    for meta, model, ds in entries:
        metrics = evaluate(model, ds)
        rows.append(SubjectRow(str(meta.id), meta.dash_score, metrics.accuracy))
    return rows


def write_subject_csv(rows: Sequence[SubjectRow], path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("subject_id,dash_score,accuracy\n")
        for row in rows:
            dash = "" if row.dash_score is None else repr(float(row.dash_score))
            fh.write(f"{row.subject_id},{dash},{row.accuracy!r}\n")
