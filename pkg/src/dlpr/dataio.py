"""Dataset types, CSV ingestion, windowing, splitting, and synthetic EMG.

A recording is multichannel raw EMG with per-sample labels and repetition
ids.  The on-disk format is a CSV (``ch1..chC,label,repetition``) plus a
``key=value`` sidecar carrying the sampling rate and subject metadata.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    EmptyOutput,
    NonFiniteInput,
    ParseError,
    StratifyError,
)
from .signal_core import preprocess_window


@dataclass(frozen=True)
class SubjectMeta:
    id: str
    amputee: bool = False
    dash_score: float | None = None
    remaining_forearm_pct: float | None = None
    phantom_intensity: int | None = None

    def __post_init__(self):
        if self.dash_score is not None and not 0.0 <= self.dash_score <= 100.0:
            raise ConfigError(f"dash_score {self.dash_score} outside [0, 100]")


@dataclass(frozen=True)
class Recording:
    """Multichannel signal [C, N] with per-sample labels and repetition ids."""

    channels: np.ndarray
    sampling_rate: float
    labels: np.ndarray
    subject: SubjectMeta
    repetition: np.ndarray

    def __post_init__(self):
        chans = np.asarray(self.channels, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        reps = np.asarray(self.repetition, dtype=np.int64)
        if chans.ndim != 2:
            raise ConfigError(f"channels must be [C, N], got shape {chans.shape}")
        if self.sampling_rate <= 0:
            raise ConfigError(f"sampling_rate must be > 0, got {self.sampling_rate}")
        n = chans.shape[1]
        if labels.shape != (n,) or reps.shape != (n,):
            raise ConfigError("labels/repetition length must match channel length")
        if not np.all(np.isfinite(chans)):
            raise NonFiniteInput(f"recording {self.subject.id} contains NaN/Inf")
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "repetition", reps)

    @property
    def num_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def num_samples(self) -> int:
        return self.channels.shape[1]


@dataclass(frozen=True)
class WindowedDataset:
    """Feature rows with labels, subject ids, and window provenance."""

    inputs: np.ndarray          # [n, d] float64
    labels: np.ndarray          # [n] int64
    subject_ids: np.ndarray     # [n] str
    provenance: np.ndarray      # [n] window start sample indices
    repetitions: np.ndarray | None = None

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        n = inputs.shape[0]
        if labels.shape[0] != n or len(self.subject_ids) != n or len(self.provenance) != n:
            raise ConfigError("dataset columns must have equal length")
        if self.repetitions is not None and len(self.repetitions) != n:
            raise ConfigError("repetitions length must match rows")
        if inputs.size and not np.all(np.isfinite(inputs)):
            raise NonFiniteInput("dataset inputs contain NaN/Inf")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subject_ids", np.asarray(self.subject_ids))
        object.__setattr__(self, "provenance", np.asarray(self.provenance, dtype=np.int64))
        if self.repetitions is not None:
            object.__setattr__(
                self, "repetitions", np.asarray(self.repetitions, dtype=np.int64)
            )

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def subset(self, idx) -> "WindowedDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return WindowedDataset(
            inputs=self.inputs[idx],
            labels=self.labels[idx],
            subject_ids=self.subject_ids[idx],
            provenance=self.provenance[idx],
            repetitions=None if self.repetitions is None else self.repetitions[idx],
        )


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.6
    seed: int = 0
    stratified: bool = True
    by_repetition: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction {self.train_fraction} outside (0, 1)")


def majority_label(values) -> int:
    """Most frequent value; ties go to the smallest value."""
    uniq, counts = np.unique(np.asarray(values), return_counts=True)
    return int(uniq[np.argmax(counts)])


def segment(rec: Recording, window: int, shift: int):
    """Slice a recording into aligned multichannel windows.

    Returns (windows [n, C, window] read-only views, labels [n], starts [n]);
    n = floor((N - window)/shift) + 1, the trailing partial window dropped.
    """
    if shift < 1:
        raise ConfigError(f"shift must be >= 1, got {shift}")
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    n_samples = rec.num_samples
    if window > n_samples:
        raise EmptyOutput(
            f"window {window} longer than recording ({n_samples} samples)"
        )
    views = np.lib.stride_tricks.sliding_window_view(rec.channels, window, axis=1)
    windows = views[:, ::shift, :].swapaxes(0, 1)  # [n, C, window]
    count = (n_samples - window) // shift + 1
    starts = np.arange(count, dtype=np.int64) * shift
    labels = np.asarray(
        [majority_label(rec.labels[s : s + window]) for s in starts], dtype=np.int64
    )
    return windows, labels, starts


def _window_majorities(values: np.ndarray, starts: np.ndarray, window: int) -> np.ndarray:
    return np.asarray(
        [majority_label(values[s : s + window]) for s in starts], dtype=np.int64
    )


def build_preproc_dataset(recordings, window: int, shift: int) -> WindowedDataset:
    """Segment recordings and map every window through the MPP/MZP transform."""
    recs = list(recordings)
    if not recs:
        raise EmptyOutput("no recordings to preprocess")
    n_chan = recs[0].num_channels
    rows, labels, subjects, starts_all, reps = [], [], [], [], []
    for rec in recs:
        if rec.num_channels != n_chan:
            raise ConfigError(
                f"recording {rec.subject.id} has {rec.num_channels} channels, "
                f"expected {n_chan}"
            )
        windows, win_labels, starts = segment(rec, window, shift)
        rows.extend(preprocess_window(w) for w in windows)
        labels.append(win_labels)
        subjects.extend([rec.subject.id] * len(starts))
        starts_all.append(starts)
        reps.append(_window_majorities(rec.repetition, starts, window))
    return WindowedDataset(
        inputs=np.asarray(rows, dtype=np.float64),
        labels=np.concatenate(labels),
        subject_ids=np.asarray(subjects),
        provenance=np.concatenate(starts_all),
        repetitions=np.concatenate(reps),
    )


def split(ds: WindowedDataset, spec: SplitSpec):
    """Deterministic train/test partition of a windowed dataset."""
    rng = np.random.default_rng(spec.seed)
    n = len(ds)
    if n < 2:
        raise ConfigError(f"cannot split {n} windows")
    if spec.by_repetition:
        train_idx, test_idx = _split_by_repetition(ds, spec, rng)
    elif spec.stratified:
        train_idx, test_idx = _split_stratified(ds, spec, rng)
    else:
        perm = rng.permutation(n)
        n_train = int(round(spec.train_fraction * n))
        n_train = min(max(n_train, 1), n - 1)
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])
    return ds.subset(train_idx), ds.subset(test_idx)


def _split_stratified(ds, spec, rng):
    train_parts, test_parts = [], []
    for cls in np.unique(ds.labels):
        idx = np.flatnonzero(ds.labels == cls)
        if idx.size < 2:
            raise StratifyError(
                f"class {cls} has {idx.size} window(s); need >= 2 to stratify"
            )
        perm = rng.permutation(idx)
        n_train = int(round(spec.train_fraction * idx.size))
        n_train = min(max(n_train, 1), idx.size - 1)
        train_parts.append(perm[:n_train])
        test_parts.append(perm[n_train:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def _split_by_repetition(ds, spec, rng):
    if ds.repetitions is None:
        raise ConfigError("dataset carries no repetition ids")
    reps = np.unique(ds.repetitions)
    if reps.size < 2:
        raise StratifyError("need >= 2 repetitions to split by repetition")
    order = rng.permutation(reps)
    target = spec.train_fraction * len(ds)
    train_reps, count = [], 0
    for rep in order:
        if count >= target and len(train_reps) < reps.size - 1:
            break
        if len(train_reps) == reps.size - 1:
            break
        train_reps.append(rep)
        count += int(np.sum(ds.repetitions == rep))
    mask = np.isin(ds.repetitions, train_reps)
    return np.flatnonzero(mask), np.flatnonzero(~mask)


# ---------------------------------------------------------------------------
# CSV + sidecar metadata format
# ---------------------------------------------------------------------------

_META_BOOL = {"true": True, "false": False, "1": True, "0": False}


def default_meta_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".meta.txt")


def _parse_meta(meta_path: Path) -> tuple[float, SubjectMeta]:
    if not meta_path.exists():
        raise ParseError(f"{meta_path}: metadata file not found")
    pairs = {}
    for lineno, raw in enumerate(
        meta_path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{meta_path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    try:
        rate = float(pairs["sampling_rate"])
        subject_id = pairs["subject_id"]
        amputee = _META_BOOL[pairs["amputee"].lower()]
    except KeyError as exc:
        raise ParseError(f"{meta_path}: missing required key {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{meta_path}: bad value ({exc})") from exc
    meta = SubjectMeta(
        id=subject_id,
        amputee=amputee,
        dash_score=float(pairs["dash_score"]) if "dash_score" in pairs else None,
        remaining_forearm_pct=(
            float(pairs["remaining_forearm_pct"])
            if "remaining_forearm_pct" in pairs
            else None
        ),
        phantom_intensity=(
            int(pairs["phantom_intensity"]) if "phantom_intensity" in pairs else None
        ),
    )
    return rate, meta


def load_csv(path, meta_path=None) -> Recording:
    """Read one recording CSV (``ch1..chC,label,repetition``) plus sidecar."""
    path = Path(path)
    meta_path = default_meta_path(path) if meta_path is None else Path(meta_path)
    rate, meta = _parse_meta(meta_path)

    with path.open("r", encoding="utf-8", newline="") as fh:
        header_line = fh.readline().strip()
        if not header_line:
            raise ParseError(f"{path}: empty file")
        header = header_line.split(",")
        if len(header) < 3 or header[-2:] != ["label", "repetition"]:
            raise ParseError(
                f"{path}: header must be ch1..chC,label,repetition, got {header_line!r}"
            )
        n_chan = len(header) - 2
        expected = [f"ch{i}" for i in range(1, n_chan + 1)]
        if header[:n_chan] != expected:
            raise ParseError(f"{path}: channel columns must be {expected}")

        chan_rows, labels, reps = [], [], []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != n_chan + 2:
                raise ParseError(
                    f"{path}: row {lineno} has {len(fields)} fields, expected {n_chan + 2}"
                )
            try:
                values = [float(v) for v in fields[:n_chan]]
                label = int(fields[n_chan])
                rep = int(fields[n_chan + 1])
            except ValueError as exc:
                raise ParseError(f"{path}: row {lineno}: {exc}") from exc
            if not all(np.isfinite(values)):
                raise ParseError(f"{path}: row {lineno} contains a non-finite value")
            chan_rows.append(values)
            labels.append(label)
            reps.append(rep)

    if not chan_rows:
        raise ParseError(f"{path}: no data rows")
    return Recording(
        channels=np.asarray(chan_rows, dtype=np.float64).T,
        sampling_rate=rate,
        labels=np.asarray(labels, dtype=np.int64),
        subject=meta,
        repetition=np.asarray(reps, dtype=np.int64),
    )


def save_csv(rec: Recording, path, meta_path=None) -> None:
    """Write a recording and its sidecar; floats use shortest round-trip text."""
    path = Path(path)
    meta_path = default_meta_path(path) if meta_path is None else Path(meta_path)
    n_chan = rec.num_channels
    header = ",".join([f"ch{i}" for i in range(1, n_chan + 1)] + ["label", "repetition"])
    cols = rec.channels.T
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row, label, rep in zip(cols, rec.labels, rec.repetition):
            fh.write(
                ",".join(repr(float(v)) for v in row)
                + f",{int(label)},{int(rep)}\n"
            )
    lines = [
        f"sampling_rate={rec.sampling_rate!r}",
        f"subject_id={rec.subject.id}",
        f"amputee={'true' if rec.subject.amputee else 'false'}",
    ]
    if rec.subject.dash_score is not None:
        lines.append(f"dash_score={rec.subject.dash_score!r}")
    if rec.subject.remaining_forearm_pct is not None:
        lines.append(f"remaining_forearm_pct={rec.subject.remaining_forearm_pct!r}")
    if rec.subject.phantom_intensity is not None:
        lines.append(f"phantom_intensity={rec.subject.phantom_intensity}")
    meta_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dir(path, workers: int = 1) -> list[Recording]:
    """Load every recording CSV in a directory, sorted by filename."""
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise ParseError(f"{path}: no .csv recordings found")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(load_csv, files))
    return [load_csv(f) for f in files]


# ---------------------------------------------------------------------------
# Synthetic EMG
# ---------------------------------------------------------------------------


def synth_dataset(
    classes: int,
    channels: int,
    rate: float = 2000.0,
    seed: int = 0,
    windows_per_class: int = 120,
    window: int = 300,
    shift: int = 50,
    envelope_ratio: float = 10.0,
    repetitions: int = 6,
) -> list[Recording]:
    """Generate one recording per class, separable by construction.

    Each class is band-limited Gaussian noise whose per-channel amplitude
    follows a class-specific binary boost pattern (quiet channels at 1,
    boosted channels at envelope_ratio), plus a class-specific smoothing
    width so the moment ratios differ as well.  Deterministic per seed.
    """
    if classes < 2:
        raise ConfigError(f"need >= 2 classes, got {classes}")
    if channels < 1:
        raise ConfigError(f"need >= 1 channel, got {channels}")
    if envelope_ratio <= 1.0:
        raise ConfigError(f"envelope_ratio must be > 1, got {envelope_ratio}")
    rng = np.random.default_rng(seed)
    n_samples = window + shift * (windows_per_class - 1)
    recs = []
    for cls in range(classes):
        noise = rng.standard_normal((channels, n_samples))
        # Class-specific low-pass width shifts the difference moments.
        width = 2 + (cls % 4)
        kernel = np.ones(width) / width
        smooth = np.vstack([np.convolve(ch, kernel, mode="same") for ch in noise])
        amp = _envelope_profile(cls, channels, envelope_ratio)
        signal = smooth * amp[:, None]
        labels = np.full(n_samples, cls, dtype=np.int64)
        block = max(1, n_samples // repetitions)
        reps = np.minimum(np.arange(n_samples) // block, repetitions - 1) + 1
        recs.append(
            Recording(
                channels=signal,
                sampling_rate=rate,
                labels=labels,
                subject=SubjectMeta(id=f"synth{seed}", amputee=False),
                repetition=reps.astype(np.int64),
            )
        )
    return recs


def _envelope_profile(cls: int, channels: int, ratio: float) -> np.ndarray:
    # Binary channel-boost pattern from the class index; classes beyond the
    # pattern capacity pick up an extra overall gain so they stay distinct.
    capacity = 2 ** min(channels, 30)
    code = (cls + 1) % capacity
    gain = 1.0 + (cls + 1) // capacity
    amp = np.ones(channels)
    for c in range(channels):
        if (code >> (c % 30)) & 1:
            amp[c] = ratio
    return amp * gain


def save_recording_set(recs, out_dir) -> list[Path]:
    """Write one CSV (+ sidecar) per recording: class_00.csv, class_01.csv, ..."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, rec in enumerate(recs):
        p = out / f"class_{i:02d}.csv"
        save_csv(rec, p)
        paths.append(p)
    return paths
