"""Spectral-moment EMG motion classification: preprocessing, a from-scratch
1-D convolutional classifier, classical baselines, and a deterministic
train/evaluate pipeline."""

from .baselines import KnnModel, LdaModel
from .dataio import (
    Recording,
    SplitSpec,
    SubjectMeta,
    WindowedDataset,
    build_preproc_dataset,
    load_csv,
    load_dir,
    save_csv,
    segment,
    split,
    synth_dataset,
)
from .features import td_features, window_feature_vector
from .nn import ModelSpec, Network
from .signal_core import (
    compute_moments,
    dft,
    diff,
    mpp_mzp,
    preprocess_window,
    window_moments,
)
from .trainer import (
    Metrics,
    Standardizer,
    TrainConfig,
    TrainedModel,
    accuracy,
    batch_sweep,
    evaluate,
    per_subject_report,
    train_dlpr,
)

__version__ = "1.0.0"

__all__ = [
    "KnnModel",
    "LdaModel",
    "Metrics",
    "ModelSpec",
    "Network",
    "Recording",
    "SplitSpec",
    "Standardizer",
    "SubjectMeta",
    "TrainConfig",
    "TrainedModel",
    "WindowedDataset",
    "accuracy",
    "batch_sweep",
    "build_preproc_dataset",
    "compute_moments",
    "dft",
    "diff",
    "evaluate",
    "load_csv",
    "load_dir",
    "mpp_mzp",
    "per_subject_report",
    "preprocess_window",
    "save_csv",
    "segment",
    "split",
    "synth_dataset",
    "td_features",
    "train_dlpr",
    "window_feature_vector",
    "window_moments",
    "__version__",
]
