"""From-scratch 1-D convolutional network: layers, optimizer, geometry,
gradient checks, and the DLPRM1 model file format."""

from .adam import Adam
from .gradcheck import (
    CheckResult,
    check_all_layers,
    check_full_model,
    numeric_gradient,
    relative_error,
)
from .layers import (
    BatchNorm,
    Conv1D,
    Dense,
    GlobalAvgPool,
    Layer,
    MaxPool,
    ReLU,
    cross_entropy_loss,
    he_uniform,
    softmax,
)
from .model import (
    CANONICAL_FC,
    CANONICAL_FILTERS,
    CANONICAL_KERNELS,
    ModelSpec,
    Network,
    toy_spec,
)
from .serialize import MAGIC, load_network, save_network

__all__ = [
    "Adam",
    "BatchNorm",
    "CANONICAL_FC",
    "CANONICAL_FILTERS",
    "CANONICAL_KERNELS",
    "CheckResult",
    "Conv1D",
    "Dense",
    "GlobalAvgPool",
    "Layer",
    "MAGIC",
    "MaxPool",
    "ModelSpec",
    "Network",
    "ReLU",
    "check_all_layers",
    "check_full_model",
    "cross_entropy_loss",
    "he_uniform",
    "load_network",
    "numeric_gradient",
    "relative_error",
    "save_network",
    "softmax",
    "toy_spec",
]
