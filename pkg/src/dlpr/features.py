"""Classical time-domain EMG features (MAV, WL, ZC, SSC) for the baselines."""

from __future__ import annotations

import numpy as np

from . import dataio
from .errors import InvalidWindow

FEATURE_NAMES = ("mav", "wl", "zc", "ssc")


def td_features(samples, zc_threshold: float = 0.0, ssc_threshold: float = 0.0):
    """MAV, WL, ZC, SSC of one single-channel window.

    ZC counts sign changes whose amplitude step exceeds zc_threshold;
    SSC counts samples where the slope product exceeds ssc_threshold.
    Thresholds default to 0 per the ledger.

    Returns:
        (mav, wl, zc, ssc) with the counts as floats.
    """
    w = np.asarray(samples, dtype=np.float64)
    if w.ndim != 1 or w.size < 3:
        raise InvalidWindow("td_features needs a 1-D window of length >= 3")
    mav = float(np.mean(np.abs(w)))
    steps = np.diff(w)
    wl = float(np.sum(np.abs(steps)))
    # Sign predicates are evaluated on signs, not raw products: a product of
    # two tiny values underflows to +-0 and would drop true crossings.
    sign_change = np.sign(w[:-1]) * np.sign(w[1:]) < 0
    zc = int(np.sum(sign_change & (np.abs(steps) > zc_threshold)))
    d_prev = w[1:-1] - w[:-2]
    d_next = w[1:-1] - w[2:]
    if ssc_threshold == 0.0:
        ssc = int(np.sum(np.sign(d_prev) * np.sign(d_next) > 0))
    else:
        # With a positive threshold an underflowed product is below it anyway.
        ssc = int(np.sum(d_prev * d_next > ssc_threshold))
    return mav, wl, float(zc), float(ssc)


def window_feature_vector(channel_windows, zc_threshold=0.0, ssc_threshold=0.0) -> np.ndarray:
    """Channel-major [mav, wl, zc, ssc] x C vector for one multichannel window."""
    out = []
    for w in channel_windows:
        out.extend(td_features(w, zc_threshold, ssc_threshold))
    return np.asarray(out, dtype=np.float64)


def feature_header(channels: int) -> list[str]:
    """CSV column names: ch{c}_mav .. ch{c}_ssc per channel, then label."""
    cols = []
    for c in range(1, channels + 1):
        cols.extend(f"ch{c}_{name}" for name in FEATURE_NAMES)
    cols.append("label")
    return cols


def extract_feature_matrix(
    rec: "dataio.Recording",
    window_ms: float,
    increment_ms: float,
    zc_threshold: float = 0.0,
    ssc_threshold: float = 0.0,
):
    """Windowed TD feature matrix of one recording.

    Durations convert to samples with floor at the recording's rate; the
    windowing rule (and the trailing-window discard) is dataio.segment's.
    Row labels are the majority label inside each window.

    Returns:
        (matrix [n_windows, 4*C], labels [n_windows], starts [n_windows])
    """
    window = int(rec.sampling_rate * window_ms / 1000.0)
    shift = int(rec.sampling_rate * increment_ms / 1000.0)
    if window < 3 or shift < 1:
        raise InvalidWindow(
            f"{window_ms} ms / {increment_ms} ms at {rec.sampling_rate} Hz "
            f"gives window={window}, shift={shift}"
        )
    return extract_feature_matrix_samples(
        rec, window, shift, zc_threshold, ssc_threshold
    )


def extract_feature_matrix_samples(
    rec: "dataio.Recording",
    window: int,
    shift: int,
    zc_threshold: float = 0.0,
    ssc_threshold: float = 0.0,
):
    """Same as extract_feature_matrix but with window/shift already in samples."""
    windows, labels, starts = dataio.segment(rec, window, shift)
    rows = [
        window_feature_vector(w, zc_threshold, ssc_threshold) for w in windows
    ]
    return np.asarray(rows, dtype=np.float64), labels, starts
