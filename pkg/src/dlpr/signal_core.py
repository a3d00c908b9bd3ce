"""Spectral-moment signal math and the MPP/MZP preprocessing transform.

All operations are pure functions on 1-D float64 arrays.  Moments are
computed from time-domain differences; the DFT route exists only as an
independent energy oracle for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelMismatch, InvalidWindow, NonFiniteInput

# Ratio denominators below this evaluate to 0 (constant/zero windows).
EPS_DENOM = 1e-12


@dataclass(frozen=True)
class MomentSet:
    """Moment-derived quantities of one window: mu0/mu2/mu4 plus the
    peak and zero-crossing ratios and their power-weighted products."""

    mu0: float
    mu2: float
    mu4: float
    psi: float = 0.0
    phi: float = 0.0
    mpp: float = 0.0
    mzp: float = 0.0


@dataclass(frozen=True)
class Spectrum:
    """DFT bins and per-bin energy of one window (test oracle only)."""

    bins: np.ndarray   # complex, length T
    energy: np.ndarray  # real, length T, |bin|^2 / T


def _as_window(samples, min_len: int) -> np.ndarray:
    w = np.asarray(samples, dtype=np.float64)
    if w.ndim != 1:
        raise InvalidWindow(f"window must be 1-D, got shape {w.shape}")
    if w.size < min_len:
        raise InvalidWindow(f"window length {w.size} < required {min_len}")
    if not np.all(np.isfinite(w)):
        raise NonFiniteInput("window contains NaN or Inf")
    return w


def diff(samples) -> np.ndarray:
    """Forward first difference; output length shrinks by one."""
    w = _as_window(samples, 2)
    return np.diff(w)


def compute_moments(samples) -> MomentSet:
    """Zeroth, second, and fourth moments of a window.

    mu0 is the root energy of the signal, mu2 of its first difference,
    mu4 of its second difference.  Requires length >= 3 so the second
    difference is non-empty.
    """
    w = _as_window(samples, 3)
    d1 = np.diff(w)
    d2 = np.diff(d1)
    mu0 = float(np.sqrt(np.dot(w, w)))
    mu2 = float(np.sqrt(np.dot(d1, d1)))
    mu4 = float(np.sqrt(np.dot(d2, d2)))
    return MomentSet(mu0=mu0, mu2=mu2, mu4=mu4)


def _guarded_ratio(num: float, den: float) -> float:
    return 0.0 if den < EPS_DENOM else num / den


def mpp_mzp(m: MomentSet) -> MomentSet:
    """Fill psi/phi ratios and the MPP/MZP products from raw moments.

    psi = mu4/mu2 (peak ratio), phi = mu2/mu0 (zero-crossing ratio);
    denominators below EPS_DENOM give 0, so a constant or all-zero
    window maps to an all-zero result.
    """
    for name in ("mu0", "mu2", "mu4"):
        v = getattr(m, name)
        if not np.isfinite(v) or v < 0:
            raise NonFiniteInput(f"{name}={v} must be finite and >= 0")
    psi = _guarded_ratio(m.mu4, m.mu2)
    phi = _guarded_ratio(m.mu2, m.mu0)
    return MomentSet(
        mu0=m.mu0,
        mu2=m.mu2,
        mu4=m.mu4,
        psi=psi,
        phi=phi,
        mpp=m.mu0 * psi,
        mzp=m.mu0 * phi,
    )


def window_moments(samples) -> MomentSet:
    """compute_moments followed by mpp_mzp."""
    return mpp_mzp(compute_moments(samples))


def preprocess_window(channel_windows) -> np.ndarray:
    """Map one multichannel window to its 2C preprocessing vector.

    Layout is [MPP_1..MPP_C, MZP_1..MZP_C]; channel count alone
    determines where each entry lives.
    """
    if len(channel_windows) < 1:
        raise ChannelMismatch("need at least one channel")
    windows = [np.asarray(w, dtype=np.float64) for w in channel_windows]
    length = windows[0].size
    for i, w in enumerate(windows):
        if w.size != length:
            raise ChannelMismatch(
                f"channel {i} has length {w.size}, expected {length}"
            )
    moments = [window_moments(w) for w in windows]
    mpps = [m.mpp for m in moments]
    mzps = [m.mzp for m in moments]
    return np.asarray(mpps + mzps, dtype=np.float64)


def dft(samples) -> Spectrum:
    """Unnormalized forward DFT with per-bin energy |X[k]|^2 / T.

    Used as the independent Parseval oracle: sum(x^2) == sum(energy).
    """
    w = _as_window(samples, 1)
    bins = np.fft.fft(w)
    energy = (bins.real**2 + bins.imag**2) / w.size
    return Spectrum(bins=bins, energy=energy)
