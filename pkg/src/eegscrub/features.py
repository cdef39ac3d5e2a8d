"""Epoch-level feature extraction: band powers, spectral entropy, time stats.

Each epoch of each channel contributes 12 features (5 band powers, spectral
entropy, 6 time-domain moments), concatenated per channel into one flat row,
matching the flat feature-vector shape of pre-extracted public datasets.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .core import Recording, Signal, segment_epochs
from .errors import DegenerateInputError

BANDS = (
    ("delta", 0.5, 4.0),
    ("theta", 4.0, 8.0),
    ("alpha", 8.0, 13.0),
    ("beta", 13.0, 30.0),
    ("gamma", 30.0, 45.0),
)
STAT_NAMES = ("mean", "variance", "min", "max", "skewness", "kurtosis")
FEATURES_PER_CHANNEL = len(BANDS) + 1 + len(STAT_NAMES)


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-epoch feature table with optional integer class labels."""

    rows: np.ndarray
    feature_names: tuple
    labels: tuple | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise ValueError("feature matrix must be finite")
        names = tuple(str(n) for n in self.feature_names)
        if len(names) != rows.shape[1]:
            raise ValueError(
                f"{len(names)} names for {rows.shape[1]} columns"
            )
        labels = self.labels
        if labels is not None:
            labels = tuple(int(v) for v in labels)
            if len(labels) != rows.shape[0]:
                raise ValueError(
                    f"{len(labels)} labels for {rows.shape[0]} rows"
                )
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]


def welch_psd(signal: Signal, seg_len: int = 256, overlap: float = 0.5):
    """Averaged Hann-windowed periodograms; returns (freqs, psd)."""
    seg_len = int(seg_len)
    if seg_len < 8:
        raise ValueError(f"seg_len must be >= 8, got {seg_len}")
    if seg_len > len(signal):
        raise ValueError(
            f"seg_len {seg_len} exceeds signal length {len(signal)}"
        )
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must be in [0, 1), got {overlap}")
    freqs, psd = sps.welch(
        signal.samples,
        fs=signal.fs,
        window="hann",
        nperseg=seg_len,
        noverlap=int(seg_len * overlap),
        detrend=False,
    )
    return freqs, psd


def band_powers(freqs: np.ndarray, psd: np.ndarray) -> tuple:
    """Trapezoid-integrated power in the five conventional EEG bands."""
    freqs = np.asarray(freqs, dtype=float)
    psd = np.asarray(psd, dtype=float)
    if freqs.shape != psd.shape or freqs.ndim != 1:
        raise ValueError("freqs and psd must be 1-D and the same shape")
    powers = []
    for _, lo, hi in BANDS:
        mask = (freqs >= lo) & (freqs <= hi)
        if mask.sum() < 2:
            powers.append(0.0)
        else:
            powers.append(float(np.trapezoid(psd[mask], freqs[mask])))
    return tuple(powers)


def spectral_entropy(psd: np.ndarray) -> float:
    """Shannon entropy of the normalized PSD, scaled to [0, 1] by ln(n)."""
    psd = np.asarray(psd, dtype=float)
    total = psd.sum()
    if total <= 0.0:
        raise DegenerateInputError("spectral entropy needs a nonzero PSD")
    p = psd / total
    nonzero = p[p > 0]
    entropy = float(-(nonzero * np.log(nonzero)).sum())
    return entropy / math.log(len(psd))


def time_stats(signal: Signal) -> dict:
    """Population moments; skew/kurtosis forced to 0 on constant input."""
    x = signal.samples
    if len(x) < 2:
        raise ValueError("need at least 2 samples")
    mean = float(x.mean())
    var = float(x.var())
    degenerate = var == 0.0
    if degenerate:
        skew = kurt = 0.0
    else:
        centered = x - mean
        std = math.sqrt(var)
        skew = float(np.mean(centered**3) / std**3)
        kurt = float(np.mean(centered**4) / var**2 - 3.0)
    return {
        "mean": mean,
        "variance": var,
        "min": float(x.min()),
        "max": float(x.max()),
        "skewness": skew,
        "kurtosis": kurt,
        "degenerate": degenerate,
    }


def _epoch_features(epoch: Signal) -> list:
    seg_len = min(256, len(epoch))
    freqs, psd = welch_psd(epoch, seg_len=seg_len)
    feats = list(band_powers(freqs, psd))
    feats.append(0.0 if psd.sum() <= 0 else spectral_entropy(psd))
    stats = time_stats(epoch)
    feats.extend(stats[name] for name in STAT_NAMES)
    return feats


def build_feature_matrix(
    rec: Recording,
    window_s: float,
    overlap: float = 0.0,
    label: int | None = None,
) -> FeatureMatrix:
    """One row per epoch; columns are <channel>_<feature> per channel."""
    names = tuple(
        f"{ch}_{feat}"
        for ch in rec.channel_names
        for feat in [b[0] for b in BANDS] + ["entropy"] + list(STAT_NAMES)
    )
    per_channel = [segment_epochs(ch, window_s, overlap) for ch in rec.channels]
    n_epochs = min(len(e) for e in per_channel)
    rows = []
    for e in range(n_epochs):
        row = []
        for epochs in per_channel:
            row.extend(_epoch_features(epochs[e]))
        rows.append(row)
    matrix = np.asarray(rows, dtype=float) if rows else np.empty((0, len(names)))
    labels = None if label is None else (int(label),) * n_epochs
    return FeatureMatrix(rows=matrix, feature_names=names, labels=labels)
