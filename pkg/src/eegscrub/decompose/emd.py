"""Empirical mode decomposition.

Sifting with natural cubic spline envelopes through the extrema, mirror
extension of two extrema at each boundary, and the Cauchy SD stopping
criterion. The residual is computed as input minus the sum of the IMFs, so
the completeness identity holds to machine precision by construction.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..core import Signal
from ..errors import TooShortError

MAX_SIFTS = 50
DEFAULT_MAX_IMFS = 10
DEFAULT_SIFT_TOL = 0.2


@dataclass(frozen=True)
class ImfSet:
    """Intrinsic mode functions (highest frequency first) plus the residual."""

    imfs: tuple
    residual: Signal

    def __post_init__(self):
        object.__setattr__(self, "imfs", tuple(self.imfs))

    def reconstruct(self) -> Signal:
        total = self.residual.samples.copy()
        for imf in self.imfs:
            total += imf.samples
        return self.residual.with_samples(total)


def find_extrema(x: np.ndarray):
    """Indices of local maxima and minima; plateaus count once, at their middle."""
    d = np.diff(x)
    maxima, minima = [], []
    # sign of the last nonzero slope seen, scanning left to right
    i = 0
    n = len(d)
    prev_sign = 0
    while i < n:
        if d[i] == 0.0:
            j = i
            while j < n and d[j] == 0.0:
                j += 1
            if j < n:
                next_sign = 1 if d[j] > 0 else -1
                mid = (i + j) // 2
                if prev_sign > 0 and next_sign < 0:
                    maxima.append(mid)
                elif prev_sign < 0 and next_sign > 0:
                    minima.append(mid)
                prev_sign = next_sign  # consume the change across the plateau
            i = j
            continue
        sign = 1 if d[i] > 0 else -1
        if prev_sign > 0 and sign < 0:
            maxima.append(i)
        elif prev_sign < 0 and sign > 0:
            minima.append(i)
        prev_sign = sign
        i += 1
    return np.asarray(maxima, dtype=int), np.asarray(minima, dtype=int)


def _mirror(idx: np.ndarray, val: np.ndarray, n: int, n_mirror: int = 2):
    """Mirror up to ``n_mirror`` extrema about each end of the signal."""
    left_i = -idx[:n_mirror][::-1]  # reflect about sample 0
    left_v = val[:n_mirror][::-1]
    right_i = 2 * (n - 1) - idx[-n_mirror:][::-1]
    right_v = val[-n_mirror:][::-1]
    ext_i = np.concatenate([left_i, idx, right_i])
    ext_v = np.concatenate([left_v, val, right_v])
    keep = np.concatenate([[True], np.diff(ext_i) > 0])
    return ext_i[keep], ext_v[keep]


def _envelope(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
    pos, val = _mirror(idx, x[idx], len(x))
    spline = CubicSpline(pos, val, bc_type="natural")
    return spline(np.arange(len(x)))


def _sift(residual: np.ndarray, sift_tol: float) -> np.ndarray | None:
    """Extract one IMF from ``residual``, or None if it carries no mode."""
    h = residual
    for _ in range(MAX_SIFTS):
        maxima, minima = find_extrema(h)
        if len(maxima) < 2 or len(minima) < 2:
            return None if h is residual else h
        mean = (_envelope(h, maxima) + _envelope(h, minima)) / 2.0
        h_new = h - mean
        denom = float(np.sum(h * h))
        sd = float(np.sum((h - h_new) ** 2)) / denom if denom > 0 else 0.0
        h = h_new
        if sd < sift_tol:
            break
    return h


def emd(signal: Signal, max_imfs: int = DEFAULT_MAX_IMFS,
        sift_tol: float = DEFAULT_SIFT_TOL) -> ImfSet:
    """Decompose into IMFs. Monotone input yields zero IMFs, residual = input."""
    if len(signal) < 8:
        raise TooShortError(
            f"need at least 8 samples for EMD, got {len(signal)}"
        )
    x = signal.samples
    imfs = []
    residual = x.copy()
    while len(imfs) < max_imfs:
        imf = _sift(residual, sift_tol)
        if imf is None:
            break
        imfs.append(imf)
        residual = residual - imf
    # pin completeness exactly: residual := x - sum(IMFs)
    residual = x - np.sum(imfs, axis=0) if imfs else x.copy()
    return ImfSet(
        imfs=tuple(signal.with_samples(m) for m in imfs),
        residual=signal.with_samples(residual),
    )
