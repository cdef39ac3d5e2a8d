"""Singular spectrum analysis: embed, SVD, diagonal-average.

Each elementary component is the diagonal average of one rank-1 term of the
trajectory-matrix SVD, computed without materializing the outer product:
diag-averaging s*u*v^T collapses to s * convolve(u, v) / counts.
"""

from dataclasses import dataclass

import numpy as np

from ..core import Signal

# singular values below this fraction of the largest carry no signal mass
# worth a component; dropping them keeps rank tests exact
REL_RANK_TOL = 1e-12


@dataclass(frozen=True)
class SsaModel:
    """SVD of the Hankel trajectory matrix of one signal."""

    window_len: int
    singular_values: np.ndarray
    elementary_components: tuple
    n_samples: int
    fs: float

    @property
    def n_components(self) -> int:
        return len(self.elementary_components)


def default_window(n_samples: int) -> int:
    return min(n_samples // 2, 128)


def ssa_decompose(signal: Signal, window_len: int | None = None) -> SsaModel:
    """Decompose a signal into elementary components via trajectory SVD."""
    x = signal.samples
    n = len(x)
    length = default_window(n) if window_len is None else int(window_len)
    if length < 2 or length > n // 2:
        raise ValueError(
            f"window_len must satisfy 2 <= L <= N/2, got L={length} for N={n}"
        )
    # L x K Hankel matrix: column k is x[k : k + L]
    traj = np.lib.stride_tricks.sliding_window_view(x, length).T
    n_cols = traj.shape[1]
    u, s, vt = np.linalg.svd(traj, full_matrices=False)

    counts = np.convolve(np.ones(length), np.ones(n_cols))
    keep = s > s[0] * REL_RANK_TOL if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    components = []
    for i in np.flatnonzero(keep):
        series = s[i] * np.convolve(u[:, i], vt[i]) / counts
        components.append(signal.with_samples(series))
    return SsaModel(
        window_len=length,
        singular_values=s[keep],
        elementary_components=tuple(components),
        n_samples=n,
        fs=signal.fs,
    )


def ssa_reconstruct(model: SsaModel, group) -> Signal:
    """Sum the elementary components selected by index."""
    indices = sorted(set(int(i) for i in group))
    if indices and (indices[0] < 0 or indices[-1] >= model.n_components):
        raise ValueError(
            f"component index out of range 0..{model.n_components - 1}: {indices}"
        )
    total = np.zeros(model.n_samples)
    for i in indices:
        total = total + model.elementary_components[i].samples
    if model.elementary_components:
        return model.elementary_components[0].with_samples(total)
    return Signal(samples=total, fs=model.fs)
