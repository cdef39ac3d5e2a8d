"""Waveform types, zero-phase filtering, epoching and normalization.

These are the primitives every other module builds on. All values are
immutable after construction (sample buffers are marked read-only), so they
are safe to share across threads.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal as sps

from .errors import InvalidSpecError, TooShortError

FILTER_KINDS = ("bandpass", "lowpass", "highpass", "notch")


def _freeze(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Signal:
    """A uniformly sampled waveform (amplitudes in microvolts)."""

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("signal must contain at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal samples must all be finite")
        fs = float(self.fs)
        if not fs > 0:
            raise ValueError(f"sampling rate must be positive, got {fs}")
        object.__setattr__(self, "samples", _freeze(arr))
        object.__setattr__(self, "fs", fs)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.fs

    def with_samples(self, samples) -> "Signal":
        """New signal with the same rate and different samples."""
        return Signal(samples, self.fs)


@dataclass(frozen=True)
class Recording:
    """Ordered set of equally sampled channels with unique names."""

    channels: tuple
    channel_names: tuple
    subject_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        channels = tuple(self.channels)
        names = tuple(str(n) for n in self.channel_names)
        if not channels:
            raise ValueError("recording needs at least one channel")
        if len(names) != len(channels):
            raise ValueError("one name per channel required")
        if len(set(names)) != len(names):
            raise ValueError(f"channel names must be unique, got {names}")
        n0, fs0 = len(channels[0]), channels[0].fs
        for ch in channels[1:]:
            if len(ch) != n0 or ch.fs != fs0:
                raise ValueError("all channels must share length and rate")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "channel_names", names)
        object.__setattr__(self, "subject_meta", dict(self.subject_meta))

    @property
    def fs(self) -> float:
        return self.channels[0].fs

    @property
    def n_samples(self) -> int:
        return len(self.channels[0])

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    def to_array(self) -> np.ndarray:
        """Samples as an (n_samples, n_channels) array."""
        return np.column_stack([ch.samples for ch in self.channels])

    def channel(self, name: str) -> Signal:
        try:
            return self.channels[self.channel_names.index(name)]
        except ValueError:
            raise KeyError(f"no channel named {name!r}; have {self.channel_names}")

    def with_channels(self, channels) -> "Recording":
        return replace(self, channels=tuple(channels))


@dataclass(frozen=True)
class FilterSpec:
    """Butterworth band specification (or a notch at a single frequency).

    ``edges`` holds the corner frequencies in Hz: two for bandpass, one
    otherwise. ``order`` is the Butterworth design order (ignored for the
    notch, which is a single biquad shaped by ``notch_q``).
    """

    kind: str
    edges: tuple
    order: int = 4
    notch_q: float = 30.0

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise InvalidSpecError(f"kind must be one of {FILTER_KINDS}, got {self.kind!r}")
        edges = tuple(float(e) for e in np.atleast_1d(self.edges))
        expected = 2 if self.kind == "bandpass" else 1
        if len(edges) != expected:
            raise InvalidSpecError(f"{self.kind} needs {expected} edge(s), got {edges}")
        if self.order < 1:
            raise InvalidSpecError("filter order must be >= 1")
        if self.kind == "notch" and not self.notch_q > 0:
            raise InvalidSpecError("notch_q must be positive")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "order", int(self.order))

    def validate_for(self, fs: float) -> None:
        nyq = fs / 2.0
        for e in self.edges:
            if not 0.0 < e < nyq:
                raise InvalidSpecError(
                    f"corner {e} Hz outside (0, {nyq}) for fs={fs}"
                )
        if self.kind == "bandpass" and not self.edges[0] < self.edges[1]:
            raise InvalidSpecError(f"bandpass needs low < high, got {self.edges}")


DEFAULT_EEG_BAND = FilterSpec("bandpass", (0.5, 45.0), order=4)


def apply_filter(signal: Signal, spec: FilterSpec) -> Signal:
    """Zero-phase (forward-backward) filtering; length and rate preserved."""
    spec.validate_for(signal.fs)
    x = signal.samples
    if len(x) < 3 * spec.order:
        raise TooShortError(
            f"signal of {len(x)} samples is shorter than 3x filter order {spec.order}"
        )
    if spec.kind == "notch":
        b, a = sps.iirnotch(spec.edges[0], spec.notch_q, fs=signal.fs)
        # a narrow notch rings for ~fs*Q/f0 samples; pad past that decay
        bandwidth = spec.edges[0] / spec.notch_q
        decay = int(np.ceil(np.log(1e9) / (np.pi * bandwidth / signal.fs)))
        padlen = min(len(x) - 1, max(3 * max(len(a), len(b)), decay))
        y = sps.filtfilt(b, a, x, padlen=padlen)
    else:
        btype = {"bandpass": "bandpass", "lowpass": "lowpass", "highpass": "highpass"}[spec.kind]
        wn = spec.edges if spec.kind == "bandpass" else spec.edges[0]
        sos = sps.butter(spec.order, wn, btype=btype, output="sos", fs=signal.fs)
        padlen = 3 * (2 * sos.shape[0] + 1)
        if len(x) <= padlen:
            raise TooShortError(f"need more than {padlen} samples for this design")
        y = sps.sosfiltfilt(sos, x, padlen=padlen)
    return signal.with_samples(y)


def segment_epochs(signal: Signal, window_s: float, overlap: float = 0.0) -> list:
    """Split into fixed windows; trailing partial window is discarded.

    The hop is ``window * (1 - overlap)`` samples. A window longer than the
    signal yields an empty list.
    """
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must be in [0, 1), got {overlap}")
    win = int(np.floor(window_s * signal.fs))
    if win < 2:
        raise ValueError(f"window of {win} samples is too short (need >= 2)")
    hop = max(1, int(round(win * (1.0 - overlap))))
    x = signal.samples
    return [
        signal.with_samples(x[start : start + win])
        for start in range(0, len(x) - win + 1, hop)
    ]


@dataclass(frozen=True)
class NormStats:
    """Per-column location/scale so a normalization can be replayed or undone."""

    mode: str
    loc: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "loc", _freeze(self.loc))
        object.__setattr__(self, "scale", _freeze(self.scale))


def _norm_stats(cols: np.ndarray, mode: str) -> NormStats:
    if mode == "zscore":
        loc = cols.mean(axis=0)
        scale = cols.std(axis=0)  # population sigma
    elif mode == "minmax":
        loc = cols.min(axis=0)
        scale = cols.max(axis=0) - loc
    else:
        raise ValueError(f"mode must be 'zscore' or 'minmax', got {mode!r}")
    # constant columns map to zero instead of dividing by zero
    scale = np.where(scale == 0.0, 1.0, scale)
    return NormStats(mode, loc, scale)


def normalize(data, mode: str = "zscore", stats: NormStats | None = None):
    """Column-wise z-score or min-max scaling.

    Accepts a Signal, a 1-D/2-D array, or any object with a ``rows`` array
    attribute (feature matrices); returns the same kind plus the stats used.
    Pass precomputed ``stats`` to apply a training-set normalization to new
    data instead of refitting.
    """
    if isinstance(data, Signal):
        normed, stats = normalize(data.samples, mode, stats)
        return data.with_samples(normed), stats
    if hasattr(data, "rows"):
        normed, stats = normalize(np.asarray(data.rows), mode, stats)
        return replace(data, rows=normed), stats

    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot normalize empty data")
    cols = arr.reshape(-1, 1) if arr.ndim == 1 else arr
    if stats is None:
        stats = _norm_stats(cols, mode)
    elif stats.mode != mode:
        raise ValueError(f"stats were computed for mode {stats.mode!r}, not {mode!r}")
    normed = (cols - stats.loc) / stats.scale
    return normed.reshape(arr.shape), stats


def denormalize(data, stats: NormStats):
    """Invert :func:`normalize` with the stats it returned."""
    if isinstance(data, Signal):
        return data.with_samples(denormalize(data.samples, stats))
    if hasattr(data, "rows"):
        return replace(data, rows=denormalize(np.asarray(data.rows), stats))
    arr = np.asarray(data, dtype=np.float64)
    cols = arr.reshape(-1, 1) if arr.ndim == 1 else arr
    return (cols * stats.scale + stats.loc).reshape(arr.shape)


def moving_average(signal: Signal, width: int) -> Signal:
    """Centered moving average with symmetric edge padding."""
    width = int(width)
    if width < 1 or width % 2 == 0:
        raise ValueError(f"width must be an odd positive integer, got {width}")
    if width > len(signal):
        raise ValueError(f"width {width} exceeds signal length {len(signal)}")
    half = width // 2
    padded = np.pad(signal.samples, half, mode="symmetric")
    kernel = np.full(width, 1.0 / width)
    return signal.with_samples(np.convolve(padded, kernel, mode="valid"))
