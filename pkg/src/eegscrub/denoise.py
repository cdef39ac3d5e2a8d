"""Artifact-removal methods: wavelet and EMD denoising, SSA-based motion and
muscle removal, adaptive Kalman filtering, cascaded NLMS, and blink-template
subtraction.

Every method returns the cleaned signal(s) together with a DenoiseReport
recording what was done, keyed by a stable method id so CLI output and bench
tables stay comparable across runs.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .core import Recording, Signal, moving_average
from .decompose import cca, dwt_forward, dwt_inverse, emd, ssa_decompose
from .errors import DivergenceError, NumericDegeneracyError, TooShortError

METHOD_IDS = (
    "dwt",
    "emd_maf",
    "ssa_motion",
    "ssa_cca",
    "akf",
    "cascade_lms",
    "blink_template",
    "identity",
)


@dataclass(frozen=True)
class DenoiseReport:
    """Provenance record attached to every denoiser output."""

    method_id: str
    params: dict = field(default_factory=dict)
    components_removed: tuple = ()
    input_len: int = 0

    def __post_init__(self):
        if self.method_id not in METHOD_IDS:
            raise ValueError(
                f"unknown method_id {self.method_id!r}; known: {METHOD_IDS}"
            )
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(
            self, "components_removed", tuple(self.components_removed)
        )


@dataclass(frozen=True)
class KalmanConfig:
    q: float = 1e-5
    r0: float = 1.0
    adapt_window: int = 64

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if not self.r0 > 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        if self.adapt_window < 8:
            raise ValueError(
                f"adapt_window must be >= 8, got {self.adapt_window}"
            )


def _dominant_freq(samples: np.ndarray, fs: float) -> float:
    spectrum = np.abs(np.fft.rfft(samples))
    return float(np.fft.rfftfreq(len(samples), 1.0 / fs)[np.argmax(spectrum)])


def _energy_fraction_above(samples: np.ndarray, fs: float, f0: float) -> float:
    power = np.abs(np.fft.rfft(samples)) ** 2
    total = power.sum()
    if total == 0.0:
        return 0.0
    freqs = np.fft.rfftfreq(len(samples), 1.0 / fs)
    return float(power[freqs > f0].sum() / total)


def identity(signal: Signal) -> tuple:
    """Pass-through control used as the bench baseline."""
    report = DenoiseReport(method_id="identity", input_len=len(signal))
    return signal, report


def denoise_dwt(signal: Signal, levels: int = 3, mode: str = "soft") -> tuple:
    """Universal-threshold wavelet shrinkage.

    The default depth keeps 0-16 Hz (at 256 Hz sampling) in the untouched
    approximation band, so in-band EEG rhythms survive the shrinkage.
    """
    if mode not in ("soft", "hard"):
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    dec = dwt_forward(signal, levels)
    # noise scale from the finest detail band, threshold shared by all bands
    sigma = np.median(np.abs(dec.details[0])) / 0.6745
    threshold = sigma * np.sqrt(2.0 * np.log(len(signal)))
    shrunk = []
    for band in dec.details:
        if mode == "soft":
            shrunk.append(np.sign(band) * np.maximum(np.abs(band) - threshold, 0.0))
        else:
            shrunk.append(np.where(np.abs(band) > threshold, band, 0.0))
    cleaned = dwt_inverse(replace(dec, details=tuple(shrunk)))
    report = DenoiseReport(
        method_id="dwt",
        params={"levels": str(levels), "mode": mode,
                "threshold": f"{threshold:.6g}"},
        input_len=len(signal),
    )
    return cleaned, report


def denoise_emd_maf(signal: Signal, ma_width: int = 5) -> tuple:
    """Moving-average the high-frequency IMFs, keep the rest untouched.

    An IMF counts as high-frequency when the majority of its spectral energy
    sits above 30 Hz; a single coherent low tone sharing the mode (boundary
    mixing) must not shield an EMG-dominated IMF from smoothing.
    """
    imf_set = emd(signal)
    total = imf_set.residual.samples.copy()
    smoothed = []
    for i, imf in enumerate(imf_set.imfs):
        if _energy_fraction_above(imf.samples, signal.fs, 30.0) > 0.5:
            total += moving_average(imf, ma_width).samples
            smoothed.append(i)
        else:
            total += imf.samples
    report = DenoiseReport(
        method_id="emd_maf",
        params={"ma_width": str(ma_width)},
        components_removed=tuple(smoothed),
        input_len=len(signal),
    )
    return signal.with_samples(total), report


def remove_motion_ssa(
    signal: Signal, window_len: int | None = None, var_thresh: float = 0.1
) -> tuple:
    """Drop large, slow SSA components (the motion-artifact signature)."""
    model = ssa_decompose(signal, window_len)
    # linear singular-value mass: a drift spread over a few medium components
    # must still clear the threshold
    mass = model.singular_values
    total_mass = mass.sum()
    removed = []
    kept_sum = np.zeros(len(signal))
    for i, comp in enumerate(model.elementary_components):
        big = total_mass > 0 and mass[i] / total_mass > var_thresh
        slow = _dominant_freq(comp.samples, signal.fs) < 1.0
        if big and slow:
            removed.append(i)
        else:
            kept_sum += comp.samples
    report = DenoiseReport(
        method_id="ssa_motion",
        params={"window_len": str(model.window_len),
                "var_thresh": str(var_thresh)},
        components_removed=tuple(removed),
        input_len=len(signal),
    )
    return signal.with_samples(kept_sum), report


def remove_muscle_ssa_cca(rec: Recording, autocorr_thresh: float = 0.9) -> tuple:
    """SSA-expand each channel, zero low-autocorrelation canonical sources."""
    n_ch = len(rec.channels)
    if not 1 <= n_ch <= 8:
        raise ValueError(f"supports 1..8 channels, got {n_ch}")
    if rec.n_samples < 2 * rec.fs:
        raise TooShortError(
            f"need at least 2 s of data, got {rec.n_samples / rec.fs:.3f} s"
        )

    top_k = 4
    stacked = []
    owner = []  # channel index owning each stacked component
    for c, ch in enumerate(rec.channels):
        model = ssa_decompose(ch)
        for comp in model.elementary_components[:top_k]:
            stacked.append(comp)
            owner.append(c)
    comp_rec = Recording(
        channels=tuple(stacked),
        channel_names=tuple(f"c{i}" for i in range(len(stacked))),
    )
    delayed = Recording(
        channels=tuple(
            s.with_samples(np.concatenate([s.samples[:1], s.samples[:-1]]))
            for s in stacked
        ),
        channel_names=comp_rec.channel_names,
    )
    result = cca(comp_rec, delayed)

    sources = result.sources.to_array().T
    zeroed = []
    for i, src in enumerate(sources):
        a, b = src[1:], src[:-1]
        sa, sb = a.std(), b.std()
        rho = 1.0 if sa == 0 or sb == 0 else float(
            np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb)
        )
        if rho < autocorr_thresh:
            zeroed.append(i)
    sources_clean = sources.copy()
    sources_clean[zeroed] = 0.0

    comps = comp_rec.to_array().T
    means = comps.mean(axis=1, keepdims=True)
    try:
        back = np.linalg.inv(result.wx)
    except np.linalg.LinAlgError:
        raise NumericDegeneracyError("canonical projection is not invertible")
    comps_clean = back @ sources_clean + means

    out_channels = []
    for c in range(n_ch):
        rows = [i for i, o in enumerate(owner) if o == c]
        out_channels.append(
            rec.channels[c].with_samples(comps_clean[rows].sum(axis=0))
        )
    report = DenoiseReport(
        method_id="ssa_cca",
        params={"autocorr_thresh": str(autocorr_thresh), "top_k": str(top_k)},
        components_removed=tuple(zeroed),
        input_len=rec.n_samples,
    )
    return rec.with_channels(out_channels), report


def adaptive_kalman_denoise(signal: Signal, cfg: KalmanConfig | None = None) -> tuple:
    """Scalar random-walk Kalman filter with innovation-based noise tracking."""
    cfg = cfg or KalmanConfig()
    z = signal.samples
    estimate = z[0]
    p = cfg.r0
    r = cfg.r0
    out = np.empty_like(z)
    innovations = np.empty(cfg.adapt_window)
    priors = np.empty(cfg.adapt_window)
    fill = 0
    for t, measurement in enumerate(z):
        p_prior = p + cfg.q
        innovation = measurement - estimate
        gain = p_prior / (p_prior + r)
        estimate = estimate + gain * innovation
        p = (1.0 - gain) * p_prior
        out[t] = estimate
        innovations[fill] = innovation
        priors[fill] = p_prior
        fill += 1
        if fill == cfg.adapt_window:
            r = max(innovations.var() - priors.mean(), cfg.r0 / 100.0)
            fill = 0
    report = DenoiseReport(
        method_id="akf",
        params={"q": str(cfg.q), "r0": str(cfg.r0),
                "adapt_window": str(cfg.adapt_window)},
        input_len=len(signal),
    )
    return signal.with_samples(out), report


def cascade_lms(
    primary: Signal, references, mu: float = 0.05, taps: int = 16
) -> tuple:
    """One normalized-LMS cancellation stage per reference, in sequence."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if taps < 1:
        raise ValueError(f"taps must be >= 1, got {taps}")
    references = list(references)
    for ref in references:
        if len(ref) != len(primary):
            raise ValueError(
                f"reference length {len(ref)} != primary length {len(primary)}"
            )
    current = primary.samples.copy()
    n = len(current)
    for stage, ref in enumerate(references):
        x = ref.samples
        w = np.zeros(taps)
        out = np.empty(n)
        window = np.zeros(taps)  # window[0] is the newest sample
        stage_in_energy = float(current @ current)
        # a diverging weight vector overflows before the check below fires
        with np.errstate(over="ignore", invalid="ignore"):
            for t in range(n):
                window[1:] = window[:-1]
                window[0] = x[t]
                err = current[t] - w @ window
                out[t] = err
                w = w + mu * err * window / (window @ window + 1e-8)
        if not np.all(np.isfinite(out)) or float(out @ out) > 100.0 * stage_in_energy:
            raise DivergenceError(
                f"NLMS stage {stage} diverged (mu={mu}, taps={taps})"
            )
        current = out
    report = DenoiseReport(
        method_id="cascade_lms",
        params={"mu": str(mu), "taps": str(taps),
                "stages": str(len(references))},
        input_len=n,
    )
    return primary.with_samples(current), report


def _ncc(samples: np.ndarray, template: np.ndarray) -> np.ndarray:
    """Zero-mean normalized cross-correlation at every window start."""
    m = len(template)
    windows = np.lib.stride_tricks.sliding_window_view(samples, m)
    w_centered = windows - windows.mean(axis=1, keepdims=True)
    t_centered = template - template.mean()
    num = w_centered @ t_centered
    den = np.linalg.norm(w_centered, axis=1) * np.linalg.norm(t_centered)
    out = np.zeros(len(num))
    np.divide(num, den, out=out, where=den > 0)
    return out


def remove_blink_template(
    rec: Recording, template: Signal, frontal_channels, peak_thresh: float = 0.7
) -> tuple:
    """Detect blinks on frontal channels, subtract a scaled template everywhere."""
    tpl = template.samples
    m = len(tpl)
    if m >= rec.n_samples:
        raise ValueError(
            f"template ({m}) must be shorter than the recording ({rec.n_samples})"
        )
    frontal = [rec.channel(name) for name in frontal_channels]

    candidates = []
    for ch in frontal:
        scores = _ncc(ch.samples, tpl)
        for t in range(len(scores)):
            if scores[t] <= peak_thresh:
                continue
            lo, hi = max(0, t - 1), min(len(scores), t + 2)
            if scores[t] == scores[lo:hi].max():
                candidates.append((scores[t], t))
    # greedy non-overlap suppression across channels, strongest first
    events = []
    for score, t in sorted(candidates, reverse=True):
        if all(abs(t - kept) >= m for kept in events):
            events.append(t)
    events.sort()

    tpl_energy = float(tpl @ tpl)
    cleaned = []
    for ch in rec.channels:
        samples = ch.samples.copy()
        for t in events:
            seg = samples[t : t + m]
            scale = float(seg @ tpl) / tpl_energy if tpl_energy > 0 else 0.0
            samples[t : t + m] = seg - scale * tpl
        cleaned.append(ch.with_samples(samples))
    report = DenoiseReport(
        method_id="blink_template",
        params={"peak_thresh": str(peak_thresh),
                "template_len": str(m)},
        components_removed=tuple(events),
        input_len=rec.n_samples,
    )
    return rec.with_channels(cleaned), report
