"""Seeded Monte-Carlo benchmark grid: methods x noise kinds x SNR levels.

Each cell mixes a deterministic two-tone surrogate with one noise realization
per seed, runs the method at its default operating point, and aggregates
median and IQR. The identity method rides along as the no-op control every
improvement claim is measured against.
"""

from dataclasses import replace

import numpy as np

from .core import Recording, Signal
from .denoise import (
    METHOD_IDS,
    adaptive_kalman_denoise,
    cascade_lms,
    denoise_dwt,
    denoise_emd_maf,
    identity,
    remove_blink_template,
    remove_motion_ssa,
    remove_muscle_ssa_cca,
)
from .noise import NoiseSpec, compute_metrics, gen_noise, mix_at_snr
from .rng import rng_stream

MULTICHANNEL_METHODS = ("ssa_cca", "blink_template")
CHANNEL_GAINS = (1.0, 0.8, 1.2, 0.9)
CHANNEL_NAMES = ("TP9", "AF7", "AF8", "TP10")
# reference generators get their own seed offset so the reference is a
# distinct realization of the same contaminant family
REFERENCE_SEED_OFFSET = 10_000


def make_clean(seed: int, n: int, fs: float, channel: int = 0) -> Signal:
    """Two-tone surrogate EEG (theta + alpha) with seeded phases."""
    rng = rng_stream(seed, f"clean:{channel}")
    t = np.arange(n) / fs
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
    samples = (np.sin(2 * np.pi * 6.0 * t + phases[0])
               + 0.6 * np.sin(2 * np.pi * 11.0 * t + phases[1]))
    return Signal(samples=samples, fs=fs)


def make_blink_template(spec: NoiseSpec, fs: float) -> Signal:
    width = max(3, int(round(spec.params.get("width", 0.3) * fs)))
    bump = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(width) / (width - 1)))
    return Signal(samples=bump, fs=fs)


def _run_single(method: str, mixed: Signal, noise_spec: NoiseSpec,
                seed: int, fs: float) -> Signal:
    if method == "identity":
        return identity(mixed)[0]
    if method == "dwt":
        return denoise_dwt(mixed)[0]
    if method == "emd_maf":
        return denoise_emd_maf(mixed)[0]
    if method == "ssa_motion":
        return remove_motion_ssa(mixed)[0]
    if method == "akf":
        return adaptive_kalman_denoise(mixed)[0]
    if method == "cascade_lms":
        ref_spec = replace(noise_spec, seed=seed + REFERENCE_SEED_OFFSET)
        ref = gen_noise(ref_spec, len(mixed), fs)
        return cascade_lms(mixed, [ref])[0]
    raise ValueError(f"unknown single-channel method {method!r}")


def _run_cell_seed(method: str, spec: NoiseSpec, snr_db: float, seed: int,
                   n: int, fs: float) -> dict:
    """One Monte-Carlo draw; returns metrics plus the mix round-trip error."""
    realized = replace(spec, seed=spec.seed + seed)
    noise = gen_noise(realized, n, fs)
    if method in MULTICHANNEL_METHODS:
        cleans = [make_clean(seed, n, fs, channel=c) for c in range(4)]
        mixed_channels, roundtrip = [], 0.0
        for c, clean in enumerate(cleans):
            shaped = noise.with_samples(noise.samples * CHANNEL_GAINS[c])
            mixed, report = mix_at_snr(clean, shaped, snr_db)
            mixed_channels.append(mixed)
            roundtrip = max(roundtrip, abs(
                compute_metrics(clean, mixed)["snr_db"] - report.target_snr_db
            ))
        rec = Recording(channels=tuple(mixed_channels),
                        channel_names=CHANNEL_NAMES)
        if method == "ssa_cca":
            out = remove_muscle_ssa_cca(rec)[0]
        else:
            template = make_blink_template(realized, fs)
            out = remove_blink_template(rec, template, CHANNEL_NAMES[1:3])[0]
        per_channel = [compute_metrics(c, o)
                       for c, o in zip(cleans, out.channels)]
        in_metrics = [compute_metrics(c, m)
                      for c, m in zip(cleans, mixed_channels)]
        return {
            "snr_db": float(np.mean([m["snr_db"] for m in per_channel])),
            "rmse": float(np.mean([m["rmse"] for m in per_channel])),
            "corr": float(np.mean([m["corr"] for m in per_channel])),
            "in_snr_db": float(np.mean([m["snr_db"] for m in in_metrics])),
            "in_rmse": float(np.mean([m["rmse"] for m in in_metrics])),
            "mix_roundtrip_db": float(roundtrip),
        }
    clean = make_clean(seed, n, fs)
    mixed, report = mix_at_snr(clean, noise, snr_db)
    in_metrics = compute_metrics(clean, mixed)
    out = _run_single(method, mixed, realized, seed, fs)
    metrics = compute_metrics(clean, out)
    return {
        "snr_db": metrics["snr_db"],
        "rmse": metrics["rmse"],
        "corr": metrics["corr"],
        "in_snr_db": in_metrics["snr_db"],
        "in_rmse": in_metrics["rmse"],
        "mix_roundtrip_db": abs(in_metrics["snr_db"] - report.target_snr_db),
    }


def _median_iqr(values) -> tuple:
    arr = np.asarray(values, dtype=float)
    q1, q3 = np.percentile(arr, [25, 75])
    return float(np.median(arr)), float(q3 - q1)


def run_bench(methods, noise_specs, snrs_db, seeds,
              n: int = 2048, fs: float = 256.0) -> dict:
    """Full grid; returns sorted leaderboard rows and per-noise tables."""
    methods = list(methods)
    specs = [s if isinstance(s, NoiseSpec) else NoiseSpec.from_text(s)
             for s in noise_specs]
    seeds = list(seeds)
    if not methods or not seeds:
        raise ValueError("need at least one method and one seed")
    for m in methods:
        if m not in METHOD_IDS:
            raise ValueError(f"unknown method {m!r}; known: {METHOD_IDS}")
    rows = []
    for method in sorted(methods):
        for spec in sorted(specs, key=lambda s: s.kind):
            for snr_db in sorted(float(s) for s in snrs_db):
                draws = [_run_cell_seed(method, spec, snr_db, seed, n, fs)
                         for seed in seeds]
                med_snr, iqr_snr = _median_iqr([d["snr_db"] for d in draws])
                med_rmse, iqr_rmse = _median_iqr([d["rmse"] for d in draws])
                med_corr, _ = _median_iqr([d["corr"] for d in draws])
                gains = [d["snr_db"] - d["in_snr_db"] for d in draws]
                reductions = [1.0 - d["rmse"] / d["in_rmse"] for d in draws]
                rows.append({
                    "method": method,
                    "noise_kind": spec.kind,
                    "noise_spec": spec.to_text(),
                    "target_snr_db": snr_db,
                    "n_seeds": len(seeds),
                    "median_out_snr_db": med_snr,
                    "iqr_out_snr_db": iqr_snr,
                    "median_rmse": med_rmse,
                    "iqr_rmse": iqr_rmse,
                    "median_corr": med_corr,
                    "median_gain_db": float(np.median(gains)),
                    "median_rmse_reduction": float(np.median(reductions)),
                    "mix_roundtrip_max_db": max(
                        d["mix_roundtrip_db"] for d in draws
                    ),
                })
    tables = {}
    for row in rows:
        tables.setdefault(row["noise_kind"], []).append(row)
    return {"rows": rows, "tables": tables}


def leaderboard_csv_rows(result: dict) -> list:
    """Flatten bench output for CSV writing, header first."""
    header = ["method", "noise_kind", "target_snr_db", "n_seeds",
              "median_out_snr_db", "iqr_out_snr_db", "median_rmse",
              "iqr_rmse", "median_corr", "median_gain_db",
              "median_rmse_reduction"]
    out = [header]
    for row in result["rows"]:
        out.append([row[k] for k in header])
    return out
