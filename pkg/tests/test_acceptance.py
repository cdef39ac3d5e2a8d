"""End-to-end acceptance gate.

Each criterion is one test that appends a single PASS/FAIL line to the
terminal summary (see conftest). Thresholds and tolerances are asserted at
their stated values, never weakened. Criterion 5 needs the public emotion
feature dataset; when the file is absent the test skips with instructions
instead of faking a result.
"""

import os
import time

import numpy as np
import pytest

from eegscrub import (
    FeatureMatrix,
    FilterSpec,
    KalmanConfig,
    NoiseSpec,
    Recording,
    Signal,
    adaptive_kalman_denoise,
    apply_filter,
    cascade_lms,
    compute_metrics,
    denoise_dwt,
    denoise_emd_maf,
    gen_noise,
    load_feature_csv,
    mix_at_snr,
    remove_motion_ssa,
    remove_muscle_ssa_cca,
    rng_stream,
)
from eegscrub.bench import run_bench
from eegscrub.decompose import dwt_forward, dwt_inverse, emd, ssa_decompose, ssa_reconstruct
from eegscrub.gru import (
    ModelConfig,
    TrainConfig,
    evaluate,
    init_gru,
    loss_and_grad,
    stratified_split,
    train,
    train_linear_baseline,
)
from conftest import record_criterion

FS = 256.0
DATASET_ENV = "EEGSCRUB_DATASET"
DATASET_DEFAULT = os.path.join(os.path.dirname(__file__), "..", "data",
                               "emotions.csv")


def sine(freq, n=2048, fs=FS, amp=1.0):
    t = np.arange(n) / fs
    return Signal(samples=amp * np.sin(2 * np.pi * freq * t), fs=fs)


def check(criterion, ok, detail):
    record_criterion(
        f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    )
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_reconstruction_identities():
    start = time.monotonic()

    dwt_worst = 0.0
    for n in (37, 256, 1000, 1024):
        rng = rng_stream(0, f"acc1-dwt:{n}")
        x = Signal(samples=rng.normal(size=n), fs=FS)
        levels = 5 if n >= 256 else 2
        back = dwt_inverse(dwt_forward(x, levels))
        dwt_worst = max(dwt_worst, float(np.max(np.abs(back.samples
                                                       - x.samples))))

    emd_worst = 0.0
    ssa_worst = 0.0
    for i in range(100):
        rng = rng_stream(i, "acc1-signals")
        x = Signal(samples=rng.normal(size=512), fs=FS)
        scale = float(np.max(np.abs(x.samples)))

        result = emd(x)
        total = result.residual.samples + sum(
            imf.samples for imf in result.imfs
        )
        emd_worst = max(emd_worst,
                        float(np.max(np.abs(total - x.samples))) / scale)

        model = ssa_decompose(x, window_len=64)
        back = ssa_reconstruct(model, range(model.n_components))
        ssa_worst = max(ssa_worst,
                        float(np.max(np.abs(back.samples - x.samples)))
                        / scale)

    elapsed = time.monotonic() - start
    ok = (dwt_worst < 1e-8 and emd_worst < 1e-8 and ssa_worst < 1e-8
          and elapsed < 30.0)
    check(1, ok,
          f"DWT max err {dwt_worst:.2e}, EMD rel {emd_worst:.2e}, "
          f"SSA rel {ssa_worst:.2e} over 100 signals in {elapsed:.1f}s "
          f"(limits 1e-8 / 30s)")


def test_criterion_2_notch_performance():
    def tone_amp(signal, freq):
        w = np.hanning(len(signal))
        spec = np.abs(np.fft.rfft(signal.samples * w))
        freqs = np.fft.rfftfreq(len(signal), 1 / signal.fs)
        return spec[np.argmin(np.abs(freqs - freq))]

    spec = FilterSpec(kind="notch", edges=(50.0,), notch_q=30.0)
    mains = sine(50.0, n=4096)
    attenuation_db = 20.0 * np.log10(
        tone_amp(mains, 50.0)
        / max(tone_amp(apply_filter(mains, spec), 50.0), 1e-300)
    )
    probe = sine(10.0, n=4096)
    passband_loss_db = 20.0 * np.log10(
        tone_amp(probe, 10.0) / tone_amp(apply_filter(probe, spec), 10.0)
    )
    ok = attenuation_db >= 40.0 and passband_loss_db <= 3.0
    check(2, ok,
          f"notch {attenuation_db:.1f} dB at 50 Hz (need >= 40), "
          f"{passband_loss_db:.4f} dB at 10 Hz (need <= 3)")


def test_criterion_3_denoising_efficacy():
    start = time.monotonic()
    seeds = range(20)

    dwt_gains, emd_reductions, motion_corrs = [], [], []
    cca_reductions, lms_residuals = [], []

    for seed in seeds:
        # DWT on AWGN at 0 dB
        clean = sine(10.0)
        noise = gen_noise(NoiseSpec("awgn", {}, seed=seed), len(clean), FS)
        mixed, _ = mix_at_snr(clean, noise, 0.0)
        out, _ = denoise_dwt(mixed)
        dwt_gains.append(compute_metrics(clean, out)["snr_db"])

        # EMD-MAF on band-limited 20-60 Hz EMG surrogate at 0 dB
        clean = sine(5.0)
        noise = gen_noise(NoiseSpec("emg_burst", {"duty": 1.0}, seed=seed),
                          len(clean), FS)
        mixed, _ = mix_at_snr(clean, noise, 0.0)
        out, _ = denoise_emd_maf(mixed)
        base_rmse = compute_metrics(clean, mixed)["rmse"]
        emd_reductions.append(
            1.0 - compute_metrics(clean, out)["rmse"] / base_rmse
        )

        # SSA motion removal on 0.3 Hz drift at 10x RMS
        clean = sine(10.0)
        drift = gen_noise(NoiseSpec("baseline_wander", {}, seed=seed),
                          len(clean), FS)
        scale = 10.0 * np.sqrt(np.mean(clean.samples**2)
                               / np.mean(drift.samples**2))
        mixed = Signal(samples=clean.samples + scale * drift.samples, fs=FS)
        out, _ = remove_motion_ssa(mixed)
        motion_corrs.append(np.corrcoef(out.samples, clean.samples)[0, 1])

        # SSA-CCA on 4-channel shared EMG at 0 dB
        shared = gen_noise(NoiseSpec("emg_burst", {"duty": 1.0}, seed=seed),
                           2048, FS)
        cleans, mixeds = [], []
        for c, gain in enumerate((1.0, 0.8, 1.2, 0.9)):
            ch_clean = sine(6.0 + 2.0 * c)
            ch_mixed, _ = mix_at_snr(
                ch_clean, Signal(samples=gain * shared.samples, fs=FS), 0.0
            )
            cleans.append(ch_clean)
            mixeds.append(ch_mixed)
        names = ("TP9", "AF7", "AF8", "TP10")
        rec = Recording(channels=tuple(mixeds), channel_names=names)
        out_rec, _ = remove_muscle_ssa_cca(rec)
        per_channel = []
        for ch_clean, ch_mixed, ch_out in zip(cleans, mixeds,
                                              out_rec.channels):
            base = compute_metrics(ch_clean, ch_mixed)["rmse"]
            per_channel.append(
                1.0 - compute_metrics(ch_clean, ch_out)["rmse"] / base
            )
        cca_reductions.append(float(np.mean(per_channel)))

        # cascade LMS on 50 Hz interference
        clean = sine(10.0)
        phase = float(rng_stream(seed, "acc3-lms-phase").uniform(
            0, 2 * np.pi))
        t = np.arange(len(clean)) / FS
        mains = np.sin(2 * np.pi * 50.0 * t + phase)
        mixed = Signal(samples=clean.samples + mains, fs=FS)
        out, _ = cascade_lms(mixed, [sine(50.0)])
        half = len(clean) // 2
        resid = out.samples[half:] - clean.samples[half:]
        lms_residuals.append(
            float(np.sqrt(np.mean(resid**2) / np.mean(mains[half:] ** 2)))
        )

    elapsed = time.monotonic() - start
    med = lambda v: float(np.median(v))
    ok = (med(dwt_gains) >= 5.0 and med(emd_reductions) >= 0.30
          and med(motion_corrs) >= 0.9 and med(cca_reductions) >= 0.30
          and med(lms_residuals) < 0.10 and elapsed < 300.0)
    check(3, ok,
          f"medians over 20 seeds at 0 dB: DWT {med(dwt_gains):.2f} dB "
          f"(>=5), EMD-MAF {100*med(emd_reductions):.1f}% (>=30), "
          f"SSA-motion corr {med(motion_corrs):.3f} (>=0.9), SSA-CCA "
          f"{100*med(cca_reductions):.1f}% (>=30), LMS residual "
          f"{100*med(lms_residuals):.2f}% (<10) in {elapsed:.0f}s (<300)")


def test_criterion_4_gru_correctness():
    start = time.monotonic()
    from dataclasses import replace

    # finite-difference gradient check across 5 seeds
    worst = 0.0
    for seed in range(5):
        mc = ModelConfig(seq_len=3, feat_dim=2, hidden_size=4, n_classes=3,
                         seed=seed)
        model = init_gru(mc)
        rng = rng_stream(seed, "acc4-batch")
        seqs = rng.normal(size=(3, 3, 2))
        labels = rng.integers(0, 3, size=3)
        _, grads = loss_and_grad(model, seqs, labels)

        names = ("wz", "uz", "bz", "wr", "ur", "br", "wh", "uh", "bh")
        theta = np.concatenate(
            [getattr(model.params, n).ravel() for n in names]
            + [model.w_out.ravel(), model.b_out.ravel()]
        )
        flat_grad = np.concatenate(
            [grads[n].ravel() for n in names]
            + [grads["w_out"].ravel(), grads["b_out"].ravel()]
        )

        def loss_at(vec):
            offset = 0
            updates = {}
            for n in names:
                arr = getattr(model.params, n)
                updates[n] = vec[offset: offset + arr.size].reshape(
                    arr.shape)
                offset += arr.size
            w_out = vec[offset: offset + model.w_out.size].reshape(
                model.w_out.shape)
            offset += model.w_out.size
            b_out = vec[offset:]
            probe = replace(model, params=replace(model.params, **updates),
                            w_out=w_out, b_out=b_out)
            return loss_and_grad(probe, seqs, labels)[0]

        eps = 1e-5
        pick = rng_stream(seed, "acc4-pick").choice(
            len(theta), size=20, replace=False)
        for i in pick:
            bump = np.zeros_like(theta)
            bump[i] = eps
            numeric = (loss_at(theta + bump) - loss_at(theta - bump)) / (
                2 * eps)
            denom = max(abs(numeric), abs(flat_grad[i]), 1e-8)
            worst = max(worst, abs(numeric - flat_grad[i]) / denom)

    # zero-weight exactness
    mc = ModelConfig(seq_len=4, feat_dim=3, hidden_size=5, n_classes=3,
                     seed=0)
    model = init_gru(mc)
    zero = {n: np.zeros_like(getattr(model.params, n))
            for n in ("wz", "uz", "bz", "wr", "ur", "br", "wh", "uh", "bh")}
    model = replace(model, params=replace(model.params, **zero),
                    w_out=np.zeros_like(model.w_out),
                    b_out=np.zeros_like(model.b_out))
    from eegscrub.gru import forward
    hidden, probs = forward(model, np.ones((4, 3)))
    zero_ok = bool(np.all(hidden == 0.0) and np.allclose(probs, 1 / 3))
    seqs = rng_stream(0, "acc4-zero").normal(size=(2, 4, 3))
    loss, _ = loss_and_grad(model, seqs, np.array([0, 2]))
    ln3_ok = abs(loss - np.log(3.0)) < 1e-12

    # bit-reproducible training
    rng = rng_stream(1, "acc4-data")
    rows = np.concatenate([rng.normal(loc=3.0 * c, size=(15, 8))
                           for c in range(3)])
    labels = tuple([c for c in range(3) for _ in range(15)])
    data = FeatureMatrix(rows=rows,
                         feature_names=tuple(f"f{i}" for i in range(8)),
                         labels=labels)
    mc = ModelConfig.for_features(8, 3, hidden_size=8, seed=7)
    tc = TrainConfig(epochs=3, batch_size=8, seed=7)
    model_a, _ = train(data, mc, tc)
    model_b, _ = train(data, mc, tc)
    names = ("wz", "uz", "bz", "wr", "ur", "br", "wh", "uh", "bh")
    bit_ok = all(
        np.array_equal(getattr(model_a.params, n),
                       getattr(model_b.params, n))
        for n in names
    ) and np.array_equal(model_a.w_out, model_b.w_out)

    elapsed = time.monotonic() - start
    ok = worst < 1e-4 and zero_ok and ln3_ok and bit_ok and elapsed < 60.0
    check(4, ok,
          f"gradcheck worst rel err {worst:.2e} over 5 seeds (<1e-4), "
          f"zero-weight exact: {zero_ok and ln3_ok}, bit-reproducible: "
          f"{bit_ok}, in {elapsed:.1f}s (<60)")


def _dataset_path():
    return os.environ.get(DATASET_ENV, DATASET_DEFAULT)


def test_criterion_5_classification_reproduction():
    path = _dataset_path()
    if not os.path.exists(path):
        record_criterion(
            "criterion 5: SKIP - public emotion feature dataset not found "
            f"(looked at {os.path.normpath(path)}; set ${DATASET_ENV})"
        )
        pytest.skip(
            f"public dataset not found at {os.path.normpath(path)}; "
            f"download the Muse emotion feature CSV and set {DATASET_ENV} "
            "or place it at data/emotions.csv"
        )

    start = time.monotonic()
    ds = load_feature_csv(path)
    labels = np.array(ds.features.labels)
    train_idx, val_idx, test_idx = stratified_split(
        labels, (0.70, 0.15, 0.15), seed=0)
    fit_idx = np.sort(np.concatenate([train_idx, val_idx]))
    fit = FeatureMatrix(
        rows=ds.features.rows[fit_idx],
        feature_names=ds.features.feature_names,
        labels=tuple(labels[fit_idx]),
    )
    test = FeatureMatrix(
        rows=ds.features.rows[test_idx],
        feature_names=ds.features.feature_names,
        labels=tuple(labels[test_idx]),
    )
    frac = len(val_idx) / len(fit_idx)
    mc = ModelConfig.for_features(fit.n_features, 3, hidden_size=64, seed=0)
    tc = TrainConfig(epochs=30, batch_size=32, val_fraction=frac, seed=0)
    gru_model, _ = train(fit, mc, tc)
    gru_acc = evaluate(gru_model, test)["accuracy"]

    linear_model, _ = train_linear_baseline(
        fit, TrainConfig(epochs=30, batch_size=32, learning_rate=0.01,
                         val_fraction=frac, seed=0))
    lin_acc = evaluate(linear_model, test)["accuracy"]

    elapsed = time.monotonic() - start
    ok = gru_acc >= 0.90 and lin_acc >= 0.85 and elapsed < 600.0
    check(5, ok,
          f"test accuracy GRU {gru_acc:.4f} (>=0.90), linear {lin_acc:.4f} "
          f"(>=0.85) on 70/15/15 split in {elapsed:.0f}s (<600)")


def test_criterion_5_surrogate_pipeline():
    """Always-on stand-in: same split/train/eval path on synthetic features.

    This does not replace criterion 5 (it uses surrogate data, not the
    public dataset); it proves the pipeline clears the same thresholds on
    data of known structure.
    """
    rng = rng_stream(0, "acc5-surrogate")
    rows, labels = [], []
    for cls in range(3):
        center = np.zeros(48)
        center[cls * 16:(cls + 1) * 16] = 2.0
        for _ in range(120):
            rows.append(center + 0.8 * rng.normal(size=48))
            labels.append(cls)
    data = FeatureMatrix(rows=np.array(rows),
                         feature_names=tuple(f"f{i}" for i in range(48)),
                         labels=tuple(labels))
    labels = np.array(data.labels)
    train_idx, val_idx, test_idx = stratified_split(
        labels, (0.70, 0.15, 0.15), seed=0)
    fit_idx = np.sort(np.concatenate([train_idx, val_idx]))
    fit = FeatureMatrix(rows=data.rows[fit_idx],
                        feature_names=data.feature_names,
                        labels=tuple(labels[fit_idx]))
    test = FeatureMatrix(rows=data.rows[test_idx],
                         feature_names=data.feature_names,
                         labels=tuple(labels[test_idx]))
    frac = len(val_idx) / len(fit_idx)
    mc = ModelConfig.for_features(48, 3, hidden_size=16, seed=0)
    tc = TrainConfig(epochs=40, batch_size=16, learning_rate=0.005,
                     val_fraction=frac, seed=0)
    gru_model, _ = train(fit, mc, tc)
    gru_acc = evaluate(gru_model, test)["accuracy"]
    linear_model, _ = train_linear_baseline(
        fit, TrainConfig(epochs=40, batch_size=16, learning_rate=0.05,
                         val_fraction=frac, seed=0))
    lin_acc = evaluate(linear_model, test)["accuracy"]
    assert gru_acc >= 0.90
    assert lin_acc >= 0.85


def test_criterion_6_metrics_self_consistency():
    result = run_bench(
        methods=["identity", "dwt"],
        noise_specs=["kind=awgn", "kind=powerline", "kind=baseline_wander",
                     "kind=emg_burst,duty=1"],
        snrs_db=[-5.0, 0.0, 5.0],
        seeds=[0, 1, 2],
        n=1024,
    )
    worst = max(row["mix_roundtrip_max_db"] for row in result["rows"])
    ok = worst < 1e-6
    check(6, ok,
          f"mix->metrics round trip worst {worst:.2e} dB across "
          f"{len(result['rows'])} bench cells (<1e-6)")


def test_criterion_7_evaluation_arithmetic():
    class Stub:
        def __init__(self, preds, c=3):
            self.preds = preds
            self.c = c

        def predict_proba(self, rows):
            probs = np.full((len(rows), self.c), 1e-9)
            for i, p in enumerate(self.preds):
                probs[i, p] = 1.0
            return probs / probs.sum(axis=1, keepdims=True)

    def run_case(truths, preds):
        rows = np.zeros((len(truths), 1))
        data = FeatureMatrix(rows=rows, feature_names=("x",),
                             labels=tuple(truths))
        return evaluate(Stub(preds), data)

    perfect = run_case([0, 1, 2, 0], [0, 1, 2, 0])
    hand = run_case([0, 0, 1, 2], [0, 1, 1, 2])
    collapsed = run_case([0, 1, 2], [0, 0, 0])

    ok = (
        perfect["accuracy"] == 1.0
        and perfect["f1"] == (1.0, 1.0, 1.0)
        and np.array_equal(np.diag(np.diag(perfect["confusion"].counts)),
                           perfect["confusion"].counts)
        and hand["accuracy"] == 0.75
        and hand["precision"][1] == 0.5
        and hand["recall"][1] == 1.0
        and hand["recall"][0] == 0.5
        and collapsed["accuracy"] == pytest.approx(1.0 / 3.0)
        and collapsed["recall"][0] == 1.0
        and collapsed["precision"][1] == 0.0
        and collapsed["flags"]["precision"][1] is True
    )
    check(7, ok, "confusion/precision/recall/F1 hand counts exact")
