import numpy as np
import pytest

from eegscrub import (
    FeatureMatrix,
    load_feature_csv,
    load_raw_csv,
    read_report,
    rng_stream,
    save_feature_csv,
)
from eegscrub.cli import main


def run(*argv):
    return main(list(argv))


@pytest.fixture
def raw_csv(tmp_path):
    path = tmp_path / "raw.csv"
    assert run("simulate", "--out", str(path), "--duration", "4",
               "--channels", "4", "--noise", "kind=awgn,seed=3",
               "--snr", "0", "--seed", "5") == 0
    return path


@pytest.fixture
def labeled_csv(tmp_path):
    rng = rng_stream(0, "cli-blobs")
    rows, labels = [], []
    for cls in range(3):
        center = np.zeros(24)
        center[cls * 8:(cls + 1) * 8] = 3.0
        for _ in range(20):
            rows.append(center + 0.4 * rng.normal(size=24))
            labels.append(cls)
    matrix = FeatureMatrix(
        rows=np.array(rows),
        feature_names=tuple(f"f{i}" for i in range(24)),
        labels=tuple(labels),
    )
    path = tmp_path / "features.csv"
    save_feature_csv(matrix, path)
    return path


class TestExitCodes:
    def test_no_subcommand(self, capsys):
        assert run() == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert run("frobnicate") == 1

    def test_unknown_flag(self, capsys):
        assert run("simulate", "--out", "x.csv", "--bogus") == 1

    def test_missing_input_is_data_error(self, tmp_path, capsys):
        assert run("denoise", "--in", str(tmp_path / "nope.csv"),
                   "--method", "dwt",
                   "--out", str(tmp_path / "out.csv")) == 2

    def test_clobber_guard(self, raw_csv, capsys):
        assert run("denoise", "--in", str(raw_csv), "--method", "dwt",
                   "--out", str(raw_csv)) == 1
        assert "refusing" in capsys.readouterr().err

    def test_corrupt_model_is_data_error(self, tmp_path, labeled_csv):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"garbage")
        assert run("eval", "--features", str(labeled_csv),
                   "--model", str(bad)) == 2


class TestSimulate:
    def test_writes_csv_and_report(self, raw_csv):
        rec = load_raw_csv(raw_csv)
        assert rec.n_channels == 4
        report = read_report(str(raw_csv) + ".report.json")
        assert report["command"] == "simulate"
        assert report["config"]["seed"] == 5
        assert report["config"]["noise"].startswith("kind=awgn")
        mixes = report["results"]["mixes"]
        assert len(mixes) == 4
        for mix in mixes:
            assert abs(mix["achieved_snr_db"]) < 1e-6

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EEGSCRUB_SEED", "42")
        out = tmp_path / "env.csv"
        assert run("simulate", "--out", str(out), "--duration", "1",
                   "--channels", "1") == 0
        assert read_report(str(out) + ".report.json")["config"]["seed"] == 42


class TestDenoise:
    def test_writes_output_and_report(self, raw_csv, tmp_path):
        out = tmp_path / "clean.csv"
        before = raw_csv.read_bytes()
        assert run("denoise", "--in", str(raw_csv), "--method", "dwt",
                   "--out", str(out)) == 0
        assert raw_csv.read_bytes() == before  # input not mutated
        cleaned = load_raw_csv(out)
        assert cleaned.n_channels == 4
        report = read_report(str(out) + ".report.json")
        assert report["config"]["method"] == "dwt"
        assert report["config"]["levels"] == 3
        assert len(report["results"]["reports"]) == 4
        assert report["results"]["reports"][0]["method_id"] == "dwt"

    def test_multichannel_method(self, raw_csv, tmp_path):
        out = tmp_path / "clean.csv"
        assert run("denoise", "--in", str(raw_csv), "--method", "ssa_cca",
                   "--out", str(out)) == 0
        report = read_report(str(out) + ".report.json")
        assert report["results"]["reports"][0]["method_id"] == "ssa_cca"


class TestFeaturePipeline:
    def test_extract_train_eval_predict(self, raw_csv, tmp_path,
                                        labeled_csv, capsys):
        feats = tmp_path / "extracted.csv"
        assert run("extract-features", "--in", str(raw_csv), "--out",
                   str(feats), "--window-s", "1.0", "--label",
                   "NEUTRAL") == 0
        extracted = load_feature_csv(feats)
        assert set(extracted.features.labels) == {1}

        model = tmp_path / "model.bin"
        history = tmp_path / "history.csv"
        assert run("train", "--features", str(labeled_csv), "--model",
                   str(model), "--history", str(history), "--epochs", "6",
                   "--hidden", "8", "--seed", "3") == 0
        lines = history.read_text().strip().split("\n")
        assert lines[0] == "epoch,train_loss,train_acc,val_loss,val_acc"
        assert len(lines) == 7
        report = read_report(str(model) + ".report.json")
        assert report["config"]["train_config"]["epochs"] == 6
        assert report["config"]["model_kind"] == "gru"

        assert run("eval", "--features", str(labeled_csv), "--model",
                   str(model)) == 0
        out = capsys.readouterr().out
        assert "accuracy" in out
        eval_report = read_report(
            str(model).replace(".bin", ".bin.eval-report.json"))
        assert len(eval_report["results"]["confusion_counts"]) == 3

        preds = tmp_path / "preds.csv"
        assert run("predict", "--features", str(labeled_csv), "--model",
                   str(model), "--out", str(preds)) == 0
        lines = preds.read_text().strip().split("\n")
        assert lines[0].startswith("row,label,class,p_NEGATIVE")
        assert len(lines) == 61

    def test_train_deterministic(self, tmp_path, labeled_csv):
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        for path in (a, b):
            assert run("train", "--features", str(labeled_csv), "--model",
                       str(path), "--epochs", "3", "--hidden", "8",
                       "--seed", "7") == 0
        assert a.read_bytes() == b.read_bytes()

    def test_linear_model_kind(self, tmp_path, labeled_csv):
        model = tmp_path / "linear.bin"
        assert run("train", "--features", str(labeled_csv), "--model",
                   str(model), "--model-kind", "linear", "--epochs",
                   "5") == 0
        report = read_report(str(model) + ".report.json")
        assert report["config"]["model_kind"] == "linear"


class TestBench:
    def test_small_grid(self, tmp_path):
        out = tmp_path / "leaderboard.csv"
        assert run("bench", "--methods", "identity,dwt", "--noises",
                   "kind=awgn", "--snrs", "0", "--seeds", "2", "--n",
                   "1024", "--out", str(out)) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("method,")
        assert len(lines) == 3  # header + 2 methods x 1 noise x 1 snr
        report = read_report(str(out) + ".report.json")
        assert report["config"]["n_seeds"] == 2
        assert len(report["results"]["rows"]) == 2
