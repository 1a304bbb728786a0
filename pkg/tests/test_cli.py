import csv
import json

import pytest

from laeo_gaze.cli import run


def _read_csv(path):
    with open(path) as f:
        return list(csv.DictReader(f))


@pytest.fixture
def scenes(tmp_path):
    out = tmp_path / "data"
    assert run(["synth", "--n", "6", "--seed", "7", "--out", str(out)]) == 0
    return out / "scenes.jsonl"


class TestDatasetCommands:

    def test_synth_is_reproducible(self, tmp_path, scenes):
        again = tmp_path / "again"
        assert run(["synth", "--n", "6", "--seed", "7", "--out", str(again)]) == 0
        assert (again / "scenes.jsonl").read_bytes() == scenes.read_bytes()
        assert (again / "manifest.json").read_bytes() == (scenes.parent / "manifest.json").read_bytes()

    def test_manifest(self, scenes):
        manifest = json.loads((scenes.parent / "manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["seed"] == 7
        assert manifest["outputs"] == ["scenes.jsonl"]
        assert manifest["config"]["n"] == 6

    def test_labels_on_clean_scenes(self, tmp_path, scenes):
        out = tmp_path / "labels"
        assert run(["labels", "--input", str(scenes), "--out", str(out)]) == 0
        rows = _read_csv(out / "labels.csv")
        assert len(rows) == 12
        assert rows[0]["subject"] == "a" and rows[1]["subject"] == "b"
        assert all(float(r["error_deg"]) < 1e-6 for r in rows)

    def test_corrupt_then_label(self, tmp_path, scenes):
        noisy = tmp_path / "noisy"
        assert run(["corrupt", "--input", str(scenes), "--focal-mode", "max-image-dim",
                    "--out", str(noisy)]) == 0
        out = tmp_path / "labels"
        assert run(["labels", "--input", str(noisy / "scenes.jsonl"), "--out", str(out)]) == 0
        assert max(float(r["error_deg"]) for r in _read_csv(out / "labels.csv")) > 0.1

    def test_multiview_frames(self, tmp_path):
        out = tmp_path / "mv"
        assert run(["synth", "--multiview", "--n", "3", "--out", str(out)]) == 0
        assert len((out / "frames.jsonl").read_text().splitlines()) == 3


class TestGradcheckCommand:

    def test_passes(self, tmp_path):
        out = tmp_path / "gc"
        argv = ["gradcheck", "--configs", "5", "--loss", "aleatoric", "--loss", "geom3d_plane", "--out", str(out)]
        assert run(argv) == 0
        rows = _read_csv(out / "gradcheck.csv")
        assert [r["loss"] for r in rows] == ["aleatoric", "geom3d_plane"]

    def test_failure_exit_code(self, tmp_path):
        argv = ["gradcheck", "--configs", "2", "--loss", "aleatoric", "--tolerance", "-1", "--out", str(tmp_path)]
        assert run(argv) == 2


class TestTrainCommand:

    def test_outputs(self, tmp_path, scenes):
        out = tmp_path / "train"
        argv = ["train", "--input", str(scenes), "--predictor", "direct", "--iterations", "5",
                "--learning-rate", "0.005", "--out", str(out)]
        assert run(argv) == 0
        assert len(_read_csv(out / "history.csv")) == 5
        summary = json.loads((out / "summary.json").read_text())
        assert summary["iterations"] == 5
        assert (out / "params.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["outputs"] == ["history.csv", "params.json", "summary.json"]
        assert manifest["config"]["learning_rate"] == 0.005

    def test_supervised_schedule_needs_labels(self, tmp_path, scenes):
        argv = ["train", "--input", str(scenes), "--schedule", "supervised_only", "--out", str(tmp_path)]
        assert run(argv) == 1

    def test_unknown_config_key(self, tmp_path, scenes):
        config = tmp_path / "train.env"
        config.write_text("momentum=0.9\n")
        argv = ["train", "--input", str(scenes), "--config", str(config), "--out", str(tmp_path)]
        assert run(argv) == 1


class TestStudyCommands:

    @pytest.fixture
    def short_run(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"iterations": 10}))
        return path

    def test_ablate(self, tmp_path, short_run):
        out = tmp_path / "ablate"
        argv = ["ablate", "--losses", "pseudo,sym", "--losses", "geom3d,sym", "--seeds", "2", "--n", "6",
                "--config", str(short_run), "--out", str(out)]
        assert run(argv) == 0
        rows = _read_csv(out / "ablation.csv")
        assert [r["name"] for r in rows] == ["pseudo,sym", "geom3d,sym"]
        assert rows[0]["seeds"] == "2"
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seeds"] == [42, 43]

    def test_ablate_modes_apply_to_the_default_grid(self, tmp_path, short_run):
        out = tmp_path / "ablate"
        argv = ["ablate", "--geom3d-mode", "cosine", "--seeds", "1", "--n", "6",
                "--config", str(short_run), "--out", str(out)]
        assert run(argv) == 0
        rows = _read_csv(out / "ablation.csv")
        assert len(rows) == 7
        assert {r["geom3d_mode"] for r in rows} == {"cosine"}
        assert {r["pseudo_mode"] for r in rows} == {"weighted"}

    def test_ablate_variants_reject_mode_options(self, tmp_path):
        assert run(["ablate", "--variants", "--pseudo-mode", "naive", "--out", str(tmp_path)]) == 1
        assert not (tmp_path / "ablation.csv").exists()

    def test_noise_study(self, tmp_path, short_run):
        out = tmp_path / "noise"
        argv = ["noise-study", "--sigma", "0.0,0.2", "--arm", "with_l2d", "--seeds", "1", "--n", "6",
                "--config", str(short_run), "--out", str(out)]
        assert run(argv) == 0
        rows = _read_csv(out / "noise_study.csv")
        assert [(r["sigma"], r["arm"]) for r in rows] == [("0.0", "with_l2d"), ("0.2", "with_l2d")]

    def test_label_study(self, tmp_path):
        out = tmp_path / "labels"
        assert run(["label-study", "--n", "30", "--out", str(out)]) == 0
        summary = json.loads((out / "label_study.json").read_text())
        assert summary["eye_center_assumption_error_deg"] == pytest.approx(4.29, abs=0.01)
        errors = [r["mean_err_deg"] for r in summary["rungs"]]
        assert errors[-1] == pytest.approx(0.0, abs=1e-6)
        assert len(_read_csv(out / "label_study.csv")) == len(errors)


class TestDetectCommand:

    def test_synthesized_frames(self, tmp_path):
        out = tmp_path / "detect"
        assert run(["detect", "--n", "5", "--out", str(out)]) == 0
        result = json.loads((out / "detect.json").read_text())
        assert result["precision"] == 1.0 and result["recall"] == 1.0
        decisions = _read_csv(out / "decisions.csv")
        assert [d["status"] for d in decisions] == ["laeo"] * 5

    def test_stored_frames(self, tmp_path):
        data = tmp_path / "mv"
        assert run(["synth", "--multiview", "--n", "2", "--out", str(data)]) == 0
        out = tmp_path / "detect"
        assert run(["detect", "--input", str(data / "frames.jsonl"), "--out", str(out)]) == 0
        assert len(_read_csv(out / "decisions.csv")) == 2


class TestErrors:

    def test_missing_input(self, tmp_path):
        assert run(["labels", "--input", str(tmp_path / "absent.jsonl"), "--out", str(tmp_path)]) == 1

    def test_bad_choice(self, tmp_path):
        assert run(["gradcheck", "--loss", "hinge", "--out", str(tmp_path)]) == 1

    def test_corrupt_record(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{not json}\n")
        assert run(["labels", "--input", str(bad), "--out", str(tmp_path)]) == 1
