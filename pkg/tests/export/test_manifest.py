import json

from laeo_gaze import __version__
from laeo_gaze.export import build_manifest, write_json, write_manifest


class TestManifest:

    def test_fields(self):
        manifest = build_manifest("train", 7, {"iterations": 3}, ["runs/x/summary.json", "runs/x/history.csv"],
                                  ["data/scenes.jsonl"])
        assert manifest == {
            "command": "train",
            "seed": 7,
            "version": __version__,
            "config": {"iterations": 3},
            "inputs": ["data/scenes.jsonl"],
            "outputs": ["history.csv", "summary.json"],
        }

    def test_rewrite_is_byte_identical(self, tmp_path):
        first = write_manifest(str(tmp_path), "synth", 1, {"b": 1, "a": [1, 2]}, ["scenes.jsonl"])
        before = open(first, "rb").read()
        write_manifest(str(tmp_path), "synth", 1, {"a": [1, 2], "b": 1}, ["scenes.jsonl"])
        assert open(first, "rb").read() == before
        assert json.loads(before)["inputs"] == []

    def test_write_json_sorts_keys(self, tmp_path):
        path = write_json(str(tmp_path / "s.json"), {"z": 1, "a": 2})
        text = open(path).read()
        assert text.index('"a"') < text.index('"z"')
        assert text.endswith("}\n")
