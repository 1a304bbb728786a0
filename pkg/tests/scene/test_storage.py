import json
import logging

import numpy as np
import pytest

from laeo_gaze.errors import RecordError
from laeo_gaze.scene import ingest_scenes, write_scenes
from laeo_gaze.scene.storage import pair_to_dict


class TestSceneStorage:

    def test_roundtrip(self, tmp_path, clean_pairs):
        path = str(tmp_path / "scenes.jsonl")
        assert write_scenes(path, clean_pairs) == len(clean_pairs)
        loaded = ingest_scenes(path)
        assert [pair_to_dict(p) for p in loaded.pairs] == [pair_to_dict(p) for p in clean_pairs]

    def test_rewrite_is_byte_identical(self, tmp_path, clean_pairs):
        first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_scenes(str(first), clean_pairs)
        write_scenes(str(second), ingest_scenes(str(first)).pairs)
        assert first.read_bytes() == second.read_bytes()

    def test_negative_depth_names_line(self, tmp_path, clean_pairs):
        records = [pair_to_dict(p) for p in clean_pairs[:4]]
        records[2]["subjects"][0]["depth_mm"] = -5.0
        path = tmp_path / "bad.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        with pytest.raises(RecordError) as exc:
            ingest_scenes(str(path))
        assert exc.value.line_number == 3
        assert "line 3" in str(exc.value)

    def test_inconsistent_backprojection(self, tmp_path, clean_pair):
        record = pair_to_dict(clean_pair)
        record["subjects"][1]["cyclopean_3d"][2] += 10.0
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(RecordError, match="back-projection"):
            ingest_scenes(str(path))

    def test_pixel_coordinates_are_centered(self, tmp_path, clean_pair):
        record = pair_to_dict(clean_pair)
        cx, cy = record["camera"]["pp"]
        record["coords"] = "pixel"
        for s in record["subjects"]:
            s["eyes_2d"] = [[x + cx, y + cy] for x, y in s["eyes_2d"]]
            s["head_box"] = [s["head_box"][0] + cx, s["head_box"][1] + cy, s["head_box"][2] + cx, s["head_box"][3] + cy]
            s["body_box"] = [s["body_box"][0] + cx, s["body_box"][1] + cy, s["body_box"][2] + cx, s["body_box"][3] + cy]
            del s["cyclopean_3d"]
        path = tmp_path / "pixel.jsonl"
        path.write_text(json.dumps(record) + "\n")
        loaded = ingest_scenes(str(path)).pairs[0]
        np.testing.assert_allclose(
            loaded.subject_a.cyclopean_3d.to_array(), clean_pair.subject_a.cyclopean_3d.to_array(), rtol=1e-9
        )

    def test_duplicate_frame_id(self, tmp_path, clean_pair):
        line = json.dumps(pair_to_dict(clean_pair)) + "\n"
        path = tmp_path / "dup.jsonl"
        path.write_text(line + line)
        with pytest.raises(RecordError) as exc:
            ingest_scenes(str(path))
        assert exc.value.line_number == 2

    def test_empty_file_warns(self, tmp_path, caplog):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with caplog.at_level(logging.WARNING):
            dataset = ingest_scenes(str(path))
        assert len(dataset) == 0
        assert "empty" in caplog.text

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="missing.jsonl"):
            ingest_scenes(str(tmp_path / "missing.jsonl"))
