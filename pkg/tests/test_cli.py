import csv
import io
import json

import pytest

from shadesearch.cli import main
from shadesearch.image import decode_ppm, encode_ppm

from conftest import random_rgb


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synthetic corpus plus shaded and unshaded indices, built via the CLI."""
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus"
    assert main(["synth", str(corpus), "--seed", "42"]) == 0
    shaded = root / "shaded.json"
    unshaded = root / "unshaded.json"
    assert main(["index", str(corpus), "--out", str(shaded), "--phong"]) == 0
    assert main(["index", str(corpus), "--out", str(unshaded)]) == 0
    return {"root": root, "corpus": corpus, "shaded": shaded, "unshaded": unshaded}


class TestIndexCommand:
    def test_entry_count_matches_corpus(self, workspace):
        doc = json.loads(workspace["shaded"].read_text())
        assert len(doc["entries"]) == 70
        assert doc["phong"] is not None

    def test_omitted_phong_flag_records_null(self, workspace):
        doc = json.loads(workspace["unshaded"].read_text())
        assert doc["phong"] is None

    def test_empty_corpus_fails_with_message(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        code = main(["index", str(tmp_path / "empty"), "--out", str(tmp_path / "ix.json")])
        assert code != 0
        captured = capsys.readouterr()
        assert "error" in captured.err and "no" in captured.err
        assert captured.out == ""


class TestQueryCommand:
    def test_indexed_image_ranks_itself_first(self, workspace, capsys):
        image = workspace["corpus"] / "checker" / "00.ppm"
        code = main(["query", str(workspace["shaded"]), str(image), "--format", "plain"])
        assert code == 0
        first = capsys.readouterr().out.splitlines()[0].split("\t")
        assert first == ["1", "checker/00.ppm", "checker", "0.000000"]

    def test_top_limits_output_lines(self, workspace, capsys):
        image = workspace["corpus"] / "hue" / "03.ppm"
        assert main(
            ["query", str(workspace["unshaded"]), str(image), "--top", "3",
             "--format", "plain"]
        ) == 0
        assert len(capsys.readouterr().out.splitlines()) == 3

    def test_csv_output_distances_non_decreasing(self, workspace, capsys):
        image = workspace["corpus"] / "stripes" / "05.ppm"
        assert main(
            ["query", str(workspace["unshaded"]), str(image), "--format", "csv"]
        ) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 12
        distances = [float(r["distance"]) for r in rows]
        assert distances == sorted(distances)

    def test_missing_index_file_fails(self, workspace, capsys):
        image = workspace["corpus"] / "hue" / "00.ppm"
        assert main(["query", str(workspace["root"] / "nope.json"), str(image)]) != 0
        assert "error" in capsys.readouterr().err


class TestEvalCommand:
    def test_report_files_and_row_counts(self, workspace, capsys, tmp_path):
        report = tmp_path / "report"
        code = main(
            ["eval", str(workspace["shaded"]), str(workspace["unshaded"]),
             "--report-dir", str(report)]
        )
        assert code == 0
        with open(report / "report.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert sum(1 for r in rows if r["mode"] == "shaded") == 5
        assert sum(1 for r in rows if r["mode"] == "unshaded") == 5
        # default --top is 12
        assert all(int(r["retrieved"]) == 12 for r in rows)
        assert (report / "report.html").exists()

    def test_mismatched_corpora_fail(self, workspace, tmp_path, capsys, rng):
        other = tmp_path / "other"
        (other / "cat").mkdir(parents=True)
        (other / "cat" / "0.ppm").write_bytes(encode_ppm(random_rgb(rng, 8, 8)))
        shaded_other = tmp_path / "other_shaded.json"
        assert main(["index", str(other), "--out", str(shaded_other), "--phong"]) == 0
        capsys.readouterr()
        code = main(["eval", str(shaded_other), str(workspace["unshaded"])])
        assert code != 0
        assert "corpora" in capsys.readouterr().err

    def test_swapped_indices_fail(self, workspace, capsys):
        code = main(["eval", str(workspace["unshaded"]), str(workspace["shaded"])])
        assert code != 0
        assert "shading" in capsys.readouterr().err


class TestShadeCommand:
    def test_identity_configuration_round_trips(self, tmp_path, capsys, rng):
        img = random_rgb(rng, 9, 6)
        src = tmp_path / "in.ppm"
        dst = tmp_path / "out.ppm"
        src.write_bytes(encode_ppm(img))
        code = main(
            ["shade", str(src), "--out", str(dst),
             "--ka", "1", "--ia", "1", "--kd", "0", "--ks", "0"]
        )
        assert code == 0
        assert decode_ppm(dst.read_bytes()) == img

    def test_tiled_mode_writes_output(self, tmp_path, rng):
        src = tmp_path / "in.ppm"
        dst = tmp_path / "out.ppm"
        src.write_bytes(encode_ppm(random_rgb(rng, 12, 12)))
        assert main(["shade", str(src), "--out", str(dst), "--tiled", "4"]) == 0
        assert dst.exists()

    def test_tile_of_one_is_a_parameter_error(self, tmp_path, capsys, rng):
        src = tmp_path / "in.ppm"
        src.write_bytes(encode_ppm(random_rgb(rng, 4, 4)))
        code = main(["shade", str(src), "--out", str(tmp_path / "o.ppm"), "--tiled", "1"])
        assert code != 0
        assert "tile" in capsys.readouterr().err


class TestSynthCommand:
    def test_same_seed_twice_is_identical(self, tmp_path):
        for name in ("one", "two"):
            assert main(["synth", str(tmp_path / name), "--seed", "7"]) == 0
        files_one = sorted((tmp_path / "one").rglob("*.ppm"))
        files_two = sorted((tmp_path / "two").rglob("*.ppm"))
        assert [p.name for p in files_one] == [p.name for p in files_two]
        for a, b in zip(files_one, files_two):
            assert a.read_bytes() == b.read_bytes()
