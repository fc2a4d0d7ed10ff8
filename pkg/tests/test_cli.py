import csv
import io
import json

import numpy as np
import pytest

from approxpupil.cli import (
    EXIT_CONFIG,
    EXIT_NO_PUPIL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    main,
)
from approxpupil.pgm import read_pgm, write_pgm
from approxpupil.report import SCHEMA_VERSION
from approxpupil.synth import EyeSpec, generate_eye


@pytest.fixture
def eye_file(tmp_path):
    img, _ = generate_eye(EyeSpec(noise_sigma=3.0, seed=5))
    path = tmp_path / "eye.pgm"
    write_pgm(path, img)
    return path


@pytest.fixture
def corpus(tmp_path):
    out = tmp_path / "corpus"
    assert main(["synth", "--count", "4", "--seed", "3", "--out", str(out)]) == EXIT_OK
    return out


def load(path):
    return json.loads(path.read_text())


class TestRun:
    def test_outputs_and_report(self, tmp_path, eye_file):
        out = tmp_path / "out"
        rep = tmp_path / "run.json"
        assert main(["run", str(eye_file), "--out", str(out), "--report", str(rep)]) == EXIT_OK
        names = sorted(p.name for p in out.iterdir())
        assert names == ["eye_edges.pgm", "eye_mask.pgm", "eye_overlay.pgm"]
        edges = read_pgm(out / "eye_edges.pgm")
        assert set(np.unique(edges)) <= {0, 255}
        report = load(rep)
        assert report["schema_version"] == SCHEMA_VERSION
        assert len(report["rows"]) == 1
        row = report["rows"][0]
        assert row["input"] == str(eye_file) and "seed" in row
        assert abs(row["cx"] - 32) < 2 and abs(row["cy"] - 32) < 2

    def test_p2_is_format_error(self, tmp_path, capsys):
        p = tmp_path / "a.pgm"
        p.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
        assert main(["run", str(p), "--out", str(tmp_path)]) == EXIT_PARSE
        assert "P5" in capsys.readouterr().err

    def test_truncated_payload(self, tmp_path, capsys):
        p = tmp_path / "a.pgm"
        p.write_bytes(b"P5\n20 20\n255\n" + bytes(100))
        assert main(["run", str(p), "--out", str(tmp_path)]) == EXIT_PARSE
        err = capsys.readouterr().err
        assert "expected 400 bytes, got 100" in err and "byte offset" in err

    def test_no_pupil_exit_code(self, tmp_path):
        p = tmp_path / "flat.pgm"
        write_pgm(p, np.full((32, 32), 50, dtype=np.uint8))
        rep = tmp_path / "r.json"
        assert main(["run", str(p), "--out", str(tmp_path / "o"), "--report", str(rep)]) \
            == EXIT_NO_PUPIL
        assert load(rep)["rows"][0]["status"] == "no_pupil"

    def test_bad_config_exit_code(self, eye_file, tmp_path):
        # 100 is not a multiple of 2^5
        assert main(["run", str(eye_file), "--out", str(tmp_path),
                     "--threshold-intensity", "100"]) == EXIT_CONFIG

    def test_csv_report(self, tmp_path, corpus):
        rep = tmp_path / "run.csv"
        assert main(["run", str(corpus), "--out", str(tmp_path / "o"), "--report", str(rep)]) \
            == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(rep.read_text())))
        assert len(rows) == 4
        assert rows[0]["schema_version"] == str(SCHEMA_VERSION)
        assert rows[0]["seed"] != ""
        assert int(rows[0]["gaussian_us"]) >= 0


class TestCompare:
    def test_forced_exact_is_identical(self, tmp_path, corpus):
        rep = tmp_path / "c.json"
        assert main(["compare", str(corpus), "--variant", "exact", "--report", str(rep)]) == EXIT_OK
        report = load(rep)
        for row in report["rows"]:
            for stage in ("smoothed", "edge_map_e1", "pupil_mask", "edge_map_e2", "edge_map"):
                assert row[f"psnr_{stage}"] == "inf"
                assert row[f"ssim_{stage}"] == 1.0
        assert report["aggregates"]["psnr_db"]["mean"] == "inf"

    def test_csv_inf_token(self, tmp_path, corpus):
        rep = tmp_path / "c.csv"
        main(["compare", str(corpus), "--variant", "exact", "--report", str(rep)])
        rows = list(csv.DictReader(io.StringIO(rep.read_text())))
        assert rows[0]["psnr_db"] == "inf"

    def test_default_compare_report(self, tmp_path, corpus):
        rep = tmp_path / "c.json"
        assert main(["compare", str(corpus), "--report", str(rep)]) == EXIT_OK
        report = load(rep)
        assert set(report) >= {"schema_version", "config", "rows", "aggregates", "cost",
                               "published_reference"}
        assert report["config"]["candidate"]["gaussian"] == {"width": 12, "approx_bits": 5,
                                                             "cell": "loa"}
        agg = report["aggregates"]
        psnrs = [r["psnr_db"] for r in report["rows"]]
        assert agg["psnr_db"]["mean"] == pytest.approx(np.mean(psnrs))
        assert agg["psnr_db"]["min"] == min(psnrs)
        for row in report["rows"]:
            assert row["seed"] is not None
            assert {"exact_gaussian_us", "approx_localize_us"} <= set(row)
        assert report["cost"]["gaussian"]["comparator_reduction"] == pytest.approx(5 / 8)
        assert report["cost"]["prewitt"]["comparator_reduction"] == pytest.approx(7 / 12)

    def test_parallel_rows_keep_input_order(self, tmp_path, corpus):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["compare", str(corpus), "--report", str(a)])
        main(["compare", str(corpus), "--report", str(b), "--jobs", "2"])
        strip = lambda r: {k: v for k, v in r.items() if not k.endswith("_us")}  # noqa: E731
        assert [strip(r) for r in load(a)["rows"]] == [strip(r) for r in load(b)["rows"]]

    def test_empty_input_list(self, capsys):
        assert main(["compare"]) == EXIT_USAGE


class TestCharacterize:
    def test_loa_row(self, capsys):
        assert main(["characterize", "--width", "8", "--cell", "loa", "--approx-bits", "5"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 1
        assert float(rows[0]["error_rate"]) == pytest.approx(781 / 1024)
        assert float(rows[0]["mean_error_distance"]) == 5.875
        assert rows[0]["max_error_distance"] == "16"

    def test_exact_row(self, capsys):
        assert main(["characterize", "--width", "8", "--cell", "exact", "--approx-bits", "0"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert float(rows[0]["error_rate"]) == 0

    def test_width_cap(self, capsys):
        assert main(["characterize", "--width", "16"]) == EXIT_CONFIG
        assert "capped at 12" in capsys.readouterr().err

    def test_json_report(self, tmp_path):
        rep = tmp_path / "ch.json"
        assert main(["characterize", "--comparator-width", "12", "--ignore-lsbs", "7",
                     "--report", str(rep)]) == 0
        row = load(rep)["rows"][0]
        assert row["comparator_bits_truncated"] == 5


class TestSynth:
    def test_count_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["synth", "--count", "10", "--seed", "42", "--out", str(a)]) == 0
        assert main(["synth", "--count", "10", "--seed", "42", "--out", str(b)]) == 0
        files = sorted(a.glob("*.pgm"))
        assert len(files) == 10
        for f in files:
            assert f.read_bytes() == (b / f.name).read_bytes()
        rows = list(csv.DictReader(open(a / "ground_truth.csv")))
        assert len(rows) == 10
        assert list(rows[0]) == ["file", "seed", "cx", "cy", "r"]
        assert (a / "ground_truth.csv").read_text() == (b / "ground_truth.csv").read_text()

    def test_zero_count(self, tmp_path):
        assert main(["synth", "--count", "0", "--out", str(tmp_path / "z")]) == 0
        assert (tmp_path / "z" / "ground_truth.csv").read_text() == "file,seed,cx,cy,r\n"
        assert not list((tmp_path / "z").glob("*.pgm"))

    def test_pupil_larger_than_iris(self, tmp_path):
        assert main(["synth", "--count", "1", "--pupil-radius", "20", "--iris-radius", "10",
                     "--out", str(tmp_path / "x")]) == EXIT_CONFIG
