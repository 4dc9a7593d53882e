"""Command-line surface: exit codes, formats, determinism."""

import io

import pytest

from wsvoronoi.cli import main
from wsvoronoi.datagen import random_sites, sites_to_text
from wsvoronoi.records import read_stream

TRIANGLE = "0 0\n8 0\n0 6\n"
RECTANGLE = "0 0\n8 0\n0 6\n8 6\n"


@pytest.fixture
def tri_file(tmp_path):
    path = tmp_path / "tri.txt"
    path.write_text(TRIANGLE)
    return str(path)


@pytest.fixture
def random_file(tmp_path):
    path = tmp_path / "rand.txt"
    path.write_text(sites_to_text(random_sites(12, 2024)))
    return str(path)


class TestValidate:
    def test_ok(self, tri_file):
        assert main(["validate", tri_file]) == 0

    def test_cocircular(self, tmp_path):
        path = tmp_path / "rect.txt"
        path.write_text(RECTANGLE)
        assert main(["validate", str(path)]) == 2

    def test_duplicate(self, tmp_path):
        path = tmp_path / "dup.txt"
        path.write_text("0 0\n1 2\n0 0\n")
        assert main(["validate", str(path)]) == 2

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\nnot a line\n1 5\n")
        assert main(["validate", str(path)]) == 3

    def test_comments_and_decimals(self, tmp_path):
        path = tmp_path / "dec.txt"
        path.write_text("# header\n0.5 0.25\n8 0\n0 6\n")
        assert main(["validate", str(path)]) == 0


class TestRun:
    def test_triangle_nvd(self, tri_file, tmp_path):
        out = tmp_path / "records.txt"
        assert main(["run", tri_file, "--mode", "nvd", "--workspace", "8", "--out", str(out)]) == 0
        with open(out) as fh:
            header, records = read_stream(fh)
        assert header["mode"] == "nvd"
        assert len(records) == 3
        report = (tmp_path / "records.txt.report").read_text()
        assert "emitted=[k1=3]" in report

    def test_order_mode_verifies(self, random_file, tmp_path):
        out = tmp_path / "records.txt"
        assert (
            main(
                [
                    "run", random_file, "--mode", "order", "--max-k", "3",
                    "--workspace", "36", "--enforce", "--out", str(out),
                ]
            )
            == 0
        )
        assert main(["verify", random_file, str(out)]) == 0

    def test_config_violation(self, tri_file, tmp_path):
        out = tmp_path / "r.txt"
        code = main(
            ["run", tri_file, "--mode", "order", "--max-k", "10", "--workspace", "9", "--out", str(out)]
        )
        assert code == 5

    def test_scan_path_without_workspace(self, tri_file, tmp_path):
        out = tmp_path / "records.txt"
        assert main(["run", tri_file, "--mode", "fvd", "--out", str(out)]) == 0
        with open(out) as fh:
            _, records = read_stream(fh)
        assert len(records) == 3 and all(r.k == 2 for r in records)


class TestVerify:
    def test_defect_flagged(self, tri_file, tmp_path):
        out = tmp_path / "records.txt"
        main(["run", tri_file, "--mode", "nvd", "--workspace", "8", "--out", str(out)])
        lines = out.read_text().splitlines()
        with open(out, "w") as fh:
            fh.write("\n".join(lines[:-1]) + "\n")  # drop one record
        assert main(["verify", tri_file, str(out)]) == 1

    def test_duplicate_flagged(self, tri_file, tmp_path):
        out = tmp_path / "records.txt"
        main(["run", tri_file, "--mode", "nvd", "--workspace", "8", "--out", str(out)])
        lines = out.read_text().splitlines()
        with open(out, "a") as fh:
            fh.write(lines[-1] + "\n")
        assert main(["verify", tri_file, str(out)]) == 1


class TestDeterminism:
    def test_byte_identical_records_report_svg(self, random_file, tmp_path):
        outputs = []
        for tag in ("a", "b"):
            rec = tmp_path / f"{tag}.rec"
            svg = tmp_path / f"{tag}.svg"
            assert (
                main(
                    ["run", random_file, "--mode", "order", "--max-k", "2",
                     "--workspace", "16", "--seed", "7", "--out", str(rec)]
                )
                == 0
            )
            assert main(["svg", str(rec), "--out", str(svg), "--sites", random_file]) == 0
            outputs.append(
                (rec.read_bytes(), (tmp_path / f"{tag}.rec.report").read_bytes(), svg.read_bytes())
            )
        assert outputs[0] == outputs[1]

    def test_stream_round_trip(self, random_file, tmp_path):
        out = tmp_path / "records.txt"
        main(["run", random_file, "--mode", "nvd", "--workspace", "4", "--out", str(out)])
        with open(out) as fh:
            _, records = read_stream(fh)
        from wsvoronoi.records import format_record, parse_record

        assert [parse_record(format_record(r)) for r in records] == records


class TestBench:
    def test_csv_columns_deterministic(self, tmp_path):
        outs = []
        for tag in ("a", "b"):
            path = tmp_path / f"bench_{tag}.csv"
            assert (
                main(
                    ["bench", "--random", "48,3", "--s-list", "4,16",
                     "--repeats", "2", "--out", str(path)]
                )
                == 0
            )
            rows = path.read_text().splitlines()
            assert rows[0].startswith("# budget_const=")
            assert rows[1] == "n,s,K,reads,peak_words,wall_ns"
            outs.append([",".join(r.split(",")[:5]) for r in rows[2:]])
        assert outs[0] == outs[1]
        assert len(outs[0]) == 4  # 2 repeats x 2 s values


class TestBudgetEnv:
    def test_override_applied(self, tri_file, tmp_path, monkeypatch):
        monkeypatch.setenv("VW_BUDGET_CONST", "128")
        out = tmp_path / "r.rec"
        assert (
            main(["run", tri_file, "--mode", "nvd", "--workspace", "2", "--enforce", "--out", str(out)])
            == 0
        )
        assert "budget_const=128" in (tmp_path / "r.rec.report").read_text()

    def test_invalid_value_rejected(self, tri_file, tmp_path, monkeypatch):
        monkeypatch.setenv("VW_BUDGET_CONST", "zero")
        out = tmp_path / "r.rec"
        assert main(["run", tri_file, "--mode", "nvd", "--workspace", "2", "--out", str(out)]) == 5

    def test_too_small_budget_trips_enforcement(self, tmp_path, monkeypatch):
        from wsvoronoi.datagen import sites_to_text

        site_file = tmp_path / "s.txt"
        site_file.write_text(sites_to_text(random_sites(24, 11)))
        monkeypatch.setenv("VW_BUDGET_CONST", "2")
        out = tmp_path / "r.rec"
        code = main(["run", str(site_file), "--mode", "nvd", "--workspace", "4", "--enforce", "--out", str(out)])
        assert code == 4


class TestSvg:
    def test_empty_stream_renders(self, tmp_path):
        rec = tmp_path / "empty.rec"
        rec.write_text("# mode=nvd n=0\n")
        out = tmp_path / "empty.svg"
        assert main(["svg", str(rec), "--out", str(out)]) == 0
        text = out.read_text()
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")

    def test_viewport_flag(self, tri_file, tmp_path):
        rec = tmp_path / "r.rec"
        main(["run", tri_file, "--mode", "nvd", "--workspace", "8", "--out", str(rec)])
        out = tmp_path / "v.svg"
        assert main(["svg", str(rec), "--out", str(out), "--viewport=-2,-2,10,10"]) == 0
        text = out.read_text()
        lines = [l for l in text.splitlines() if l.startswith("<line")]
        # Three rays meeting at the image of the shared vertex (4, 3).
        assert len(lines) == 3
        cx = (4 - -2) / 12 * 640
        cy = 640 - (3 - -2) / 12 * 640
        anchor = f'x1="{cx:.6f}" y1="{cy:.6f}"'
        assert all(anchor in l for l in lines)
