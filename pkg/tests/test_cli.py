import csv
import json
import random

import pytest

from tedwalk.cli import main
from tedwalk.tree import enumerate_trees


@pytest.fixture
def tree_files(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("# star\n(()())\n")
    b.write_text("((()))\n")
    return a, b


class TestDist:
    def test_same_file_zero(self, tree_files, capsys):
        a, _ = tree_files
        assert main(["dist", str(a), str(a)]) == 0
        assert capsys.readouterr().out.strip() == "0"

    def test_star_chain(self, tree_files, capsys):
        a, b = tree_files
        assert main(["dist", str(a), str(b)]) == 0
        assert capsys.readouterr().out.strip() == "2"

    def test_stats_flag(self, tree_files, capsys):
        a, b = tree_files
        assert main(["dist", str(a), str(b), "--stats"]) == 0
        out = capsys.readouterr().out
        assert "pairs=9" in out

    def test_parse_error_exit_2(self, tmp_path, tree_files, capsys):
        a, _ = tree_files
        bad = tmp_path / "bad.txt"
        bad.write_text("(()\n")
        assert main(["dist", str(a), str(bad)]) == 2
        assert "offset" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tree_files):
        a, _ = tree_files
        assert main(["dist", str(a), "/nonexistent/tree.txt"]) == 2


class TestOracleCmd:
    def test_identical(self, tree_files, capsys):
        a, _ = tree_files
        assert main(["oracle", str(a), str(a)]) == 0
        assert capsys.readouterr().out.strip() == "0"

    def test_agrees_with_dist(self, tmp_path, capsys):
        rng = random.Random(83)
        codes = [c for n in range(1, 8) for c in enumerate_trees(n)]
        for trial in range(12):
            fa = tmp_path / f"a{trial}.txt"
            fb = tmp_path / f"b{trial}.txt"
            fa.write_text(rng.choice(codes) + "\n")
            fb.write_text(rng.choice(codes) + "\n")
            assert main(["dist", str(fa), str(fb)]) == 0
            d1 = capsys.readouterr().out.strip()
            assert main(["oracle", str(fa), str(fb)]) == 0
            d2 = capsys.readouterr().out.strip()
            assert d1 == d2

    def test_size_guard(self, tmp_path):
        big = tmp_path / "big.txt"
        big.write_text("(" * 9 + ")" * 9 + "\n")
        small = tmp_path / "small.txt"
        small.write_text("()\n")
        assert main(["oracle", str(big), str(small)]) == 2


class TestEnumerateCmd:
    def test_17_up_to_5(self, capsys):
        total = 0
        for n in range(1, 6):
            assert main(["enumerate", str(n)]) == 0
            total += len(capsys.readouterr().out.split())
        assert total == 17

    def test_range_guard(self, capsys):
        assert main(["enumerate", "13"]) == 2


class TestWalkCmd:
    def test_h0_single_row(self, tmp_path):
        out = tmp_path / "w"
        assert main(["walk", "--sizes", "3", "--steps", "0", "--seed", "1", "--out", str(out)]) == 0
        rows = list(csv.reader(open(out / "trajectory.csv")))
        assert len(rows) == 2  # header + h=0

    def test_seed_determinism_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "w1", tmp_path / "w2"
        for out in (out1, out2):
            assert main(
                ["walk", "--sizes", "5", "--steps", "40", "--seed", "9", "--out", str(out)]
            ) == 0
        assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()
        assert (out1 / "metadata.json").read_bytes() == (out2 / "metadata.json").read_bytes()

    def test_engines_agree(self, tmp_path):
        cols = {}
        for engine in ("incremental", "full"):
            out = tmp_path / engine
            assert main(
                [
                    "walk", "--sizes", "6", "--steps", "50", "--seed", "4",
                    "--out", str(out), "--distance", engine,
                ]
            ) == 0
            rows = list(csv.DictReader(open(out / "trajectory.csv")))
            cols[engine] = [r["dist"] for r in rows]
        assert cols["incremental"] == cols["full"]

    def test_budget_guard_exit_3(self, tmp_path):
        out = tmp_path / "w"
        code = main(
            ["walk", "--sizes", "3", "--steps", "50", "--budget", "10", "--out", str(out)]
        )
        assert code == 3

    def test_metadata_records_config(self, tmp_path):
        out = tmp_path / "w"
        main(["walk", "--sizes", "4", "--steps", "5", "--seed", "2", "--out", str(out)])
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["seed"] == 2
        assert meta["initial_size"] == 4
        assert "PCG64" in meta["rng"]

    def test_svg_written(self, tmp_path):
        out = tmp_path / "w"
        main(["walk", "--sizes", "3", "--steps", "10", "--out", str(out), "--svg"])
        assert (out / "trajectory.svg").exists()


class TestVerifyCmd:
    def test_clean_walk_ok(self, capsys):
        assert main(["verify", "--sizes", "5", "--steps", "40", "--seed", "3"]) == 0
        assert "ok" in capsys.readouterr().out

    def test_fault_injection_detected(self, capsys):
        code = main(
            [
                "verify", "--sizes", "6", "--steps", "40", "--seed", "3",
                "--inject-skip-repair",
            ]
        )
        assert code == 1
        out = capsys.readouterr().out
        assert "divergence at step" in out
        assert "pair" in out


class TestEscapeCmd:
    def test_tiny_run_outputs(self, tmp_path, capsys):
        out = tmp_path / "esc"
        code = main(
            [
                "escape", "--sizes", "2,3,4", "--steps", "60", "--replicates", "5",
                "--seed", "8", "--out", str(out), "--svg",
            ]
        )
        assert code == 0
        for name in ("curves.csv", "alpha.csv", "beta.txt", "metadata.json",
                     "curves.svg", "ratios.svg", "alpha.svg", "sharp_rate.svg"):
            assert (out / name).exists(), name
        rows = list(csv.DictReader(open(out / "curves.csv")))
        assert len(rows) == 3 * 61
        assert rows[0]["n"] == "5"

    def test_byte_identical_rerun(self, tmp_path):
        outs = []
        for name in ("e1", "e2"):
            out = tmp_path / name
            main(
                [
                    "escape", "--sizes", "2,3,4", "--steps", "40",
                    "--replicates", "4", "--seed", "5", "--out", str(out),
                ]
            )
            outs.append(out)
        for fname in ("curves.csv", "alpha.csv", "beta.txt"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()

    def test_budget_guard(self, tmp_path):
        out = tmp_path / "esc"
        code = main(
            [
                "escape", "--sizes", "2", "--steps", "1000", "--replicates", "100000",
                "--out", str(out),
            ]
        )
        assert code == 3


class TestBenchCmd:
    def test_outputs_and_ratio_column(self, tmp_path, capsys):
        out = tmp_path / "bench"
        assert main(
            ["bench", "--sizes", "8,12", "--trials", "2", "--seed", "1", "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(open(out / "bench.csv")))
        assert any(r["op"] == "all" for r in rows)
        for r in rows:
            ratio = float(r["t_full_mean"]) / float(r["t_incremental_mean"])
            assert ratio == pytest.approx(float(r["ratio"]), rel=1e-9)
